import hashlib
import logging
from enum import Enum, IntEnum
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]


class Label(IntEnum):
    """Transition label. The integer order is the canonical serialization order."""

    NEUTRAL = 0
    GOOD = 1
    BAD = 2

    @property
    def mark(self) -> str:
        return _MARKS[self]

    @classmethod
    def from_name(cls, name: str) -> 'Label':
        try:
            return cls[name.upper()]
        except KeyError:
            raise ValueError(f"Unknown label {name!r} (expected GOOD, NEUTRAL or BAD)")


_MARKS = {Label.NEUTRAL: '—', Label.GOOD: '✓', Label.BAD: '✗'}


class PairClass(Enum):
    NEUTRAL_ONLY = 'neutral'
    GOOD = 'good'
    ANY = 'any'


class AutomatonFormatError(ValueError):
    """Malformed automaton text or structure; carries the 1-based line and column when known."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(f"{where}{message}")
        self.line = line
        self.column = column


class DeterminismError(AutomatonFormatError):
    """Two transitions share the same (state, letter)."""


class LabelledAutomaton:
    """Deterministic automaton with a partial transition function and one label per transition.

    States and letters are arbitrary tokens; internally both are dense indices
    (states in declaration order, letters sorted), which is what frontiers,
    words and tables carry.
    """

    def __init__(self, states: Sequence[str], initial: str,
                 transitions: Iterable[Tuple[str, str, Label, str]],
                 alphabet: Optional[Iterable[str]] = None):
        transitions = list(transitions)
        if not states:
            raise AutomatonFormatError("automaton needs at least one state")
        if len(set(states)) != len(states):
            raise AutomatonFormatError("duplicate state declaration")
        if initial not in states:
            raise AutomatonFormatError(f"initial state {initial!r} is not a declared state")

        if alphabet is None:
            alphabet = {letter for _, letter, _, _ in transitions}
        letters = tuple(sorted(set(alphabet)))

        self.states: Tuple[str, ...] = tuple(states)
        self.alphabet: Tuple[str, ...] = letters
        self.initial: str = initial
        self._state_index: Dict[str, int] = {s: i for i, s in enumerate(self.states)}
        self._letter_index: Dict[str, int] = {a: i for i, a in enumerate(self.alphabet)}
        self._delta: List[Dict[int, Tuple[int, Label]]] = [dict() for _ in self.states]

        for src, letter, label, dst in transitions:
            for name in (src, dst):
                if name not in self._state_index:
                    raise AutomatonFormatError(f"unknown state {name!r} in transition")
            if letter not in self._letter_index:
                raise AutomatonFormatError(f"unknown letter {letter!r} in transition")
            q, a = self._state_index[src], self._letter_index[letter]
            if a in self._delta[q]:
                raise DeterminismError(f"two transitions for ({src}, {letter})")
            self._delta[q][a] = (self._state_index[dst], Label(label))

        self._pair_cache: Dict[PairClass, Dict[Pair, int]] = {}

    # ========== Indices ==========

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def initial_index(self) -> int:
        return self._state_index[self.initial]

    def state_index(self, name: str) -> int:
        try:
            return self._state_index[name]
        except KeyError:
            raise ValueError(f"Unknown state {name!r}")

    def letter_index(self, name: str) -> int:
        try:
            return self._letter_index[name]
        except KeyError:
            raise ValueError(f"Unknown letter {name!r}")

    def state_name(self, q: int) -> str:
        return self.states[q]

    def letter_name(self, a: int) -> str:
        return self.alphabet[a]

    def encode_word(self, letters: Iterable[str]) -> Tuple[int, ...]:
        return tuple(self.letter_index(a) for a in letters)

    def decode_word(self, word: Iterable[int]) -> Tuple[str, ...]:
        return tuple(self.alphabet[a] for a in word)

    # ========== Execution ==========

    def step(self, q: int, a: int) -> Optional[Tuple[int, Label]]:
        return self._delta[q].get(a)

    def edges(self, q: int) -> List[Tuple[int, int, Label]]:
        """Outgoing (letter, target, label) triples of q, by letter index."""
        return [(a, t, lab) for a, (t, lab) in sorted(self._delta[q].items())]

    def transitions(self) -> List[Tuple[str, str, Label, str]]:
        result = []
        for q in range(self.n_states):
            for a, t, lab in self.edges(q):
                result.append((self.states[q], self.alphabet[a], lab, self.states[t]))
        return result

    def trace_index(self, q: int, word: Sequence[int]) -> Optional[List[Tuple[int, Label]]]:
        """States entered and labels seen along word from q, or None if a step is undefined."""
        visited = []
        for a in word:
            nxt = self._delta[q].get(a)
            if nxt is None:
                return None
            visited.append(nxt)
            q = nxt[0]
        return visited

    def run_index(self, q: int, word: Sequence[int]) -> Optional[Tuple[int, Label]]:
        if not word:
            raise ValueError("run needs a nonempty word")
        visited = self.trace_index(q, word)
        if visited is None:
            return None
        return visited[-1]

    def run(self, state: str, word: Sequence[str]) -> Optional[Tuple[str, Label]]:
        """(δ(q,u), label of the last transition) or None when u leaves dom δ."""
        result = self.run_index(self.state_index(state), self.encode_word(word))
        if result is None:
            return None
        return self.states[result[0]], result[1]

    # ========== Realizable pairs ==========

    def pairs_by_class(self, pair_class: PairClass) -> Dict[Pair, int]:
        """Realizable one-step pairs with the least letter witnessing them."""
        cached = self._pair_cache.get(pair_class)
        if cached is not None:
            return cached
        wanted = {
            PairClass.NEUTRAL_ONLY: (Label.NEUTRAL,),
            PairClass.GOOD: (Label.GOOD,),
            PairClass.ANY: (Label.NEUTRAL, Label.GOOD, Label.BAD),
        }[pair_class]
        pairs: Dict[Pair, int] = {}
        for q in range(self.n_states):
            for a, t, lab in self.edges(q):
                if lab in wanted and (q, t) not in pairs:
                    pairs[(q, t)] = a
        self._pair_cache[pair_class] = pairs
        return pairs

    def digest(self) -> str:
        """Stable hash of the canonical text, used as archive key."""
        return hashlib.sha256(serialize(self).encode()).hexdigest()

    def __eq__(self, other) -> bool:
        if not isinstance(other, LabelledAutomaton):
            return NotImplemented
        return (set(self.states) == set(other.states)
                and self.initial == other.initial
                and self.alphabet == other.alphabet
                and set(self.transitions()) == set(other.transitions()))

    def __hash__(self):
        return hash(self.digest())

    def __repr__(self):
        n_trans = sum(len(d) for d in self._delta)
        return f"<LabelledAutomaton {self.n_states} states, {len(self.alphabet)} letters, {n_trans} transitions>"


# ========== Text format ==========

def _tokens(line: str) -> Iterator[Tuple[int, str]]:
    """(column, token) pairs; a token starting with '#' opens a comment."""
    col = 0
    n = len(line)
    while col < n:
        while col < n and line[col].isspace():
            col += 1
        if col >= n:
            return
        if line[col] == '#':
            return
        start = col
        while col < n and not line[col].isspace():
            col += 1
        yield start + 1, line[start:col]


def parse(text: str) -> LabelledAutomaton:
    """Parse the `states:` / `init:` / `alphabet:` / `trans:` line format."""
    states: List[str] = []
    initial: Optional[str] = None
    alphabet: Optional[List[str]] = None
    transitions: List[Tuple[str, str, Label, str]] = []
    seen_pairs: Dict[Tuple[str, str], int] = {}
    positions: List[Tuple[int, int, int, int]] = []
    init_at = (None, None)

    for lineno, line in enumerate(text.splitlines(), start=1):
        toks = list(_tokens(line))
        if not toks:
            continue
        col, head = toks[0]
        args = toks[1:]
        if head == 'states:':
            states.extend(tok for _, tok in args)
        elif head == 'init:':
            if len(args) != 1:
                raise AutomatonFormatError("init: expects exactly one state", lineno, col)
            initial = args[0][1]
            init_at = (lineno, args[0][0])
        elif head == 'alphabet:':
            alphabet = (alphabet or []) + [tok for _, tok in args]
        elif head == 'trans:':
            if len(args) != 4:
                raise AutomatonFormatError("trans: expects <src> <letter> <label> <dst>", lineno, col)
            (scol, src), (acol, letter), (lcol, label_name), (dcol, dst) = args
            try:
                label = Label.from_name(label_name)
            except ValueError as e:
                raise AutomatonFormatError(str(e), lineno, lcol)
            if (src, letter) in seen_pairs:
                raise DeterminismError(
                    f"second transition for ({src}, {letter}), first on line {seen_pairs[(src, letter)]}",
                    lineno, col)
            seen_pairs[(src, letter)] = lineno
            transitions.append((src, letter, label, dst))
            positions.append((lineno, scol, acol, dcol))
        else:
            raise AutomatonFormatError(f"unknown declaration {head!r}", lineno, col)

    if initial is None:
        raise AutomatonFormatError("missing initial state (init: line)")
    _check_names(states, initial, init_at, alphabet, transitions, positions)
    aut = LabelledAutomaton(states, initial, transitions, alphabet)
    logger.debug(f"Parsed {aut!r}")
    return aut


def _check_names(states, initial, init_at, alphabet, transitions, positions):
    known = set(states)
    if known and initial not in known:
        raise AutomatonFormatError(f"initial state {initial!r} is not a declared state", *init_at)
    letters = set(alphabet) if alphabet is not None else None
    for (src, letter, _, dst), (lineno, scol, acol, dcol) in zip(transitions, positions):
        for name, col in ((src, scol), (dst, dcol)):
            if known and name not in known:
                raise AutomatonFormatError(f"unknown state {name!r} in transition", lineno, col)
        if letters is not None and letter not in letters:
            raise AutomatonFormatError(f"unknown letter {letter!r} in transition", lineno, acol)


def serialize(aut: LabelledAutomaton) -> str:
    """Canonical text: states in declaration order, letters sorted, transitions by (state, letter)."""
    lines = [
        'states: ' + ' '.join(aut.states),
        f'init: {aut.initial}',
        'alphabet: ' + ' '.join(aut.alphabet),
    ]
    for src, letter, label, dst in aut.transitions():
        lines.append(f'trans: {src} {letter} {label.name} {dst}')
    return '\n'.join(lines) + '\n'


def load(path: str) -> LabelledAutomaton:
    with open(path, encoding='utf-8') as f:
        return parse(f.read())
