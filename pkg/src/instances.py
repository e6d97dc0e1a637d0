"""Fixture automata and the two hardness reductions.

The figure generators build small hand-drawn automata. gen_from_unary_nfa
and gen_from_dtm turn a unary NFA and a space-bounded Turing machine into
labelled automata whose game is won exactly when the NFA is universal,
resp. when the machine reaches a final state.
"""
import logging
import random
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from game import AutomatonFormatError, Label, LabelledAutomaton
from game.automaton import _tokens

logger = logging.getLogger(__name__)

N, G, X = Label.NEUTRAL, Label.GOOD, Label.BAD


# ========== Figures ==========

def gen_fig1() -> LabelledAutomaton:
    return LabelledAutomaton(['q0', 'q1'], 'q0', [
        ('q0', 'a', X, 'q0'),
        ('q0', 'b', G, 'q1'),
        ('q1', 'a', N, 'q1'),
    ])


def gen_fig3(n1: int, n2: int) -> LabelledAutomaton:
    """Upper GOOD cycle of n1 states; lower branch GOOD, then n2 states ending in BAD."""
    if n1 < 1 or n2 < 1:
        raise ValueError(f"fig3 needs n1, n2 >= 1, got ({n1}, {n2})")
    upper = [f'u{k}' for k in range(1, n1 + 1)]
    lower = [f'l{k}' for k in range(1, n2 + 1)]
    trans = [('i', 'a', G, upper[0])]
    trans += [(upper[k], 'a', N, upper[k + 1]) for k in range(n1 - 1)]
    trans.append((upper[-1], 'a', G, upper[0]))
    trans += [('i', 'b', N, 'd'), ('d', 'a', N, 'd'), ('d', 'b', G, lower[0])]
    trans += [(lower[k], 'a', N, lower[k + 1]) for k in range(n2 - 1)]
    trans += [(lower[-1], 'a', X, 'sink'), ('sink', 'a', N, 'sink')]
    return LabelledAutomaton(['i'] + upper + ['d'] + lower + ['sink'], 'i', trans)


def gen_fig5() -> LabelledAutomaton:
    return LabelledAutomaton(['q0', 'q1', 'q2', 'q3', 'q4'], 'q0', [
        ('q0', 'a', G, 'q1'),
        ('q1', 'a', N, 'q2'),
        ('q2', 'a', G, 'q1'),
        ('q0', 'b', N, 'q3'),
        ('q3', 'a', X, 'q3'),
        ('q3', 'b', G, 'q4'),
        ('q4', 'a', N, 'q4'),
    ])


def gen_fig7() -> LabelledAutomaton:
    """Every fixed bound is winnable, but no single strategy wins every bound."""
    return LabelledAutomaton(['i', 'b1', 'b2', 'b3', 'c'], 'i', [
        ('i', 'a', N, 'b1'),
        ('i', 'b', G, 'c'),
        ('b1', 'a', N, 'b1'),
        ('b1', 'b', G, 'b2'),
        ('b2', 'a', X, 'b3'),
        ('b3', 'a', N, 'b1'),
        ('b3', 'b', G, 'b2'),
        ('c', 'a', X, 'c'),
    ])


FIGURES = {
    'fig1': gen_fig1,
    'fig5': gen_fig5,
    'fig7': gen_fig7,
}


# ========== Line formats ==========

def _fields(text: str, keys: Iterable[str]) -> Dict[str, List[Tuple[int, List[str]]]]:
    """key -> [(line number, tokens)] for 'key: tokens' lines, comments dropped."""
    keys = set(keys)
    out: Dict[str, List[Tuple[int, List[str]]]] = {k: [] for k in keys}
    for lineno, line in enumerate(text.splitlines(), start=1):
        tokens = [tok for _, tok in _tokens(line)]
        if not tokens:
            continue
        key = tokens[0]
        if not key.endswith(':') or key[:-1] not in keys:
            raise AutomatonFormatError(f"unexpected {key!r}", line=lineno, column=1)
        out[key[:-1]].append((lineno, tokens[1:]))
    return out


def _single(fields, key: str) -> List[str]:
    entries = fields[key]
    if len(entries) != 1:
        raise AutomatonFormatError(f"expected exactly one '{key}:' line, found {len(entries)}")
    return entries[0][1]


# ========== Unary NFA ==========

@dataclass(frozen=True)
class UnaryNFA:
    states: Tuple[str, ...]
    initial: str
    finals: FrozenSet[str]
    edges: FrozenSet[Tuple[str, str]]

    def __post_init__(self):
        known = set(self.states)
        if self.initial not in known:
            raise ValueError(f"initial state {self.initial!r} is not a declared state")
        for q in set(self.finals) | {s for e in self.edges for s in e}:
            if q not in known:
                raise ValueError(f"unknown state {q!r}")

    def post(self, subset: FrozenSet[str]) -> FrozenSet[str]:
        return frozenset(q for p, q in self.edges if p in subset)


def parse_nfa(text: str) -> UnaryNFA:
    fields = _fields(text, ('states', 'init', 'final', 'edge'))
    init = _single(fields, 'init')
    if len(init) != 1:
        raise AutomatonFormatError("'init:' takes one state")
    edges = []
    for lineno, tokens in fields['edge']:
        if len(tokens) != 2:
            raise AutomatonFormatError("'edge:' takes two states", line=lineno)
        edges.append(tuple(tokens))
    finals = [q for _, tokens in fields['final'] for q in tokens]
    try:
        return UnaryNFA(tuple(_single(fields, 'states')), init[0], frozenset(finals), frozenset(edges))
    except ValueError as e:
        raise AutomatonFormatError(str(e))


def nfa_is_universal(nfa: UnaryNFA) -> bool:
    """a^ℓ is accepted for every ℓ; subset reachability repeats after finitely many steps."""
    current = frozenset([nfa.initial])
    seen = set()
    while current not in seen:
        if not current & nfa.finals:
            return False
        seen.add(current)
        current = nfa.post(current)
    return True


def gen_from_unary_nfa(nfa: UnaryNFA) -> LabelledAutomaton:
    """Edge i gets the fresh NEUTRAL letter e<i>; finals step to a NEUTRAL-looping top on a GOOD 'w'."""
    if 'top' in nfa.states:
        raise ValueError("state name 'top' is reserved")
    trans = [(p, f'e{i}', N, q) for i, (p, q) in enumerate(sorted(nfa.edges))]
    trans += [(f, 'w', G, 'top') for f in sorted(nfa.finals)]
    trans.append(('top', 'w', N, 'top'))
    return LabelledAutomaton(list(nfa.states) + ['top'], nfa.initial, trans)


def random_unary_nfa(rng: random.Random, max_states: int = 4, edge_p: float = 0.4,
                     final_p: float = 0.5) -> UnaryNFA:
    k = rng.randint(1, max_states)
    states = tuple(f'p{i}' for i in range(k))
    edges = frozenset((p, q) for p in states for q in states if rng.random() < edge_p)
    finals = frozenset(q for q in states if rng.random() < final_p)
    return UnaryNFA(states, states[0], finals, edges)


# ========== Bounded DTM ==========

SEP = '#'
Head = Tuple[str, str]
Cell = Union[str, Head]
Config = Tuple[Cell, ...]


@dataclass(frozen=True)
class BoundedDTM:
    """Deterministic single-tape machine; tape[0] is the blank."""

    states: Tuple[str, ...]
    tape: Tuple[str, ...]
    delta: Dict[Tuple[str, str], Tuple[str, str, str]]
    initial: str
    finals: FrozenSet[str]

    def __post_init__(self):
        if not self.tape:
            raise ValueError("tape alphabet needs a blank")
        if SEP in self.tape:
            raise ValueError(f"{SEP!r} is reserved for configuration separators")
        if self.initial not in self.states:
            raise ValueError(f"initial state {self.initial!r} is not a declared state")
        for (s, a), (s2, a2, d) in self.delta.items():
            if s not in self.states or s2 not in self.states:
                raise ValueError(f"unknown state in delta ({s}, {a}) -> ({s2}, {a2}, {d})")
            if a not in self.tape or a2 not in self.tape:
                raise ValueError(f"unknown tape letter in delta ({s}, {a}) -> ({s2}, {a2}, {d})")
            if d not in ('L', 'R'):
                raise ValueError(f"direction must be L or R, got {d!r}")

    @property
    def blank(self) -> str:
        return self.tape[0]

    def gamma(self) -> List[Cell]:
        """Configuration letters: separator, plain tape letters, then head cells."""
        return [SEP] + list(self.tape) + [(s, a) for s in self.states for a in self.tape]

    def initial_config(self, n: int) -> Config:
        return ((self.initial, self.blank),) + (self.blank,) * (n - 1)


def parse_dtm(text: str) -> BoundedDTM:
    fields = _fields(text, ('states', 'init', 'final', 'tape', 'delta'))
    delta = {}
    for lineno, tokens in fields['delta']:
        if len(tokens) != 5:
            raise AutomatonFormatError("'delta:' takes s a s' a' L|R", line=lineno)
        s, a, s2, a2, d = tokens
        if (s, a) in delta:
            raise AutomatonFormatError(f"two delta lines for ({s}, {a})", line=lineno)
        delta[(s, a)] = (s2, a2, d)
    init = _single(fields, 'init')
    if len(init) != 1:
        raise AutomatonFormatError("'init:' takes one state")
    finals = [q for _, tokens in fields['final'] for q in tokens]
    try:
        return BoundedDTM(tuple(_single(fields, 'states')), tuple(_single(fields, 'tape')),
                          delta, init[0], frozenset(finals))
    except ValueError as e:
        raise AutomatonFormatError(str(e))


@dataclass
class DTMRun:
    configs: List[Config]
    accepted: bool
    halted: bool
    loop_start: Optional[int] = None

    def config_at(self, k: int) -> Config:
        """Configuration k of the run, with a halted run repeating its last configuration."""
        if k < len(self.configs):
            return self.configs[k]
        if self.loop_start is None:
            return self.configs[-1]
        period = len(self.configs) - self.loop_start
        return self.configs[self.loop_start + (k - self.loop_start) % period]


def _step(machine: BoundedDTM, config: Config) -> Optional[Config]:
    pos = next(i for i, c in enumerate(config) if isinstance(c, tuple))
    s, a = config[pos]
    move = machine.delta.get((s, a))
    if move is None:
        return None
    s2, a2, d = move
    target = pos - 1 if d == 'L' else pos + 1
    if not 0 <= target < len(config):
        return None
    cells = list(config)
    cells[pos] = a2
    cells[target] = (s2, cells[target])
    return tuple(cells)


def run_dtm(machine: BoundedDTM, n: int) -> DTMRun:
    """The n-bounded run up to halting or the first repeated configuration."""
    if n < 1:
        raise ValueError(f"space bound must be positive, got {n}")
    config = machine.initial_config(n)
    configs, seen = [config], {config}
    while True:
        state = next(c for c in config if isinstance(c, tuple))[0]
        if state in machine.finals:
            return DTMRun(configs, True, False)
        nxt = _step(machine, config)
        if nxt is None:
            return DTMRun(configs, False, True)
        if nxt in seen:
            return DTMRun(configs, False, False, loop_start=configs.index(nxt))
        seen.add(nxt)
        configs.append(nxt)
        config = nxt


def dtm_window(machine: BoundedDTM, left: Cell, mid: Cell, right: Cell) -> Cell:
    """The letter one configuration later at mid's cell, given mid and its two neighbours."""
    if mid == SEP:
        return SEP
    heads = [isinstance(c, tuple) for c in (left, mid, right)]
    if heads[1]:
        if heads[0] or heads[2]:
            return SEP
        s, a = mid
        move = machine.delta.get((s, a))
        if move is None:
            return mid
        s2, a2, d = move
        if (d == 'L' and left == SEP) or (d == 'R' and right == SEP):
            return mid
        return a2
    if heads[0] and heads[2]:
        return SEP
    for neighbour, direction in ((left, 'R'), (right, 'L')):
        if isinstance(neighbour, tuple):
            move = machine.delta.get(neighbour)
            if move is not None and move[2] == direction:
                return (move[0], mid)
    return mid


def dtm_word(machine: BoundedDTM, n: int, length: int) -> List[Cell]:
    """The first `length` letters of # c0 # c1 # ..., each computed from the window n+1 letters back."""
    rho: List[Cell] = [SEP] + list(machine.initial_config(n)) + [SEP]
    while len(rho) < length:
        i = len(rho) - n - 1
        rho.append(dtm_window(machine, rho[i - 1], rho[i], rho[i + 1]))
    return rho[:length]


def run_word(run: DTMRun, length: int) -> List[Cell]:
    """Same word as dtm_word, laid out from simulated configurations."""
    rho: List[Cell] = []
    k = 0
    while len(rho) < length:
        rho.append(SEP)
        rho.extend(run.config_at(k))
        k += 1
    return rho[:length]


def well_formed_window(window: Sequence[Cell], n: int) -> bool:
    """The window can occur in # c0 # c1 # ... for some run with n cells per configuration.

    Separators sit n+1 letters apart, and each configuration holds exactly
    one head cell.
    """
    seps = [i for i, c in enumerate(window) if c == SEP]
    if any(j - i != n + 1 for i, j in zip(seps, seps[1:])):
        return False
    run: List[Cell] = []
    for c in list(window) + [SEP]:
        if c != SEP:
            run.append(c)
            continue
        heads = sum(isinstance(x, tuple) for x in run)
        if len(run) > n or heads > 1 or (len(run) == n and heads != 1):
            return False
        run = []
    return True


class _Builder:
    def __init__(self):
        self.states: List[str] = []
        self.trans: List[Tuple[str, str, Label, str]] = []

    def state(self, name: str) -> str:
        self.states.append(name)
        return name

    def chain(self, src: str, letter: str, labels: Sequence[Label], dst: str, name: str):
        """len(labels) transitions from src to dst; the first reads `letter`, later ones '-'."""
        cur = src
        for j, label in enumerate(labels):
            nxt = dst if j == len(labels) - 1 else self.state(f'{name}.{j + 1}')
            self.trans.append((cur, letter if j == 0 else '-', label, nxt))
            cur = nxt


def gen_from_dtm(machine: BoundedDTM, n: int, all_windows: bool = False) -> LabelledAutomaton:
    """Automaton whose game is won iff the n-bounded run of `machine` reaches a final state.

    Population sizes are grouped into blocks of m = |Γ| sizes, one block per
    letter of # c0 # c1 # ...; letter number β is stored by winning the
    β-th size of its block. Every move starts at `init` or, after skipping
    whole blocks, at `hub`, and continues with one of:
    writing the initial configuration (from init only); reading three
    letters, skipping n−1 blocks and writing the next-configuration letter;
    reading a head cell in a final state and winning everything after it;
    winning a block whose successor block is already won.

    Only windows that can occur in a run get a read branch, unless
    `all_windows` is set. Dropping the others removes transitions the
    winning play never takes, so the verdict is the same.
    """
    if n < 1:
        raise ValueError(f"space bound must be positive, got {n}")
    gamma = machine.gamma()
    m = len(gamma)
    beta = {c: i for i, c in enumerate(gamma)}

    def read(c):
        return [N] * beta[c] + [X] + [N] * (m - beta[c] - 1)

    def write(c):
        return [N] * beta[c] + [G] + [N] * (m - beta[c] - 1)

    def occurs(*window):
        return all_windows or well_formed_window(window, n)

    b = _Builder()
    init, hub, rest, top = (b.state(s) for s in ('init', 'hub', 'rest', 'top'))
    b.trans.append((rest, '-', N, rest))
    b.trans.append((top, 'w', G, top))

    b.chain(init, 'k', [N] * m, hub, 'skip')
    b.trans.append((hub, 'k', N, 'skip.1'))

    start_word = [SEP] + list(machine.initial_config(n)) + [SEP]
    b.chain(init, 'i', [lab for c in start_word for lab in write(c)], rest, 'start')

    b.chain(init, 'v', [G] * m + [X] * m, rest, 'winback')
    b.trans.append((hub, 'v', G, 'winback.1'))

    tails: Dict[Cell, str] = {}

    def tail(c):
        if c not in tails:
            tails[c] = b.state(f'tail{beta[c]}')
            b.chain(tails[c], '-', [N] * ((n - 1) * m) + write(c), rest, f'tail{beta[c]}')
        return tails[c]

    for c1 in gamma:
        if not any(occurs(c1, c2, c3) for c2 in gamma for c3 in gamma):
            continue
        node1 = b.state(f'rd{beta[c1]}')
        b.chain(init, f'r{beta[c1]}', read(c1), node1, f'rd{beta[c1]}')
        b.trans.append((hub, f'r{beta[c1]}', read(c1)[0], f'rd{beta[c1]}.1'))
        if isinstance(c1, tuple) and c1[0] in machine.finals:
            b.trans.append((node1, 'w', G, top))
        for c2 in gamma:
            if not any(occurs(c1, c2, c3) for c3 in gamma):
                continue
            node2 = b.state(f'rd{beta[c1]}_{beta[c2]}')
            b.chain(node1, f'r{beta[c2]}', read(c2), node2, node2)
            for c3 in gamma:
                if occurs(c1, c2, c3):
                    r = dtm_window(machine, c1, c2, c3)
                    b.chain(node2, f'r{beta[c3]}', read(c3), tail(r), f'{node2}_{beta[c3]}')

    aut = LabelledAutomaton(b.states, init, b.trans)
    logger.info(f"DTM reduction (n={n}, m={m}, {len(tails)} tails): {aut!r}")
    return aut
