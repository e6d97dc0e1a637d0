import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple, Union

from .automaton import Label, LabelledAutomaton

logger = logging.getLogger(__name__)


class UndefinedPathError(ValueError):
    """A move leaves the domain of the transition function."""

    def __init__(self, state: str, word: Sequence[str], position: int):
        super().__init__(
            f"move {' '.join(word) or 'ε'} from {state} is undefined at step {position}")
        self.state = state
        self.word = tuple(word)
        self.position = position


@dataclass(frozen=True)
class WinsWord:
    """Bits for population sizes 1..B; bit j-1 set means size j is already won."""

    bits: Tuple[int, ...]

    def __post_init__(self):
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError(f"wins word bits must be 0 or 1, got {self.bits}")

    @classmethod
    def zeros(cls, length: int) -> 'WinsWord':
        return cls((0,) * length)

    @classmethod
    def ones(cls, length: int) -> 'WinsWord':
        return cls((1,) * length)

    @classmethod
    def parse(cls, text: str) -> 'WinsWord':
        return cls(tuple(int(ch) for ch in text))

    @property
    def length(self) -> int:
        return len(self.bits)

    @property
    def is_full(self) -> bool:
        return all(self.bits)

    def __str__(self):
        return ''.join(map(str, self.bits))


def leq(w: WinsWord, w2: WinsWord) -> bool:
    """Pointwise order on wins words of equal length."""
    if w.length != w2.length:
        raise ValueError(f"cannot compare wins words of lengths {w.length} and {w2.length}")
    return all(a <= b for a, b in zip(w.bits, w2.bits))


@dataclass(frozen=True)
class LossReport:
    """First population size lost by a move: BAD seen at an unwon position."""

    position: int
    path: Tuple[str, ...]
    move_index: Optional[int] = None

    def __str__(self):
        where = f"move {self.move_index}, " if self.move_index is not None else ""
        return f"loss at {where}position {self.position} (path {' '.join(self.path)})"


@dataclass(frozen=True)
class LassoMove:
    """The infinite move prefix·cycle^ω."""

    prefix: Tuple[str, ...]
    cycle: Tuple[str, ...]

    def __post_init__(self):
        if not self.cycle:
            raise ValueError("lasso cycle must be nonempty")

    def expand(self, n: int) -> Tuple[str, ...]:
        if n <= len(self.prefix):
            return self.prefix[:n]
        rest = n - len(self.prefix)
        reps = -(-rest // len(self.cycle))
        return self.prefix + (self.cycle * reps)[:rest]

    def __str__(self):
        return f"{' '.join(self.prefix)} ({' '.join(self.cycle)})^w".strip()


MoveOutcome = Union[WinsWord, LossReport]


# ========== Single moves ==========

def apply_bits(bits: Tuple[int, ...], labels: Sequence[Label]) -> Union[Tuple[int, ...], int]:
    """Minimal successor of bits under a label sequence, or the 1-based lost position."""
    out = list(bits)
    for j, label in enumerate(labels):
        if bits[j]:
            continue
        if label is Label.BAD:
            return j + 1
        if label is Label.GOOD:
            out[j] = 1
    return tuple(out)


def apply_move(aut: LabelledAutomaton, w: WinsWord, q: str, move: Sequence[str]) -> MoveOutcome:
    """Apply a length-B finite move from q to w."""
    if len(move) != w.length:
        raise ValueError(f"move length {len(move)} does not match wins word length {w.length}")
    q_idx = aut.state_index(q)
    steps = aut.trace_index(q_idx, aut.encode_word(move))
    if steps is None:
        raise UndefinedPathError(q, move, _first_undefined(aut, q_idx, move))
    result = apply_bits(w.bits, [label for _, label in steps])
    if isinstance(result, int):
        path = (q,) + tuple(aut.state_name(s) for s, _ in steps[:result])
        return LossReport(position=result, path=path)
    return WinsWord(result)


def apply_lasso(aut: LabelledAutomaton, w: WinsWord, move: LassoMove) -> MoveOutcome:
    return apply_move(aut, w, aut.initial, move.expand(w.length))


# ========== Sequences of moves ==========

class PlayStatus(Enum):
    WON = 'won'
    LOST = 'lost'
    UNDECIDED = 'undecided'


@dataclass
class PlayResult:
    status: PlayStatus
    trace: List[WinsWord] = field(default_factory=list)
    loss: Optional[LossReport] = None
    won_after: Optional[int] = None

    @property
    def non_losing(self) -> bool:
        return self.loss is None

    def __str__(self):
        path = ' → '.join(str(w) for w in self.trace)
        if self.status is PlayStatus.WON:
            return f"WON after {self.won_after} moves: {path}"
        if self.status is PlayStatus.LOST:
            return f"LOST ({self.loss}): {path}"
        return f"UNDECIDED: {path}"


def play_sequence(aut: LabelledAutomaton, moves: Sequence[LassoMove], bound: int) -> PlayResult:
    """Fold apply_lasso from 0^B, stopping at the first loss or once 1^B is reached."""
    if bound < 1:
        raise ValueError(f"bound must be positive, got {bound}")
    w = WinsWord.zeros(bound)
    result = PlayResult(status=PlayStatus.UNDECIDED, trace=[w])
    if w.is_full:
        result.status, result.won_after = PlayStatus.WON, 0
        return result

    for index, move in enumerate(moves, start=1):
        outcome = apply_lasso(aut, w, move)
        if isinstance(outcome, LossReport):
            result.status = PlayStatus.LOST
            result.loss = LossReport(outcome.position, outcome.path, move_index=index)
            logger.debug(f"Play lost: {result.loss}")
            return result
        w = outcome
        result.trace.append(w)
        if w.is_full:
            result.status, result.won_after = PlayStatus.WON, index
            return result
    return result


def expand_runs(aut: LabelledAutomaton, moves: Sequence[LassoMove], bound: int) -> List[List[Tuple[str, Label]]]:
    """Per move, the state entered and the label seen at each of the first B steps."""
    grid = []
    q0 = aut.initial_index
    for move in moves:
        word = move.expand(bound)
        steps = aut.trace_index(q0, aut.encode_word(word))
        if steps is None:
            raise UndefinedPathError(aut.initial, word, _first_undefined(aut, q0, word))
        grid.append([(aut.state_name(s), label) for s, label in steps])
    return grid


def _first_undefined(aut: LabelledAutomaton, q: int, word: Sequence[str]) -> int:
    for j, letter in enumerate(word, start=1):
        nxt = aut.step(q, aut.letter_index(letter))
        if nxt is None:
            return j
        q = nxt[0]
    return len(word)
