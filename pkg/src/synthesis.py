"""Winning strategies from a certificate.

A slice is an ordered list of rows, each a run from a start state. Slices
compose side by side when the order in which the left slice reaches its
end states is the order in which the right slice leaves them. The
strategy for bound B is

    s_f ∘ s_g^N ∘ (descent) ∘ s_ω

where s_f and s_g are read off the certificate witnesses, the descent
shrinks the interface down to the diagonal states of g, and s_ω repeats
the diagonal rows of g forever.
"""
import math
import logging
import re
from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

from decision import Certificate
from game import LabelledAutomaton, LassoMove, LossReport, WinsWord, apply_move
from semigroup import WitnessTable, diagonal_prefix_length, reduce, sources

logger = logging.getLogger(__name__)


class OrderMismatchError(ValueError):
    """The left slice's end order differs from the right slice's start order."""


@dataclass(frozen=True)
class SliceRow:
    start: int
    word: Tuple[int, ...]
    end: int
    cycle: Tuple[int, ...] = ()


Slice = Tuple[SliceRow, ...]


def slice_from_table(table: WitnessTable) -> Slice:
    return tuple(SliceRow(states[0], tuple(word), states[-1]) for states, word in zip(table.rows, table.letters))


def start_order(s: Sequence[SliceRow]) -> Tuple[int, ...]:
    return reduce(row.start for row in s)


def end_order(s: Sequence[SliceRow]) -> Tuple[int, ...]:
    return reduce(row.end for row in s)


def slice_frontier(s: Sequence[SliceRow]) -> Tuple[Tuple[int, int], ...]:
    return reduce((row.start, row.end) for row in s)


def slice_result(aut: LabelledAutomaton, s: Sequence[SliceRow]) -> Union[WinsWord, LossReport]:
    """Wins word left by playing the rows of a finite slice in order from all zeros."""
    if any(row.cycle for row in s):
        raise ValueError("only finite slices have a result")
    widths = {len(row.word) for row in s}
    if len(widths) != 1:
        raise ValueError(f"slice rows have mixed lengths {sorted(widths)}")
    w = WinsWord.zeros(widths.pop())
    for row in s:
        outcome = apply_move(aut, w, aut.state_name(row.start), aut.decode_word(row.word))
        if isinstance(outcome, LossReport):
            return outcome
        w = outcome
    return w


def compose_slices(s: Sequence[SliceRow], s2: Sequence[SliceRow]) -> Slice:
    """Glue s2 behind s; every row of either side is used, in its own order."""
    if end_order(s) != start_order(s2):
        raise OrderMismatchError(
            f"end order {end_order(s)} does not match start order {start_order(s2)}")
    if any(row.cycle for row in s):
        raise OrderMismatchError("cannot extend a slice whose rows are already infinite")

    out: List[SliceRow] = []
    ends_seen = set()
    alpha = beta = 0

    def glue(left: SliceRow, right: SliceRow):
        out.append(SliceRow(left.start, left.word + right.word, right.end, right.cycle))

    while alpha < len(s) or beta < len(s2):
        if beta < len(s2) and s2[beta].start in ends_seen:
            left = next(row for row in s[:alpha] if row.end == s2[beta].start)
            glue(left, s2[beta])
            beta += 1
        elif alpha < len(s) and s[alpha].end in ends_seen:
            right = next(row for row in s2[:beta] if row.start == s[alpha].end)
            glue(s[alpha], right)
            alpha += 1
        elif alpha < len(s) and beta < len(s2) and s[alpha].end == s2[beta].start:
            glue(s[alpha], s2[beta])
            ends_seen.add(s[alpha].end)
            alpha += 1
            beta += 1
        else:
            raise OrderMismatchError(f"merge stalled at rows ({alpha}, {beta})")
    return tuple(out)


def omega_slice(table: WitnessTable, g) -> Slice:
    """Rows up to the first occurrence of the last diagonal pair of g, each looped forever."""
    p = diagonal_prefix_length(g)
    if p == 0:
        raise ValueError("g has no diagonal prefix")
    last = g[p - 1]
    rows = []
    for states, word in zip(table.rows, table.letters):
        if states[0] != states[-1]:
            raise ValueError(f"row {states} before the last diagonal pair is not a cycle")
        rows.append(SliceRow(states[0], (), states[0], tuple(word)))
        if (states[0], states[-1]) == last:
            return tuple(rows)
    raise ValueError(f"witness never reaches the diagonal pair {last}")


def descent(table: WitnessTable, g, width: int) -> List[Slice]:
    """Prefixes of the g witness that shrink an interface of `width` states to the diagonal states."""
    p = diagonal_prefix_length(g)
    first_row = {}
    for t, states in enumerate(table.rows):
        first_row.setdefault((states[0], states[-1]), t)
    s_g = slice_from_table(table)
    parts = []
    cur = width
    while cur > p:
        c = next(c for c in range(len(g)) if len(sources(g[:c + 1])) == cur)
        part = s_g[:first_row[g[c]] + 1]
        parts.append(part)
        cur = len(end_order(part))
        logger.debug(f"descent: interface shrinks to {cur} states")
    return parts


def synthesize(aut: LabelledAutomaton, cert: Certificate, bound: int) -> List[LassoMove]:
    """Lasso moves from q0 that win every population size up to `bound`."""
    if bound < 1:
        raise ValueError(f"bound must be positive, got {bound}")
    s_g = slice_from_table(cert.witness_g)
    strategy = slice_from_table(cert.witness_f)

    copies = max(0, math.ceil((bound - cert.k) / cert.l))
    for _ in range(copies):
        strategy = compose_slices(strategy, s_g)
    for part in descent(cert.witness_g, cert.g, len(end_order(strategy))):
        strategy = compose_slices(strategy, part)
    strategy = compose_slices(strategy, omega_slice(cert.witness_g, cert.g))

    logger.info(f"B={bound}: {copies} copies of g, {len(strategy)} moves")
    return [LassoMove(aut.decode_word(row.word), aut.decode_word(row.cycle)) for row in strategy]


# ========== Move files ==========

_MOVE_RE = re.compile(r'^(?P<prefix>[^()]*)\((?P<cycle>[^()]+)\)\^w$')


def format_moves(moves: Sequence[LassoMove]) -> str:
    return ''.join(f"move: {move}\n" for move in moves)


def parse_moves(text: str) -> List[LassoMove]:
    moves = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith('#'):
            continue
        key, sep, value = line.partition(':')
        if not sep or key.strip() != 'move':
            raise ValueError(f"line {lineno}: expected 'move: <prefix> (<cycle>)^w'")
        m = _MOVE_RE.match(value.strip())
        if m is None:
            raise ValueError(f"line {lineno}: malformed lasso {value.strip()!r}")
        moves.append(LassoMove(tuple(m.group('prefix').split()), tuple(m.group('cycle').split())))
    return moves
