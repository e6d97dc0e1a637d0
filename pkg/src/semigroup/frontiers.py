import re
import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import (
    Dict, Hashable, Iterable, List, Optional, Sequence, Set, Tuple, TypeVar, TYPE_CHECKING
)

from game import LabelledAutomaton

if TYPE_CHECKING:
    from config import Budget

logger = logging.getLogger(__name__)

T = TypeVar('T', bound=Hashable)
Pair = Tuple[int, int]
Triple = Tuple[int, int, int]
Frontier = Tuple[Pair, ...]
TripleTable = Tuple[Triple, ...]


class IncompatibleProductError(ValueError):
    """Witness tables and triple table do not describe the same product."""


# ========== Sequences ==========

def reduce(seq: Iterable[T]) -> Tuple[T, ...]:
    """Drop repeats, keeping the order of first appearance."""
    seen = set()
    out = []
    for item in seq:
        if item not in seen:
            seen.add(item)
            out.append(item)
    return tuple(out)


def make_frontier(pairs: Iterable[Pair]) -> Frontier:
    f = tuple((int(x), int(y)) for x, y in pairs)
    if not f:
        raise ValueError("frontiers are nonempty")
    if len(set(f)) != len(f):
        raise ValueError(f"frontier has a repeated pair: {f}")
    return f


def sources(f: Sequence[Pair]) -> Tuple[int, ...]:
    return reduce(x for x, _ in f)


def targets(f: Sequence[Pair]) -> Tuple[int, ...]:
    return reduce(y for _, y in f)


def project(triples: Sequence[Triple]) -> Tuple[Frontier, Frontier, Frontier]:
    """Reduced 1-2, 2-3 and 1-3 projections of a triple table."""
    return (reduce((a, b) for a, b, _ in triples),
            reduce((b, c) for _, b, c in triples),
            reduce((a, c) for a, _, c in triples))


_PAIR_RE = re.compile(r'\(\s*([^,()\s]+)\s*,\s*([^,()\s]+)\s*\)')


def format_frontier(aut: LabelledAutomaton, f: Sequence[Pair]) -> str:
    return '[' + ','.join(f'({aut.state_name(x)},{aut.state_name(y)})' for x, y in f) + ']'


def parse_frontier(aut: LabelledAutomaton, text: str) -> Frontier:
    text = text.strip()
    if not (text.startswith('[') and text.endswith(']')):
        raise ValueError(f"frontier must be written [(p,q),...], got {text!r}")
    pairs = [(aut.state_index(a), aut.state_index(b)) for a, b in _PAIR_RE.findall(text)]
    return make_frontier(pairs)


# ========== Witness tables ==========

Entry = Tuple[Tuple[int, ...], Tuple[int, ...]]


@dataclass(frozen=True)
class WitnessTable:
    """Rows of states of uniform width, each with the letters linking consecutive columns."""

    rows: Tuple[Tuple[int, ...], ...]
    letters: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.rows) != len(self.letters):
            raise ValueError("witness table needs one letter word per row")
        widths = {len(r) for r in self.rows}
        if len(widths) > 1:
            raise ValueError(f"witness rows have mixed widths {sorted(widths)}")
        for r, word in zip(self.rows, self.letters):
            if len(word) != len(r) - 1:
                raise ValueError(f"row {r} needs {len(r) - 1} letters, got {len(word)}")
        if len(set(self.entries())) != len(self.rows):
            raise ValueError("witness table rows repeat")

    @classmethod
    def from_entries(cls, entries: Iterable[Entry]) -> 'WitnessTable':
        entries = reduce(entries)
        return cls(tuple(r for r, _ in entries), tuple(w for _, w in entries))

    @property
    def width(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def entries(self) -> Tuple[Entry, ...]:
        return tuple(zip(self.rows, self.letters))

    def endpoints(self) -> Frontier:
        return reduce((r[0], r[-1]) for r in self.rows)

    def columns(self, i: int, j: int) -> Frontier:
        return reduce((r[i], r[j]) for r in self.rows)

    def consistent_with(self, aut: LabelledAutomaton) -> bool:
        """Every letter moves its row from one column to the next."""
        for r, word in zip(self.rows, self.letters):
            for c, a in enumerate(word):
                step = aut.step(r[c], a)
                if step is None or step[0] != r[c + 1]:
                    return False
        return True


# ========== The star relation ==========

def star_products(f: Frontier, g: Frontier, target: Optional[Frontier] = None,
                  budget: Optional['Budget'] = None) -> Dict[Frontier, TripleTable]:
    """Every h with f ⋆ g → h, each with one witnessing triple table.

    Search states are (f pairs introduced, g pairs introduced, h prefix).
    A triple is only taken if it introduces the next pair of f or of g,
    or a new pair of h. With `target`, only that h is searched for.
    """
    if targets(f) != sources(g):
        return {}

    g_by_source: Dict[int, List[Tuple[int, int]]] = defaultdict(list)
    for idx, (y, z) in enumerate(g):
        g_by_source[y].append((idx, z))
    wanted = set(target) if target is not None else None

    results: Dict[Frontier, TripleTable] = {}
    seen = set()
    stack: List[Tuple[int, int, Frontier, TripleTable]] = [(0, 0, (), ())]
    while stack:
        i, j, hp, triples = stack.pop()
        key = (i, j, hp)
        if key in seen:
            continue
        seen.add(key)
        if budget is not None:
            budget.check_states(len(seen))

        if i == len(f) and j == len(g):
            if (target is None or hp == target) and hp not in results:
                results[hp] = triples

        hp_set = set(hp)
        for a in range(min(i + 1, len(f))):
            x, y = f[a]
            for idx, z in g_by_source.get(y, ()):
                if idx > j:
                    break
                xz = (x, z)
                is_new = xz not in hp_set
                if wanted is not None and is_new:
                    if len(hp) >= len(target) or target[len(hp)] != xz:
                        continue
                if not (a == i or idx == j or is_new):
                    continue
                stack.append((i + (a == i), j + (idx == j),
                              hp + (xz,) if is_new else hp,
                              triples + ((x, y, z),)))
    return results


def star_holds(f: Frontier, g: Frontier, h: Frontier, budget: Optional['Budget'] = None) -> bool:
    return h in star_products(f, g, target=h, budget=budget)


def set_star(fs: Iterable[Frontier], gs: Iterable[Frontier], budget: Optional['Budget'] = None) -> Set[Frontier]:
    gs = list(gs)
    out: Set[Frontier] = set()
    for f in fs:
        for g in gs:
            out.update(star_products(f, g, budget=budget))
    return out


# ========== Merging witness tables ==========

def _check(condition: bool, equation: str):
    if not condition:
        raise AssertionError(f"unify_product postcondition violated: {equation}")


@dataclass
class MergeStats:
    rounds: int = 0
    steps: int = 0


def unify_product(x: WitnessTable, y: WitnessTable, w: Sequence[Triple],
                  stats: Optional[MergeStats] = None) -> WitnessTable:
    """Merge witnesses of f and g into one witness of h along the triple table w.

    Rounds grow three cursors over the rows of x, y and w; in each round
    every compatible (x row, y row, w triple) within the cursors is glued.
    Each combination is glued at most once, so `stats.steps` never exceeds
    |x| * |y| * |w|.
    """
    w = reduce(tuple(t) for t in w)
    x_rows = reduce(x.entries())
    y_rows = reduce(y.entries())
    if not w or not x_rows or not y_rows:
        raise IncompatibleProductError("unify_product needs nonempty tables")
    w12, w23, w13 = project(w)
    if reduce((r[0], r[-1]) for r, _ in x_rows) != w12:
        raise IncompatibleProductError("left table does not reduce to the 1-2 projection of the triples")
    if reduce((r[0], r[-1]) for r, _ in y_rows) != w23:
        raise IncompatibleProductError("right table does not reduce to the 2-3 projection of the triples")

    x_by_end: Dict[Pair, List[int]] = defaultdict(list)
    for i, (r, _) in enumerate(x_rows):
        x_by_end[(r[0], r[-1])].append(i)
    y_by_end: Dict[Pair, List[int]] = defaultdict(list)
    for j, (r, _) in enumerate(y_rows):
        y_by_end[(r[0], r[-1])].append(j)

    m = x.width
    z: List[Entry] = []
    placed = set()
    tried: Set[Tuple[int, int, int]] = set()
    alpha = beta = gamma = 0
    rounds = 0
    while alpha < len(x_rows) or beta < len(y_rows) or gamma < len(w):
        nxt_alpha, nxt_beta, nxt_gamma = alpha, beta, gamma
        for k in range(min(gamma + 1, len(w))):
            u, v, t = w[k]
            for i in x_by_end.get((u, v), ()):
                if i > alpha:
                    break
                for j in y_by_end.get((v, t), ()):
                    if j > beta:
                        break
                    if (k, i, j) in tried:
                        continue
                    tried.add((k, i, j))
                    (xs, xl), (ys, yl) = x_rows[i], y_rows[j]
                    row = (xs + ys[1:], xl + yl)
                    if row not in placed:
                        placed.add(row)
                        z.append(row)
                    nxt_alpha = max(nxt_alpha, i + 1)
                    nxt_beta = max(nxt_beta, j + 1)
                    nxt_gamma = max(nxt_gamma, k + 1)
        if (nxt_alpha, nxt_beta, nxt_gamma) == (alpha, beta, gamma):
            raise IncompatibleProductError(
                f"merge stalled at cursors ({alpha}, {beta}, {gamma})")
        alpha, beta, gamma = nxt_alpha, nxt_beta, nxt_gamma
        rounds += 1

    _check(reduce((s[:m], l[:m - 1]) for s, l in z) == x_rows, "⟨z[:m]⟩ = ⟨x⟩")
    _check(reduce((s[m - 1:], l[m - 1:]) for s, l in z) == y_rows, "⟨z[m:]⟩ = ⟨y⟩")
    _check(reduce((s[0], s[m - 1], s[-1]) for s, _ in z) == w, "⟨z[1,m,last]⟩ = w")
    _check(reduce((s[0], s[-1]) for s, _ in z) == w13, "⟨z[1,last]⟩ = h")
    logger.debug(f"unify_product: {len(z)} rows after {rounds} rounds, {len(tried)} steps")
    if stats is not None:
        stats.rounds, stats.steps = rounds, len(tried)
    return WitnessTable.from_entries(z)


def decompose_check(h: Frontier, witnesses: Sequence[Frontier], table: WitnessTable) -> bool:
    """h is the end-to-end reduction of table and witnesses[i] its (i, i+1) column reduction."""
    if not table.rows or table.width != len(witnesses) + 1:
        return False
    if table.endpoints() != tuple(h):
        return False
    return all(table.columns(i, i + 1) == tuple(fi) for i, fi in enumerate(witnesses))


# ========== Structural predicates ==========

def is_initial(f: Sequence[Pair], q_init: int) -> bool:
    return all(x == q_init for x, _ in f)


def diagonal_prefix_length(g: Sequence[Pair]) -> int:
    p = 0
    while p < len(g) and g[p][0] == g[p][1]:
        p += 1
    return p


def is_omega_iterable(g: Sequence[Pair]) -> bool:
    """(x,x) pairs first, then pairs (y,z) whose z was seen as an earlier source."""
    p = diagonal_prefix_length(g)
    if p == 0:
        return False
    seen = {x for x, _ in g[:p]}
    for y, z in g[p:]:
        if z not in seen:
            return False
        seen.add(y)
    return True


def window_frontier(grid: Sequence[Sequence[T]], k: int, l: int) -> Tuple[Tuple[T, T], ...]:
    """Reduced (column k, column l) pairs of a grid of visited states."""
    if not 0 <= k < l:
        raise IndexError(f"window needs 0 <= k < l, got k={k}, l={l}")
    if not grid:
        raise IndexError("window over an empty grid")
    for row in grid:
        if l >= len(row):
            raise IndexError(f"column {l} is outside a row of width {len(row)}")
    return reduce((row[k], row[l]) for row in grid)
