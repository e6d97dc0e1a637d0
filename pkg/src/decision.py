import logging
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from config import Budget, Caps, CapExceeded
from game import LabelledAutomaton, PairClass, apply_bits
from semigroup import (
    Frontier, FrontierClosure, FrontierFamily, FamilyEntry, TripleTable, WitnessTable,
    decompose_check, format_frontier, is_initial, is_omega_iterable, is_psi0_member,
    parse_frontier, project, sources, star_holds, targets
)

logger = logging.getLogger(__name__)


class InvalidCertificateError(ValueError):
    """A certificate failed verification."""

    def __init__(self, failures: Sequence[str]):
        super().__init__(f"certificate rejected: {', '.join(failures)}")
        self.failures = list(failures)


# ========== Types ==========

@dataclass(frozen=True)
class Certificate:
    f: Frontier
    g: Frontier
    k: int
    l: int
    witness_f: WitnessTable
    witness_g: WitnessTable
    fg_table: TripleTable
    gg_table: TripleTable


class VerdictKind(Enum):
    YES = 'YES'
    NO = 'NO'
    INCONCLUSIVE = 'INCONCLUSIVE'


@dataclass
class DecisionStats:
    initial_families: int = 0
    source_orders: int = 0
    closures_completed: int = 0
    families_explored: int = 0
    families_pruned: int = 0
    families_subsumed: int = 0
    omega_candidates: int = 0
    elapsed: float = 0.0


@dataclass
class Verdict:
    kind: VerdictKind
    certificate: Optional[Certificate] = None
    stats: DecisionStats = field(default_factory=DecisionStats)
    cap: Optional[str] = None

    @property
    def exit_code(self) -> int:
        return {VerdictKind.YES: 0, VerdictKind.NO: 1, VerdictKind.INCONCLUSIVE: 2}[self.kind]


# ========== Search space ==========

def _closure_of(adj: Dict[int, Set[int]], start: Iterable[int]) -> Set[int]:
    seen = set(start)
    stack = list(seen)
    while stack:
        q = stack.pop()
        for r in adj.get(q, ()):
            if r not in seen:
                seen.add(r)
                stack.append(r)
    return seen


def _on_cycle(adj: Dict[int, Set[int]], states: Iterable[int]) -> Set[int]:
    return {q for q in states if q in _closure_of(adj, adj.get(q, ()))}


def _graphs(pairs: Iterable[Tuple[int, int]]) -> Tuple[Dict[int, Set[int]], Dict[int, Set[int]]]:
    adj: Dict[int, Set[int]] = defaultdict(set)
    back: Dict[int, Set[int]] = defaultdict(set)
    for y, z in pairs:
        adj[y].add(z)
        back[z].add(y)
    return adj, back


@dataclass(frozen=True)
class SearchSpace:
    """Where the rows of a certificate can run.

    g repeats forever from S to S, so S and every state on a row of g lies
    on a path from a cycle into a cycle (`lasso`); rows of f run from the
    initial state into S (`start`). The first pair of a ψ(0) member is
    NEUTRAL or GOOD, so the first row of g is an X-free loop through S[0],
    which makes S[0] an `anchor`, and that row never leaves the X-free
    component of S[0]. The first row of f is an X-free path into an anchor
    (`first_row`).
    """

    lasso: FrozenSet[int]
    start: FrozenSet[int]
    anchors: FrozenSet[int]
    component: Dict[int, FrozenSet[int]]
    first_row: FrozenSet[int]
    adj: Dict[int, Set[int]] = field(repr=False, compare=False)
    back: Dict[int, Set[int]] = field(repr=False, compare=False)

    @classmethod
    def of(cls, aut: LabelledAutomaton) -> 'SearchSpace':
        adj, back = _graphs(aut.pairs_by_class(PairClass.ANY))
        x_free = set(aut.pairs_by_class(PairClass.NEUTRAL_ONLY)) | set(aut.pairs_by_class(PairClass.GOOD))
        adj1, back1 = _graphs(x_free)

        reachable = _closure_of(adj, [aut.initial_index])
        cyclic = _on_cycle(adj, reachable)
        lasso = reachable & _closure_of(adj, cyclic) & _closure_of(back, cyclic)
        start = reachable & _closure_of(back, lasso)
        anchors = _on_cycle(adj1, lasso)
        component = {a: frozenset(_closure_of(adj1, [a]) & _closure_of(back1, [a])) for a in anchors}
        first_row = reachable & _closure_of(back1, anchors)
        return cls(frozenset(lasso), frozenset(start), frozenset(anchors), component,
                   frozenset(first_row), adj, back)

    def between(self, states: Iterable[int]) -> FrozenSet[int]:
        """Lasso states on some path from one of `states` to one of `states`."""
        states = set(states)
        return frozenset(self.lasso & _closure_of(self.adj, states) & _closure_of(self.back, states))


class SourceOrders:
    """Admissible source orders of g, each with the least depth of a matching f.

    f = [(q0,s) for s in S] lies in an initial family exactly when S starts
    with the family's target order t0 and continues with distinct states
    from a0, the further k-step targets of q0.
    """

    def __init__(self, keys: Dict[Tuple[Tuple[int, ...], FrozenSet[int]], int]):
        self.keys = keys

    def __len__(self):
        return len(self.keys)

    def states(self) -> FrozenSet[int]:
        return frozenset(q for t0, a0 in self.keys for q in (*t0, *a0))

    def _depths(self, max_depth: Optional[int]):
        for (t0, a0), depth in self.keys.items():
            if max_depth is None or depth <= max_depth:
                yield t0, a0, depth

    def allows_prefix(self, s: Sequence[int], max_depth: Optional[int] = None) -> bool:
        """Some admissible order starts with s."""
        s = tuple(s)
        for t0, a0, _ in self._depths(max_depth):
            m = min(len(s), len(t0))
            if s[:m] == t0[:m] and a0.issuperset(s[m:]):
                return True
        return False

    def depth(self, s: Sequence[int], max_depth: Optional[int] = None) -> Optional[int]:
        """Least depth of f_S, or None if S is not admissible."""
        s = tuple(s)
        best = None
        for t0, a0, depth in self._depths(max_depth):
            n = len(t0)
            if s[:n] == t0 and a0.issuperset(s[n:]) and (best is None or depth < best):
                best = depth
        return best


def order_keys(aut: LabelledAutomaton, initial: FrontierClosure, space: SearchSpace) -> SourceOrders:
    q0 = aut.initial_index
    keys: Dict[Tuple[Tuple[int, ...], FrozenSet[int]], int] = {}
    for entry in initial.families():
        fam = entry.family
        t0 = targets(fam.prefix)
        if t0[0] not in space.anchors or not space.lasso.issuperset(t0):
            continue
        a0 = frozenset(y for x, y in fam.reach if x == q0 and y in space.lasso) - set(t0)
        keys.setdefault((t0, a0), entry.depth)
    return SourceOrders(keys)


# ========== Idempotent members ==========

def _prefix_ok(G: Frontier) -> bool:
    if not is_omega_iterable(G):
        return False
    t, s = targets(G), sources(G)
    return s[:len(t)] == t


def idempotent_member(family: FrontierFamily, budget: Optional[Budget] = None,
                      orders: Optional[SourceOrders] = None,
                      max_depth: Optional[int] = None) -> Optional[Tuple[Frontier, TripleTable]]:
    """A member G of family with G ⋆ G → G, G ω-iterable and ⟨targets⟩ = ⟨sources⟩.

    G is grown from the family prefix while the three projections of one
    triple sequence are matched against it. Each projection has a cursor;
    a pair is either already passed, the next pair of G, or, when the
    cursor is at the end of G, a new tail pair appended to G. With
    `orders`, the source order of G must be admissible there.
    """
    c = family.prefix
    if not c or not _prefix_ok(c):
        return None
    if orders is not None and not orders.allows_prefix(sources(c), max_depth):
        return None
    reach_by_source: Dict[int, List[int]] = {}
    for x, y in sorted(family.reach):
        if family.tail_allowed((x, y)):
            reach_by_source.setdefault(x, []).append(y)

    seen = set()
    stack: List[Tuple[int, int, int, Frontier, TripleTable]] = [(0, 0, 0, c, ())]
    while stack:
        i1, i2, i3, G, triples = stack.pop()
        key = (i1, i2, i3, G)
        if key in seen:
            continue
        seen.add(key)
        if budget is not None:
            budget.check_states(len(seen))

        n = len(G)
        if i1 == i2 == i3 == n and targets(G) == sources(G):
            if orders is None or orders.depth(sources(G), max_depth) is not None:
                return G, triples

        position = {pair: idx for idx, pair in enumerate(G)}

        def options(cursor: int, source: Optional[int] = None):
            """Pairs a projection at cursor may take next, optionally with a fixed source."""
            for idx in range(min(cursor + 1, n)):
                if source is None or G[idx][0] == source:
                    yield G[idx]
            if cursor == n:
                for x, ys in reach_by_source.items():
                    if source is not None and x != source:
                        continue
                    for y in ys:
                        if (x, y) not in position:
                            yield (x, y)

        for x, y in options(i1):
            for _, z in options(i2, y):
                step = _advance(G, position, (i1, i2, i3), ((x, y), (y, z), (x, z)), family)
                if step is None:
                    continue
                (n1, n2, n3), G2 = step
                if (n1, n2, n3) == (i1, i2, i3) and G2 == G:
                    continue
                if G2 is not G:
                    if not _prefix_ok(G2):
                        continue
                    if orders is not None and not orders.allows_prefix(sources(G2), max_depth):
                        continue
                stack.append((n1, n2, n3, G2, triples + ((x, y, z),)))
    return None


def _advance(G: Frontier, position: Dict, cursors, pairs, family: FrontierFamily):
    new_pair = None
    n = len(G)
    moved = []
    for cur, pair in zip(cursors, pairs):
        idx = position.get(pair)
        if idx is not None and idx < cur:
            moved.append(cur)
        elif cur < n and G[cur] == pair:
            moved.append(cur + 1)
        elif cur == n and idx is None and family.tail_allowed(pair):
            if new_pair is not None and new_pair != pair:
                return None
            new_pair = pair
            moved.append(cur + 1)
        else:
            return None
    G2 = G + (new_pair,) if new_pair is not None else G
    return tuple(moved), G2


# ========== Decide ==========

def _initial_closure(aut: LabelledAutomaton, space: SearchSpace, budget: Budget) -> FrontierClosure:
    return FrontierClosure(
        aut, FrontierFamily.identity((aut.initial_index,)), budget,
        within=space.start,
        keep=lambda fam: fam.prefix[0][1] in space.first_row,
    )


def _loop_closure(aut: LabelledAutomaton, space: SearchSpace, orders: SourceOrders,
                  budget: Budget) -> FrontierClosure:
    """Closure of the identity over every admissible state, cut to usable g-families."""
    states = orders.states()

    def keep(fam: FrontierFamily) -> bool:
        x, y = fam.prefix[0]
        if x not in space.anchors or y not in space.component[x]:
            return False
        return orders.allows_prefix(sources(fam.prefix))

    return FrontierClosure(aut, FrontierFamily.identity((), states), budget,
                           within=space.between(states), keep=keep)


def decide(aut: LabelledAutomaton, caps: Optional[Caps] = None) -> Verdict:
    """YES with a certificate, NO once the closures complete, INCONCLUSIVE on a cap.

    The certificate is canonical: l is the least depth of an admissible g,
    and k is the least depth of f among the g found at depth l.
    """
    budget = Budget(caps)
    stats = DecisionStats()
    space = SearchSpace.of(aut)
    if aut.initial_index not in space.first_row:
        logger.info("NO: no X-free path from the initial state into a loop")
        return Verdict(VerdictKind.NO, stats=stats)
    try:
        initial = _initial_closure(aut, space, budget)
        for _ in initial.explore():
            pass
        stats.initial_families = len(initial.families())
        stats.closures_completed += 1
        orders = order_keys(aut, initial, space)
        stats.source_orders = len(orders)
        logger.info(f"{stats.initial_families} initial families, {stats.source_orders} source orders")
        if not orders:
            return _no(stats, budget, initial)

        closure = _loop_closure(aut, space, orders, budget)
        best: Optional[Tuple[int, FamilyEntry, Frontier, TripleTable]] = None
        for g_entry in closure.explore():
            if best is not None and g_entry.depth > best[1].depth:
                break
            stats.families_explored += 1
            if not is_omega_iterable(g_entry.family.prefix):
                continue
            stats.omega_candidates += 1
            limit = None if best is None else best[0] - 1
            while limit is None or limit >= 1:
                found = idempotent_member(g_entry.family, budget, orders, limit)
                if found is None:
                    break
                G, gg_table = found
                k = orders.depth(sources(G), limit)
                best = (k, g_entry, G, gg_table)
                limit = k - 1
        if best is not None:
            _, g_entry, G, gg_table = best
            cert = _certificate(aut, initial, closure, g_entry, G, gg_table)
            _tally(stats, budget, initial, closure)
            logger.info(f"YES: f depth {cert.k}, g depth {cert.l}")
            return Verdict(VerdictKind.YES, cert, stats)
        stats.closures_completed += 1
    except CapExceeded as e:
        stats.elapsed = budget.elapsed
        logger.warning(f"INCONCLUSIVE: {e}")
        return Verdict(VerdictKind.INCONCLUSIVE, stats=stats, cap=str(e))
    return _no(stats, budget, initial, closure)


def _tally(stats: DecisionStats, budget: Budget, *closures: FrontierClosure):
    stats.families_pruned = sum(c.stats.pruned for c in closures)
    stats.families_subsumed = sum(c.stats.subsumed for c in closures)
    stats.elapsed = budget.elapsed


def _no(stats: DecisionStats, budget: Budget, *closures: FrontierClosure) -> Verdict:
    _tally(stats, budget, *closures)
    logger.info("NO: the closures completed without a certificate")
    return Verdict(VerdictKind.NO, stats=stats)


def _certificate(aut, initial: FrontierClosure, closure: FrontierClosure, g_entry: FamilyEntry,
                 G: Frontier, gg_table: TripleTable) -> Certificate:
    q0 = aut.initial_index
    f = tuple((q0, s) for s in sources(G))
    f_found = initial.lookup(f)
    assert f_found is not None, "an admissible source order always has its f in the initial closure"
    return Certificate(
        f=f, g=G, k=f_found.depth, l=g_entry.depth,
        witness_f=f_found.witness(),
        witness_g=closure.witness(g_entry, G),
        fg_table=tuple((q0, y, z) for y, z in G),
        gg_table=gg_table,
    )


# ========== Verification ==========

@dataclass
class CertificateCheck:
    failures: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def __bool__(self):
        return self.ok


def _replays_to_ones(aut: LabelledAutomaton, table: WitnessTable, depth: int) -> bool:
    bits = (0,) * depth
    for states, word in zip(table.rows, table.letters):
        steps = aut.trace_index(states[0], word)
        if steps is None:
            return False
        bits = apply_bits(bits, [label for _, label in steps])
        if isinstance(bits, int):
            return False
    return all(bits)


def _witness_ok(aut: LabelledAutomaton, table: WitnessTable, frontier: Frontier, depth: int) -> bool:
    if not table.rows or table.width != depth + 1 or not table.consistent_with(aut):
        return False
    columns = [table.columns(i, i + 1) for i in range(depth)]
    if not decompose_check(frontier, columns, table):
        return False
    if not all(is_psi0_member(aut, col) for col in columns):
        return False
    return _replays_to_ones(aut, table, depth)


def verify_certificate(aut: LabelledAutomaton, cert: Certificate,
                       budget: Optional[Budget] = None) -> CertificateCheck:
    """Re-check every condition from scratch; one reason code per failure."""
    check = CertificateCheck()
    q0 = aut.initial_index
    if not cert.f or not is_initial(cert.f, q0):
        check.failures.append('f-not-initial')
    if not cert.g or not is_omega_iterable(cert.g):
        check.failures.append('g-not-omega-iterable')
    if not (targets(cert.f) == sources(cert.g) == targets(cert.g)):
        check.failures.append('interface-order')
    if project(cert.fg_table) != (cert.f, cert.g, cert.f) or not star_holds(cert.f, cert.g, cert.f, budget):
        check.failures.append('fg-product')
    if project(cert.gg_table) != (cert.g, cert.g, cert.g) or not star_holds(cert.g, cert.g, cert.g, budget):
        check.failures.append('gg-product')
    if cert.k < 1 or not _witness_ok(aut, cert.witness_f, cert.f, cert.k):
        check.failures.append('witness-f')
    if cert.l < 1 or not _witness_ok(aut, cert.witness_g, cert.g, cert.l):
        check.failures.append('witness-g')
    if check.failures:
        logger.info(f"Certificate rejected: {check.failures}")
    return check


# ========== Reports and text format ==========

def explain(verdict: Verdict, aut: Optional[LabelledAutomaton] = None) -> str:
    s = verdict.stats
    lines = [f"verdict: {verdict.kind.value}"]
    if verdict.kind is VerdictKind.YES and verdict.certificate is not None:
        cert = verdict.certificate
        show = (lambda fr: format_frontier(aut, fr)) if aut is not None else (lambda fr: str(list(fr)))
        lines.append(f"f = {show(cert.f)}  (depth k = {cert.k})")
        lines.append(f"g = {show(cert.g)}  (depth l = {cert.l})")
        lines.append(f"witness widths: {cert.witness_f.width} x {len(cert.witness_f.rows)}, "
                     f"{cert.witness_g.width} x {len(cert.witness_g.rows)}")
    elif verdict.kind is VerdictKind.INCONCLUSIVE:
        lines.append(f"cap hit: {verdict.cap}")
    lines.append(f"initial families: {s.initial_families}")
    lines.append(f"source orders: {s.source_orders}")
    lines.append(f"families explored: {s.families_explored}, omega-iterable candidates: {s.omega_candidates}")
    lines.append(f"families pruned: {s.families_pruned}, subsumed: {s.families_subsumed}")
    lines.append(f"closures completed: {s.closures_completed}")
    lines.append(f"elapsed: {s.elapsed:.2f}s")
    return '\n'.join(lines)


def format_certificate(aut: LabelledAutomaton, cert: Certificate) -> str:
    name = aut.state_name
    lines = [
        '# certificate',
        f'f: {format_frontier(aut, cert.f)}',
        f'g: {format_frontier(aut, cert.g)}',
        f'k: {cert.k}',
        f'l: {cert.l}',
    ]
    for key, table in (('witness_f', cert.witness_f), ('witness_g', cert.witness_g)):
        for states, word in zip(table.rows, table.letters):
            lines.append(f"{key}: {' '.join(map(name, states))} | {' '.join(map(aut.letter_name, word))}")
    for key, triples in (('fg', cert.fg_table), ('gg', cert.gg_table)):
        for t in triples:
            lines.append(f"{key}: {' '.join(map(name, t))}")
    return '\n'.join(lines) + '\n'


def parse_certificate(aut: LabelledAutomaton, text: str) -> Certificate:
    fields: Dict[str, List[str]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith('#'):
            continue
        key, sep, value = line.partition(':')
        if not sep:
            raise ValueError(f"line {lineno}: expected 'key: value'")
        fields.setdefault(key.strip(), []).append(value.strip())

    def single(key):
        if len(fields.get(key, [])) != 1:
            raise ValueError(f"certificate needs exactly one {key!r} line")
        return fields[key][0]

    def table(key):
        entries = []
        for value in fields.get(key, []):
            states, bar, word = value.partition('|')
            if not bar:
                raise ValueError(f"{key} row needs 'states | letters': {value!r}")
            entries.append((tuple(aut.state_index(s) for s in states.split()),
                            tuple(aut.letter_index(a) for a in word.split())))
        return WitnessTable.from_entries(entries)

    def triples(key):
        out = []
        for value in fields.get(key, []):
            parts = value.split()
            if len(parts) != 3:
                raise ValueError(f"{key} triple needs three states: {value!r}")
            out.append(tuple(aut.state_index(s) for s in parts))
        return tuple(out)

    return Certificate(
        f=parse_frontier(aut, single('f')),
        g=parse_frontier(aut, single('g')),
        k=int(single('k')),
        l=int(single('l')),
        witness_f=table('witness_f'),
        witness_g=table('witness_g'),
        fg_table=triples('fg'),
        gg_table=triples('gg'),
    )
