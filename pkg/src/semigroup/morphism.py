"""The morphism ψ from {0,1}* to sets of frontiers, and the closure ψ(0⁺).

ψ(1) is every frontier of one-step realizable pairs. ψ(0) is the subset
whose pairs can be realized so that some pair is GOOD and all earlier
ones NEUTRAL. ψ(0^k) is the k-fold ⋆ power of ψ(0).

The closure does not store concrete frontiers. If c ∈ ψ(0^k), appending
any pair realizable in k steps (from an admissible source) keeps the
frontier in ψ(0^k), because every population size is already won when
the extra rows are played. A FrontierFamily stores the explicit prefix,
the k-step reach relation and the extra admissible sources, and stands
for all such extensions at once.
"""
import logging
from collections import defaultdict, deque
from dataclasses import dataclass
from typing import (
    Callable, Dict, FrozenSet, Iterable, Iterator, List, Optional, Set, Tuple
)

from config import Budget, Caps, CapExceeded
from game import LabelledAutomaton, PairClass
from .frontiers import (
    Frontier, Pair, TripleTable, WitnessTable,
    project, reduce, set_star, sources, unify_product
)

logger = logging.getLogger(__name__)

GeneratorRows = Tuple[Tuple[Pair, int], ...]


# ========== ψ(0) and ψ(1) ==========

class FrontierStream:
    """Lazy enumeration; `truncated` turns True once max_len has cut a branch."""

    def __init__(self, source: Iterator):
        self._source = source
        self.truncated = False

    def __iter__(self):
        return self

    def __next__(self):
        return next(self._source)


def _successors(aut: LabelledAutomaton, within: Optional[FrozenSet[int]] = None) -> Dict[int, List[int]]:
    succ: Dict[int, List[int]] = defaultdict(list)
    for (y, z) in sorted(aut.pairs_by_class(PairClass.ANY)):
        if within is None or (y in within and z in within):
            succ[y].append(z)
    return succ


def enum_psi0(aut: LabelledAutomaton, max_len: Optional[int] = None) -> FrontierStream:
    """ψ(0) with one letter per pair; the pivot is the first GOOD-realizable pair."""
    neutral = aut.pairs_by_class(PairClass.NEUTRAL_ONLY)
    good = aut.pairs_by_class(PairClass.GOOD)
    anyp = aut.pairs_by_class(PairClass.ANY)
    pre_pairs = sorted(p for p in neutral if p not in good)
    good_pairs = sorted(good)
    all_pairs = sorted(anyp)

    def walk(prefix: Tuple[Pair, ...], letters: Tuple[int, ...], pivoted: bool):
        if pivoted:
            yield prefix, letters
        if max_len is not None and len(prefix) >= max_len:
            if _can_extend(prefix, pivoted):
                stream.truncated = True
            return
        used = set(prefix)
        if pivoted:
            for p in all_pairs:
                if p not in used:
                    yield from walk(prefix + (p,), letters + (anyp[p],), True)
        else:
            for p in good_pairs:
                if p not in used:
                    yield from walk(prefix + (p,), letters + (good[p],), True)
            for p in pre_pairs:
                if p not in used:
                    yield from walk(prefix + (p,), letters + (neutral[p],), False)

    def _can_extend(prefix, pivoted):
        pool = all_pairs if pivoted else good_pairs + pre_pairs
        return any(p not in prefix for p in pool)

    stream = FrontierStream(walk((), (), False))
    return stream


def enum_psi1(aut: LabelledAutomaton, max_len: Optional[int] = None) -> FrontierStream:
    """Every duplicate-free nonempty sequence of one-step realizable pairs."""
    all_pairs = sorted(aut.pairs_by_class(PairClass.ANY))

    def walk(prefix: Tuple[Pair, ...]):
        if prefix:
            yield prefix
        if max_len is not None and len(prefix) >= max_len:
            if len(prefix) < len(all_pairs):
                stream.truncated = True
            return
        for p in all_pairs:
            if p not in prefix:
                yield from walk(prefix + (p,))

    stream = FrontierStream(walk(()))
    return stream


def is_psi0_member(aut: LabelledAutomaton, f: Frontier) -> bool:
    neutral = aut.pairs_by_class(PairClass.NEUTRAL_ONLY)
    good = aut.pairs_by_class(PairClass.GOOD)
    anyp = aut.pairs_by_class(PairClass.ANY)
    for i, pair in enumerate(f):
        if pair in good:
            return all(p in anyp for p in f[i + 1:])
        if pair not in neutral:
            return False
    return False


def psi_of_word(aut: LabelledAutomaton, word: str, budget: Optional[Budget] = None) -> Set[Frontier]:
    """ψ(b₁) ⋆ … ⋆ ψ(bₙ) computed with set_star; meant for short words."""
    if not word or any(b not in '01' for b in word):
        raise ValueError(f"expected a nonempty word over 0/1, got {word!r}")
    psi0 = psi1 = None
    result: Optional[Set[Frontier]] = None
    for b in word:
        if b == '0':
            if psi0 is None:
                psi0 = {f for f, _ in enum_psi0(aut)}
            layer = psi0
        else:
            if psi1 is None:
                psi1 = set(enum_psi1(aut))
            layer = psi1
        result = set(layer) if result is None else set_star(result, layer, budget=budget)
        if budget is not None:
            budget.check_time()
    return result


# ========== Frontier families ==========

@dataclass(frozen=True)
class FrontierFamily:
    """All frontiers prefix·t with t drawn from `reach`, new, and with admissible sources."""

    prefix: Frontier
    reach: FrozenSet[Pair]
    free_sources: FrozenSet[int]

    @classmethod
    def identity(cls, order, free_sources=()) -> 'FrontierFamily':
        """Identity frontiers over `order`, optionally extended by free_sources in any order."""
        order = tuple(order)
        free = frozenset(free_sources) - set(order)
        states = set(order) | free
        return cls(tuple((q, q) for q in order), frozenset((q, q) for q in states), free)

    @property
    def allowed_sources(self) -> FrozenSet[int]:
        return frozenset(sources(self.prefix)) | self.free_sources

    def tail_candidates(self) -> List[Pair]:
        allowed = self.allowed_sources
        explicit = set(self.prefix)
        return sorted(p for p in self.reach if p[0] in allowed and p not in explicit)

    def tail_allowed(self, pair: Pair) -> bool:
        return pair in self.reach and pair[0] in self.allowed_sources

    def __contains__(self, h) -> bool:
        h = tuple(h)
        n = len(self.prefix)
        if h[:n] != self.prefix or len(set(h)) != len(h):
            return False
        allowed = self.allowed_sources
        return all(p in self.reach and p[0] in allowed for p in h[n:])

    def members(self, limit: Optional[int] = None) -> Iterator[Frontier]:
        pool = self.tail_candidates()
        count = 0

        def walk(tail):
            nonlocal count
            count += 1
            if limit is not None and count > limit:
                raise CapExceeded('family member', limit)
            yield self.prefix + tail
            for p in pool:
                if p not in tail:
                    yield from walk(tail + (p,))

        for h in walk(()):
            if h:
                yield h

    def __repr__(self):
        return (f"<FrontierFamily prefix={list(self.prefix)} reach={len(self.reach)} "
                f"free={sorted(self.free_sources)}>")


@dataclass(frozen=True)
class Step:
    """How a family was reached: triples of the ⋆ step and the ψ(0) generator with letters."""

    triples: TripleTable
    generator: GeneratorRows


def compose_reach(reach: FrozenSet[Pair], succ: Dict[int, List[int]]) -> FrozenSet[Pair]:
    return frozenset((x, z) for x, y in reach for z in succ.get(y, ()))


def successor_families(aut: LabelledAutomaton, family: FrontierFamily,
                       budget: Optional[Budget] = None,
                       _succ: Optional[Dict[int, List[int]]] = None) -> Iterator[Tuple[FrontierFamily, Step]]:
    """Families covering family ⋆ ψ(0), without enumerating ψ(0).

    A state is (prefix pairs continued, pivot placed, h prefix). Before the
    pivot every generator pair must be NEUTRAL-realizable and not GOOD-
    realizable; the first GOOD-realizable pair is the pivot. Once the whole
    prefix is continued and the pivot is placed, the remaining choices are
    exactly the tail of the emitted family.
    """
    succ = _succ if _succ is not None else _successors(aut)
    neutral = aut.pairs_by_class(PairClass.NEUTRAL_ONLY)
    good = aut.pairs_by_class(PairClass.GOOD)
    anyp = aut.pairs_by_class(PairClass.ANY)

    c = family.prefix
    allowed = family.allowed_sources
    tail_pool = list(reduce(list(c) + sorted(p for p in family.reach if p[0] in allowed)))
    next_reach = compose_reach(family.reach, succ)

    emitted: Set[Frontier] = set()
    seen = set()
    stack = [(0, False, (), (), ())]
    while stack:
        i, post, hp, triples, gen = stack.pop()
        key = (i, post, hp)
        if key in seen:
            continue
        seen.add(key)
        if budget is not None:
            budget.check_states(len(seen))

        if i == len(c) and post:
            if hp not in emitted:
                emitted.add(hp)
                free = family.free_sources - set(sources(hp))
                yield FrontierFamily(hp, next_reach, frozenset(free)), Step(triples, gen)
            continue

        hp_set = set(hp)
        gen_pairs = {p for p, _ in gen}
        xy_pool = c[:i + 1] if i < len(c) else tail_pool
        for a, (x, y) in enumerate(xy_pool):
            continues = i < len(c) and a == i
            for z in succ.get(y, ()):
                yz = (y, z)
                pivot_now = False
                if post:
                    letter = anyp[yz]
                elif yz in good:
                    letter, pivot_now = good[yz], True
                elif yz in neutral:
                    letter = neutral[yz]
                else:
                    continue
                xz = (x, z)
                is_new = xz not in hp_set
                if not (continues or is_new or pivot_now):
                    continue
                new_gen = gen if yz in gen_pairs else gen + ((yz, letter),)
                stack.append((i + continues, post or pivot_now,
                              hp + (xz,) if is_new else hp,
                              triples + ((x, y, z),), new_gen))


# ========== Closure ==========

@dataclass
class FamilyEntry:
    key: int
    family: FrontierFamily
    depth: int
    parent: Optional[int]
    step: Optional[Step]


@dataclass
class ClosureStats:
    families: int = 0
    expanded: int = 0
    max_depth: int = 0
    pruned: int = 0
    subsumed: int = 0
    complete: bool = False
    cap: Optional[str] = None


class ProvenancedFrontier:
    """A concrete closure member with its least depth; parent links are computed on demand."""

    def __init__(self, closure: 'FrontierClosure', frontier: Frontier, entry: FamilyEntry):
        self.closure = closure
        self.frontier = frontier
        self.entry = entry
        self._realized = None

    @property
    def depth(self) -> int:
        return self.entry.depth

    def _realize(self):
        if self._realized is None:
            self._realized = self.closure.realize(self.entry, self.frontier)
        return self._realized

    @property
    def parent(self) -> Optional[Tuple['ProvenancedFrontier', Frontier, TripleTable]]:
        """(predecessor, ψ(0) generator, triples) or None at depth 1."""
        if self.entry.depth <= 1:
            return None
        p, gen, triples = self._realize()
        parent_entry = self.closure.entries[self.entry.parent]
        generator = tuple(pair for pair, _ in gen)
        return ProvenancedFrontier(self.closure, p, parent_entry), generator, triples

    @property
    def letters(self) -> Optional[Tuple[int, ...]]:
        """Direct ψ(0) letter witness of a depth-1 entry."""
        if self.entry.depth != 1:
            return None
        _, gen, _ = self._realize()
        return tuple(letter for _, letter in gen)

    def witness(self) -> WitnessTable:
        return self.closure.witness(self.entry, self.frontier)

    def __repr__(self):
        return f"<ProvenancedFrontier {list(self.frontier)} depth={self.depth}>"


class FrontierClosure:
    """Breadth-first closure of a seed family under ⋆ ψ(0).

    The default seed (empty prefix, identity reach over every state) yields
    ψ(0⁺). A seed identity(order, free) yields the members of ψ(0⁺) whose
    source order starts with `order` and continues with free states.

    `within` keeps every witness row inside a set of states. `keep` drops
    families none of whose descendants the caller can use; it must reject
    a family only if it also rejects every family derived from it.
    A family all of whose members an entry already holds is not stored.
    """

    def __init__(self, aut: LabelledAutomaton, seed: Optional[FrontierFamily] = None,
                 budget: Optional[Budget] = None, within: Optional[Iterable[int]] = None,
                 keep: Optional[Callable[[FrontierFamily], bool]] = None):
        self.aut = aut
        self.within = frozenset(within) if within is not None else None
        if seed is None:
            states = self.within if self.within is not None else range(aut.n_states)
            seed = FrontierFamily((), frozenset((q, q) for q in states), frozenset(states))
        self.seed = seed
        self.budget = budget or Budget()
        self.keep = keep
        self.entries: List[FamilyEntry] = [FamilyEntry(0, seed, 0, None, None)]
        self.stats = ClosureStats()
        self._index: Dict[FrontierFamily, int] = {seed: 0}
        self._by_prefix: Dict[Frontier, List[int]] = defaultdict(list)
        self._dropped: Set[FrontierFamily] = set()
        self._queue = deque([0])
        self._succ = _successors(aut, self.within)

    @property
    def complete(self) -> bool:
        return self.stats.complete

    def _subsumed(self, family: FrontierFamily) -> bool:
        h = family.prefix
        allowed = family.allowed_sources
        for n in range(len(h) + 1):
            for key in self._by_prefix.get(h[:n], ()):
                other = self.entries[key].family
                if (family.reach <= other.reach and allowed <= other.allowed_sources
                        and all(other.tail_allowed(p) for p in h[n:])):
                    return True
        return False

    def explore(self) -> Iterator[FamilyEntry]:
        """Yield new families as they are discovered; raises CapExceeded on budget exhaustion."""
        while self._queue:
            key = self._queue.popleft()
            entry = self.entries[key]
            self.stats.expanded += 1
            for family, step in successor_families(self.aut, entry.family, self.budget, self._succ):
                if family in self._index or family in self._dropped:
                    continue
                if self.keep is not None and not self.keep(family):
                    self._dropped.add(family)
                    self.stats.pruned += 1
                    continue
                if self._subsumed(family):
                    self._dropped.add(family)
                    self.stats.subsumed += 1
                    continue
                self.budget.charge_frontier()
                new = FamilyEntry(len(self.entries), family, entry.depth + 1, key, step)
                self.entries.append(new)
                self._index[family] = new.key
                self._by_prefix[family.prefix].append(new.key)
                self._queue.append(new.key)
                self.stats.families += 1
                self.stats.max_depth = max(self.stats.max_depth, new.depth)
                logger.debug(f"depth {new.depth}: {family!r}")
                yield new
        self.stats.complete = True
        logger.info(f"Closure complete: {self.stats.families} families, depth {self.stats.max_depth}")

    def run(self) -> 'FrontierClosure':
        try:
            for _ in self.explore():
                pass
        except CapExceeded as e:
            self.stats.cap = str(e)
            logger.warning(f"Closure stopped early: {e}")
        return self

    def families(self) -> List[FamilyEntry]:
        return self.entries[1:]

    # ========== Membership ==========

    def lookup(self, frontier) -> Optional[ProvenancedFrontier]:
        """Least-depth entry containing frontier, or None."""
        h = tuple(frontier)
        best: Optional[FamilyEntry] = None
        for n in range(1, len(h) + 1):
            for key in self._by_prefix.get(h[:n], ()):
                entry = self.entries[key]
                if h in entry.family and (best is None or entry.depth < best.depth):
                    best = entry
        if best is None:
            return None
        return ProvenancedFrontier(self, h, best)

    def __contains__(self, frontier) -> bool:
        return self.lookup(frontier) is not None

    def frontiers(self, limit: Optional[int] = None) -> Set[Frontier]:
        """Concrete members of every family; for small automata."""
        out: Set[Frontier] = set()
        for entry in self.families():
            for h in entry.family.members():
                out.add(h)
                if limit is not None and len(out) > limit:
                    raise CapExceeded('concrete frontier', limit)
        return out

    # ========== Provenance ==========

    def realize(self, entry: FamilyEntry, h: Frontier) -> Tuple[Frontier, GeneratorRows, TripleTable]:
        """Parent member, generator and triples with parent ⋆ generator → h."""
        if entry.step is None:
            raise ValueError("seed families have no provenance")
        if h not in entry.family:
            raise ValueError(f"{list(h)} is not a member of {entry.family!r}")
        parent = self.entries[entry.parent].family
        anyp = self.aut.pairs_by_class(PairClass.ANY)
        triples = list(entry.step.triples)
        gen = list(entry.step.generator)
        gen_pairs = {p for p, _ in gen}
        for x, z in h[len(entry.family.prefix):]:
            y = next((y for (a, y) in sorted(parent.reach)
                      if a == x and parent.tail_allowed((a, y)) and z in self._succ.get(y, ())), None)
            if y is None:
                raise ValueError(f"corrupt provenance: no parent pair realizes ({x},{z})")
            triples.append((x, y, z))
            if (y, z) not in gen_pairs:
                gen_pairs.add((y, z))
                gen.append(((y, z), anyp[(y, z)]))
        p12, p23, p13 = project(triples)
        if p13 != tuple(h) or p23 != tuple(pair for pair, _ in gen):
            raise ValueError(f"corrupt provenance for {list(h)}")
        return p12, tuple(gen), tuple(triples)

    def witness(self, entry: FamilyEntry, h: Frontier) -> WitnessTable:
        """A width depth+1 witness table for h, rebuilt along the parent chain."""
        chain = []
        while entry.depth >= 1:
            p, gen, triples = self.realize(entry, h)
            chain.append((gen, triples))
            entry, h = self.entries[entry.parent], p

        gen, _ = chain.pop()
        table = WitnessTable.from_entries(((y, z), (letter,)) for (y, z), letter in gen)
        while chain:
            gen, triples = chain.pop()
            step_table = WitnessTable.from_entries(((y, z), (letter,)) for (y, z), letter in gen)
            table = unify_product(table, step_table, triples)
        return table


def psi0plus_closure(aut: LabelledAutomaton, caps: Optional[Caps] = None,
                     seed: Optional[FrontierFamily] = None,
                     budget: Optional[Budget] = None) -> FrontierClosure:
    """Run the closure; a cap hit leaves `complete` False and records the cap in stats."""
    closure = FrontierClosure(aut, seed, budget or Budget(caps))
    return closure.run()


def reconstruct_witness(entry: ProvenancedFrontier) -> WitnessTable:
    return entry.witness()
