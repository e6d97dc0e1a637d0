"""Exhaustive reference procedures for small inputs.

bounded_solve plays the game for one fixed bound B by breadth-first search
over wins words. brute_psi and naive_star recompute ψ and ⋆ straight from
their definitions. All three are exponential and only meant as cross-checks.
"""
import logging
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from itertools import product
from typing import Dict, List, Optional, Set, Tuple

from config import Budget, Caps, CapExceeded
from game import Label, LabelledAutomaton, LassoMove, WinsWord
from semigroup import Frontier, Triple, project

logger = logging.getLogger(__name__)

Word = Tuple[int, ...]


class OracleOutcome(Enum):
    WINNABLE = 'WINNABLE'
    UNWINNABLE = 'UNWINNABLE'
    INCONCLUSIVE = 'INCONCLUSIVE'


@dataclass
class OracleResult:
    outcome: OracleOutcome
    bound: int
    moves: List[Tuple[str, ...]] = field(default_factory=list)
    trace: List[WinsWord] = field(default_factory=list)
    words_explored: int = 0
    cap: Optional[str] = None

    @property
    def exit_code(self) -> int:
        return {OracleOutcome.WINNABLE: 0, OracleOutcome.UNWINNABLE: 1,
                OracleOutcome.INCONCLUSIVE: 2}[self.outcome]

    def lasso_moves(self) -> List[LassoMove]:
        """Each finite move as a lasso whose first B letters are the move itself."""
        return [LassoMove(m[:-1], m[-1:]) for m in self.moves]


# ========== Fixed-bound game ==========

def successors(aut: LabelledAutomaton, w: Tuple[int, ...],
               budget: Optional[Budget] = None) -> Dict[Tuple[int, ...], Word]:
    """Every non-losing minimal successor of w, each with its lexicographically least move."""
    layer: Dict[Tuple[int, Tuple[int, ...]], Word] = {(aut.initial_index, ()): ()}
    states = 0
    for j, won in enumerate(w):
        nxt: Dict[Tuple[int, Tuple[int, ...]], Word] = {}
        for (q, bits), word in sorted(layer.items(), key=lambda item: item[1]):
            for a, t, label in sorted(aut.edges(q)):
                if won:
                    bit = 1
                elif label is Label.BAD:
                    continue
                else:
                    bit = 1 if label is Label.GOOD else 0
                key = (t, bits + (bit,))
                if key not in nxt:
                    nxt[key] = word + (a,)
        layer = nxt
        states += len(layer)
        if budget is not None:
            budget.check_states(states)
    out: Dict[Tuple[int, ...], Word] = {}
    for (_, bits), word in sorted(layer.items(), key=lambda item: item[1]):
        if bits != w and bits not in out:
            out[bits] = word
    return out


def bounded_solve(aut: LabelledAutomaton, bound: int, caps: Optional[Caps] = None) -> OracleResult:
    """Shortest winning move sequence for population sizes 1..bound, if one exists."""
    if bound < 1:
        raise ValueError(f"bound must be positive, got {bound}")
    caps = caps or Caps.from_env()
    budget = Budget(caps)
    start, goal = (0,) * bound, (1,) * bound
    parent: Dict[Tuple[int, ...], Optional[Tuple[Tuple[int, ...], Word]]] = {start: None}
    queue = deque([start])
    try:
        while queue:
            w = queue.popleft()
            if w == goal:
                return _result(aut, bound, parent, goal)
            for w2, move in successors(aut, w, budget).items():
                if w2 in parent:
                    continue
                parent[w2] = (w, move)
                if len(parent) > caps.oracle_max_words:
                    raise CapExceeded('oracle wins word', caps.oracle_max_words)
                queue.append(w2)
    except CapExceeded as e:
        logger.warning(f"Oracle stopped at B={bound}: {e}")
        return OracleResult(OracleOutcome.INCONCLUSIVE, bound, words_explored=len(parent), cap=str(e))

    logger.info(f"B={bound}: 1^B unreachable after {len(parent)} wins words")
    return OracleResult(OracleOutcome.UNWINNABLE, bound, words_explored=len(parent))


def _result(aut, bound, parent, goal) -> OracleResult:
    moves, trace = [], [WinsWord(goal)]
    w = goal
    while parent[w] is not None:
        w, move = parent[w]
        moves.append(aut.decode_word(move))
        trace.append(WinsWord(w))
    moves.reverse()
    trace.reverse()
    logger.info(f"B={bound}: won in {len(moves)} moves")
    return OracleResult(OracleOutcome.WINNABLE, bound, moves, trace, words_explored=len(parent))


# ========== ψ and ⋆ by definition ==========

def _rows(aut: LabelledAutomaton, n: int) -> List[Tuple[Tuple[int, int], Tuple[Label, ...]]]:
    rows = set()
    for q in range(aut.n_states):
        for word in product(range(len(aut.alphabet)), repeat=n):
            steps = aut.trace_index(q, word)
            if steps is not None:
                rows.add(((q, steps[-1][0]), tuple(label for _, label in steps)))
    return sorted(rows)


def brute_psi(aut: LabelledAutomaton, word: str, budget: Optional[Budget] = None) -> Set[Frontier]:
    """Frontiers of row sequences that take the wins word `word` to all ones without a loss."""
    if not word or any(b not in '01' for b in word):
        raise ValueError(f"expected a nonempty word over 0/1, got {word!r}")
    rows = _rows(aut, len(word))
    start = tuple(int(b) for b in word)
    out: Set[Frontier] = set()
    seen = set()
    stack = [(start, ())]
    while stack:
        w, hp = stack.pop()
        if (w, hp) in seen:
            continue
        seen.add((w, hp))
        if budget is not None:
            budget.check_states(len(seen))
        if hp and all(w):
            out.add(hp)
        for pair, labels in rows:
            nxt = list(w)
            lost = False
            for j, label in enumerate(labels):
                if w[j]:
                    continue
                if label is Label.BAD:
                    lost = True
                    break
                if label is Label.GOOD:
                    nxt[j] = 1
            if lost:
                continue
            stack.append((tuple(nxt), hp if pair in hp else hp + (pair,)))
    return out


def naive_star(f: Frontier, g: Frontier, budget: Optional[Budget] = None) -> Set[Frontier]:
    """Every h with f ⋆ g → h, by trying sequences of distinct triples."""
    triples: List[Triple] = [(x, y, z) for x, y in f for y2, z in g if y == y2]
    budget = budget or Budget()
    out: Set[Frontier] = set()
    calls = 0

    def walk(chosen: Tuple[Triple, ...]):
        nonlocal calls
        calls += 1
        budget.check_states(calls)
        p12, p23, p13 = project(chosen)
        if p12 != tuple(f[:len(p12)]) or p23 != tuple(g[:len(p23)]):
            return
        if p12 == tuple(f) and p23 == tuple(g):
            out.add(p13)
        for t in triples:
            if t not in chosen:
                walk(chosen + (t,))

    walk(())
    return out
