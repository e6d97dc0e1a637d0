import random
from itertools import product

import pytest

from conftest import FIG5B_GRID, G, N, X, make_automaton
from config import Budget, Caps, CapExceeded
from game import Label, expand_runs
from oracle import bounded_solve, brute_psi
from semigroup import (
    FrontierClosure, FrontierFamily, decompose_check, enum_psi0, enum_psi1, is_psi0_member,
    psi0plus_closure, psi_of_word, reconstruct_witness, set_star, star_holds, successor_families,
    window_frontier
)


def index_grid(aut, grid):
    return [[aut.state_index(q) for q in row] for row in grid]


def trace_grid(aut, moves, bound):
    """States visited by each move, the initial state in column 0."""
    return [[aut.initial_index] + [aut.state_index(q) for q, _ in row]
            for row in expand_runs(aut, moves, bound)]


def random_automaton(rng: random.Random, n_states: int = 2):
    states = [f's{i}' for i in range(n_states)]
    trans = []
    for q in states:
        for a in 'ab':
            if rng.random() < 0.7:
                trans.append((q, a, rng.choice([N, G, X]), rng.choice(states)))
    if not trans:
        trans.append((states[0], 'a', G, states[0]))
    return make_automaton(trans, initial='s0', states=states)


# ========== ψ(0) and ψ(1) ==========

def test_psi1_counts_all_sequences(fig1):
    assert sum(1 for _ in enum_psi1(fig1)) == 15


def test_psi0_on_fig1(fig1):
    frontiers = {f for f, _ in enum_psi0(fig1)}
    assert len(frontiers) == 7
    assert ((0, 1),) in frontiers
    assert ((1, 1), (0, 1), (0, 0)) in frontiers
    assert ((1, 1),) not in frontiers
    assert all(f[0] != (0, 0) for f in frontiers)


def test_psi0_letters_realize_pairs(fig5):
    for f, letters in enum_psi0(fig5, max_len=3):
        for (y, z), a in zip(f, letters):
            assert fig5.step(y, a)[0] == z


def test_enumeration_truncation_flag(fig1):
    short = enum_psi1(fig1, max_len=1)
    assert len(list(short)) == 3
    assert short.truncated
    full = enum_psi1(fig1, max_len=3)
    assert len(list(full)) == 15
    assert not full.truncated


@pytest.mark.parametrize('f, expected', [
    (((0, 1), (0, 0)), True),
    (((1, 1), (0, 1)), True),
    (((1, 1),), False),
    (((0, 0), (0, 1)), False),
])
def test_is_psi0_member(fig1, f, expected):
    assert is_psi0_member(fig1, f) is expected


@pytest.mark.parametrize('word', ['0', '1', '00', '01', '10', '11', '000'])
def test_psi_of_word_matches_definition(fig1, word):
    assert psi_of_word(fig1, word) == brute_psi(fig1, word)


@pytest.mark.parametrize('word', ['', '2', '0a'])
def test_psi_of_word_rejects_bad_words(fig1, word):
    with pytest.raises(ValueError):
        psi_of_word(fig1, word)


@pytest.mark.slow
@pytest.mark.parametrize('word', ['0', '1'])
def test_psi_of_word_matches_definition_fig5(fig5, word):
    assert psi_of_word(fig5, word) == brute_psi(fig5, word)


@pytest.mark.slow
def test_psi_of_word_matches_definition_random():
    rng = random.Random(11)
    for _ in range(100):
        aut = random_automaton(rng)
        for word in ('0', '1', '00', '01', '10', '11'):
            assert psi_of_word(aut, word) == brute_psi(aut, word), (aut.transitions(), word)



def small_automata():
    """Every automaton with at most two states and two letters, initial state s0."""
    for n_states in (1, 2):
        states = [f's{i}' for i in range(n_states)]
        options = [None] + [(label, t) for label in (N, G, X) for t in states]
        for letters in ('a', 'ab'):
            slots = [(q, a) for q in states for a in letters]
            for choice in product(options, repeat=len(slots)):
                trans = [(q, a, *opt) for (q, a), opt in zip(slots, choice) if opt is not None]
                if trans:
                    yield make_automaton(trans, initial='s0', states=states)


SHORT_WORDS = [''.join(w) for k in (1, 2, 3) for w in product('01', repeat=k)]


@pytest.mark.slow
def test_psi_of_word_matches_definition_exhaustive():
    for aut in small_automata():
        for word in SHORT_WORDS:
            assert psi_of_word(aut, word) == brute_psi(aut, word), (aut.transitions(), word)


@pytest.mark.slow
def test_psi_is_a_morphism_exhaustive():
    for aut in small_automata():
        psi = {word: psi_of_word(aut, word) for word in SHORT_WORDS}
        for word in SHORT_WORDS:
            for cut in range(1, len(word)):
                u, v = word[:cut], word[cut:]
                assert psi[word] == set_star(psi[u], psi[v]), (aut.transitions(), u, v)


# ========== Families ==========

def test_identity_family_membership():
    family = FrontierFamily.identity((0, 1))
    assert ((0, 0), (1, 1)) in family
    assert ((1, 1), (0, 0)) not in family
    assert ((0, 0), (0, 0)) not in family
    assert ((0, 1), (1, 1)) not in family


def test_identity_family_with_free_sources():
    family = FrontierFamily.identity((0,), free_sources=(1,))
    assert set(family.members()) == {((0, 0),), ((0, 0), (1, 1))}
    assert family.tail_allowed((1, 1))
    assert not family.tail_allowed((1, 0))


def test_family_members_cap():
    family = FrontierFamily.identity((), free_sources=range(4))
    with pytest.raises(CapExceeded):
        list(family.members(limit=10))


def test_successor_families_of_seed_cover_psi0(fig1):
    seed = FrontierClosure(fig1).seed
    covered = set()
    for family, step in successor_families(fig1, seed):
        covered.update(family.members())
    assert covered == {f for f, _ in enum_psi0(fig1)}


# ========== Closure ==========

@pytest.fixture
def fig1_closure(fig1):
    return psi0plus_closure(fig1)


def test_closure_completes(fig1_closure):
    assert fig1_closure.complete
    assert fig1_closure.stats.cap is None
    assert fig1_closure.stats.families == len(fig1_closure.families())


def test_closure_equals_union_of_powers(fig1, fig1_closure):
    depth = fig1_closure.stats.max_depth
    powers = set()
    for k in range(1, depth + 1):
        powers |= psi_of_word(fig1, '0' * k)
    assert fig1_closure.frontiers() == powers


@pytest.mark.slow
def test_closure_equals_union_of_powers_fig5(fig5):
    closure = psi0plus_closure(fig5)
    powers = set()
    for k in range(1, closure.stats.max_depth + 1):
        powers |= psi_of_word(fig5, '0' * k)
    assert closure.frontiers() == powers


def test_closure_contains_windows_of_fig5_play(fig5):
    closure = psi0plus_closure(fig5)
    grid = index_grid(fig5, FIG5B_GRID)
    for k in range(0, 6):
        for l in range(k + 1, 7):
            assert window_frontier(grid, k, l) in closure, (k, l)


def test_closure_contains_windows_of_fig1_play(fig1, fig1_closure):
    result = bounded_solve(fig1, 4)
    grid = trace_grid(fig1, result.lasso_moves(), 4)
    for k in range(0, 4):
        for l in range(k + 1, 5):
            assert window_frontier(grid, k, l) in fig1_closure, (k, l)


def test_lookup_misses_non_members(fig1, fig1_closure):
    assert fig1_closure.lookup(((0, 0),)) is None
    assert ((1, 1),) not in fig1_closure


def test_closure_cap_leaves_it_incomplete(fig5):
    closure = psi0plus_closure(fig5, Caps(max_frontiers=2))
    assert not closure.complete
    assert 'frontier' in closure.stats.cap


def test_seeded_closure_keeps_source_order(fig1):
    seed = FrontierFamily.identity((1, 0))
    closure = FrontierClosure(fig1, seed, Budget()).run()
    assert closure.complete
    assert ((1, 1), (0, 1), (0, 0)) in closure
    assert ((0, 1), (1, 1)) not in closure



def test_closure_within_keeps_rows_inside(fig5):
    inside = {0, 1, 2}
    closure = FrontierClosure(fig5, within=inside).run()
    assert closure.complete
    assert closure.families()
    for entry in closure.families():
        assert all(x in inside and y in inside for x, y in entry.family.reach)
    h = next(closure.families()[-1].family.members())
    assert all(set(row) <= inside for row in closure.lookup(h).witness().rows)


def test_closure_keep_drops_families(fig5):
    closure = FrontierClosure(fig5, keep=lambda family: False).run()
    assert closure.complete
    assert closure.families() == []
    assert closure.stats.pruned > 0


def test_closure_skips_covered_families(fig1):
    closure = FrontierClosure(fig1, FrontierFamily.identity((0,))).run()
    family = closure.families()[0].family
    assert closure._subsumed(FrontierFamily(family.prefix + ((0, 0),), family.reach, family.free_sources))
    assert not closure._subsumed(FrontierFamily(family.prefix, family.reach | {(1, 1)}, family.free_sources))
    assert not closure._subsumed(FrontierFamily(((0, 0),), family.reach, family.free_sources))


# ========== Provenance ==========

def test_witnesses_decompose(fig1, fig1_closure):
    for entry in fig1_closure.families():
        h = next(entry.family.members())
        found = fig1_closure.lookup(h)
        table = reconstruct_witness(found)
        assert table.width == found.depth + 1
        assert table.endpoints() == h
        assert table.consistent_with(fig1)


def test_witness_rows_win_all_positions(fig5):
    closure = psi0plus_closure(fig5)
    for entry in closure.families()[:40]:
        h = next(entry.family.members())
        table = closure.lookup(h).witness()
        won = [False] * (table.width - 1)
        for states, word in table.entries():
            for j, a in enumerate(word):
                label = fig5.step(states[j], a)[1]
                if not won[j]:
                    assert label is not Label.BAD
                    won[j] = label is Label.GOOD
        assert all(won)


def test_parent_links_are_star_steps(fig5):
    closure = psi0plus_closure(fig5)
    deep = [e for e in closure.families() if e.depth >= 2][:20]
    assert deep
    for entry in deep:
        h = next(entry.family.members())
        found = closure.lookup(h)
        if found.depth < 2:
            continue
        parent, generator, _ = found.parent
        assert parent.depth == found.depth - 1
        assert is_psi0_member(fig5, generator)
        assert star_holds(parent.frontier, generator, h)


def test_depth_one_entries_carry_letters(fig1, fig1_closure):
    found = fig1_closure.lookup(((0, 1), (0, 0)))
    assert found.depth == 1
    assert found.parent is None
    table = found.witness()
    assert decompose_check(((0, 1), (0, 0)), [((0, 1), (0, 0))], table)
    assert fig1.decode_word(found.letters) == ('b', 'a')
