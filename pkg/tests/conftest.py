import pytest

from game import Label, LabelledAutomaton
from instances import gen_fig1, gen_fig5, gen_fig7, UnaryNFA, BoundedDTM

N, G, X = Label.NEUTRAL, Label.GOOD, Label.BAD


def make_automaton(transitions, initial=None, states=None) -> LabelledAutomaton:
    """Automaton from (src, letter, label, dst) tuples; states in order of appearance."""
    if states is None:
        states = []
        for src, _, _, dst in transitions:
            for q in (src, dst):
                if q not in states:
                    states.append(q)
    return LabelledAutomaton(states, initial or states[0], transitions)


@pytest.fixture
def fig1() -> LabelledAutomaton:
    return gen_fig1()


@pytest.fixture
def fig5() -> LabelledAutomaton:
    return gen_fig5()


@pytest.fixture
def fig7() -> LabelledAutomaton:
    return gen_fig7()


@pytest.fixture
def even_nfa() -> UnaryNFA:
    '''Accepts exactly the even lengths.'''
    return UnaryNFA(('p0', 'p1'), 'p0', frozenset({'p0'}), frozenset({('p0', 'p1'), ('p1', 'p0')}))


@pytest.fixture
def halting_dtm() -> BoundedDTM:
    '''Starts in its final state.'''
    return BoundedDTM(('s0',), ('b',), {}, 's0', frozenset({'s0'}))


@pytest.fixture
def selfloop_dtm() -> BoundedDTM:
    '''One non-final state that keeps moving right.'''
    return BoundedDTM(('s0',), ('b',), {('s0', 'b'): ('s0', 'b', 'R')}, 's0', frozenset())


@pytest.fixture
def looping_dtm() -> BoundedDTM:
    '''Bounces between the two cells forever without reaching a final state.'''
    return BoundedDTM(
        ('s0', 's1'), ('b',),
        {('s0', 'b'): ('s1', 'b', 'R'), ('s1', 'b'): ('s0', 'b', 'L')},
        's0', frozenset(),
    )


# States entered by a winning play of fig5 at B=6, initial state in column 0.
FIG5B_GRID = [
    ['q0', 'q1', 'q2', 'q1', 'q2', 'q1', 'q2'],
    ['q0', 'q3', 'q4', 'q4', 'q4', 'q4', 'q4'],
    ['q0', 'q3', 'q3', 'q3', 'q4', 'q4', 'q4'],
    ['q0', 'q3', 'q3', 'q3', 'q3', 'q3', 'q4'],
    ['q0', 'q3', 'q3', 'q3', 'q3', 'q3', 'q3'],
]

