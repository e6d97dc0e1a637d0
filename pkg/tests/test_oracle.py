import pytest

from config import Caps
from decision import VerdictKind, decide
from game import LassoMove, PlayStatus, WinsWord, play_sequence
from instances import gen_fig3, gen_from_unary_nfa
from oracle import OracleOutcome, bounded_solve, brute_psi, successors


def test_successors_fig1(fig1):
    assert successors(fig1, (0, 0)) == {(1, 0): fig1.encode_word('ba')}
    assert successors(fig1, (1, 0)) == {(1, 1): fig1.encode_word('ab')}
    assert successors(fig1, (1, 1)) == {}


def test_fig1_bound_3(fig1):
    result = bounded_solve(fig1, 3)
    assert result.outcome is OracleOutcome.WINNABLE
    assert result.exit_code == 0
    assert result.moves == [('b', 'a', 'a'), ('a', 'b', 'a'), ('a', 'a', 'b')]
    assert [str(w) for w in result.trace] == ['000', '100', '110', '111']
    assert result.lasso_moves()[0] == LassoMove(('b', 'a'), ('a',))


def test_oracle_moves_replay(fig5):
    result = bounded_solve(fig5, 4)
    play = play_sequence(fig5, result.lasso_moves(), 4)
    assert play.status is PlayStatus.WON
    assert play.trace == result.trace


@pytest.mark.parametrize('bound', range(1, 7))
@pytest.mark.parametrize('name', ['fig1', 'fig5', 'fig3'])
def test_yes_fixtures_winnable(name, bound, fig1, fig5):
    aut = {'fig1': fig1, 'fig5': fig5, 'fig3': gen_fig3(2, 3)}[name]
    assert bounded_solve(aut, bound).outcome is OracleOutcome.WINNABLE


@pytest.mark.slow
@pytest.mark.parametrize('bound', range(7, 11))
@pytest.mark.parametrize('name', ['fig1', 'fig5', 'fig3'])
def test_yes_fixtures_winnable_large(name, bound, fig1, fig5):
    aut = {'fig1': fig1, 'fig5': fig5, 'fig3': gen_fig3(2, 3)}[name]
    assert bounded_solve(aut, bound).outcome is OracleOutcome.WINNABLE


@pytest.mark.parametrize('bound', [1, 2, 3])
def test_fig7_winnable_at_small_bounds(fig7, bound):
    assert bounded_solve(fig7, bound).outcome is OracleOutcome.WINNABLE


def test_fig7_decides_no_although_small_bounds_are_winnable(fig7):
    assert decide(fig7).kind is VerdictKind.NO


def test_fig3_2_4_small_bound_still_winnable():
    # b b at size 2 only reaches the BAD edge at step 6
    assert bounded_solve(gen_fig3(2, 4), 2).outcome is OracleOutcome.WINNABLE


@pytest.mark.slow
def test_fig3_2_4_decides_no():
    assert decide(gen_fig3(2, 4)).kind is VerdictKind.NO


def test_even_nfa_unwinnable_at_2(even_nfa):
    aut = gen_from_unary_nfa(even_nfa)
    assert bounded_solve(aut, 1).outcome is OracleOutcome.WINNABLE
    result = bounded_solve(aut, 2)
    assert result.outcome is OracleOutcome.UNWINNABLE
    assert result.exit_code == 1
    assert result.moves == []
    assert result.words_explored >= 1


def test_word_cap_gives_inconclusive(fig1):
    result = bounded_solve(fig1, 3, Caps(oracle_max_words=1))
    assert result.outcome is OracleOutcome.INCONCLUSIVE
    assert result.exit_code == 2
    assert 'oracle wins word' in result.cap


def test_bound_must_be_positive(fig1):
    with pytest.raises(ValueError):
        bounded_solve(fig1, 0)


def test_brute_psi_rejects_bad_words(fig1):
    with pytest.raises(ValueError):
        brute_psi(fig1, '012')


def test_trace_words_increase(fig5):
    result = bounded_solve(fig5, 5)
    assert result.trace[0] == WinsWord.zeros(5)
    assert result.trace[-1] == WinsWord.ones(5)
    assert len(set(result.trace)) == len(result.trace)
