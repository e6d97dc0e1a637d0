import pytest

from decision import decide
from game import LossReport, LassoMove, PlayStatus, WinsWord, play_sequence
from instances import gen_fig3
from synthesis import (
    OrderMismatchError, SliceRow, compose_slices, descent, end_order, format_moves, slice_from_table,
    slice_result, omega_slice, parse_moves, slice_frontier, start_order, synthesize
)


def certificate(aut):
    return decide(aut).certificate


# ========== Slices ==========

def test_compose_uses_every_row():
    s = (SliceRow(0, (10,), 1), SliceRow(0, (11,), 0))
    s2 = (SliceRow(1, (20,), 1), SliceRow(0, (21,), 1), SliceRow(1, (22,), 0))
    out = compose_slices(s, s2)
    assert out == (
        SliceRow(0, (10, 20), 1),
        SliceRow(0, (11, 21), 1),
        SliceRow(0, (10, 22), 0),
    )
    assert start_order(out) == start_order(s)
    assert slice_frontier(out) == ((0, 1), (0, 0))


def test_compose_rejects_order_mismatch():
    s = (SliceRow(0, (0,), 1), SliceRow(0, (1,), 0))
    s2 = (SliceRow(0, (0,), 0), SliceRow(1, (0,), 1))
    assert end_order(s) == (1, 0)
    with pytest.raises(OrderMismatchError):
        compose_slices(s, s2)


def test_compose_rejects_infinite_left_rows():
    s = (SliceRow(0, (), 0, (1,)),)
    with pytest.raises(OrderMismatchError):
        compose_slices(s, (SliceRow(0, (0,), 0),))


def fig1_slice(fig1, rows):
    out = []
    for q, word in rows:
        end, _ = fig1.run(q, list(word))
        out.append(SliceRow(fig1.state_index(q), fig1.encode_word(word), fig1.state_index(end)))
    return tuple(out)


@pytest.mark.parametrize('rows, expected', [
    ([('q0', 'b')], '1'),
    ([('q1', 'a'), ('q0', 'b'), ('q0', 'a')], '1'),
    ([('q0', 'ba'), ('q0', 'ab')], '11'),
])
def test_slice_result(fig1, rows, expected):
    assert slice_result(fig1, fig1_slice(fig1, rows)) == WinsWord.parse(expected)


def test_slice_result_reports_loss(fig1):
    outcome = slice_result(fig1, fig1_slice(fig1, [('q0', 'a')]))
    assert isinstance(outcome, LossReport)
    assert outcome.position == 1


def test_slice_result_needs_finite_rows():
    with pytest.raises(ValueError):
        slice_result(None, (SliceRow(0, (), 0, (1,)),))


@pytest.mark.parametrize('name', ['fig1', 'fig5', 'fig3'])
def test_composed_witness_slices_win_their_columns(name, fig1, fig5):
    aut = {'fig1': fig1, 'fig5': fig5, 'fig3': gen_fig3(2, 3)}[name]
    cert = certificate(aut)
    s_f, s_g = slice_from_table(cert.witness_f), slice_from_table(cert.witness_g)
    assert slice_result(aut, s_f) == WinsWord.ones(cert.k)
    assert slice_result(aut, s_g) == WinsWord.ones(cert.l)
    strategy = s_f
    for copies in range(1, 5):
        strategy = compose_slices(strategy, s_g)
        assert slice_result(aut, strategy) == WinsWord.ones(cert.k + copies * cert.l)
        assert start_order(strategy) == (aut.initial_index,)
        assert end_order(strategy) == end_order(s_g)


def test_fig1_descent_and_omega_slice(fig1):
    cert = certificate(fig1)
    parts = descent(cert.witness_g, cert.g, 2)
    assert len(parts) == 1
    assert end_order(parts[0]) == (1,)
    assert descent(cert.witness_g, cert.g, 1) == []
    assert omega_slice(cert.witness_g, cert.g) == (SliceRow(1, (), 1, (0,)),)


# ========== Strategies ==========

def test_fig1_moves_at_bound_3(fig1):
    moves = synthesize(fig1, certificate(fig1), 3)
    assert [str(m) for m in moves] == [
        'b a a a (a)^w',
        'a b a a (a)^w',
        'a a b a (a)^w',
        'a a a b (a)^w',
    ]
    result = play_sequence(fig1, moves, 3)
    assert result.status is PlayStatus.WON
    assert result.won_after == 3


@pytest.mark.parametrize('name', ['fig1', 'fig5', 'fig3'])
def test_synthesized_moves_win(name, fig1, fig5):
    aut = {'fig1': fig1, 'fig5': fig5, 'fig3': gen_fig3(2, 3)}[name]
    cert = certificate(aut)
    for bound in range(1, 13):
        result = play_sequence(aut, synthesize(aut, cert, bound), bound)
        assert result.status is PlayStatus.WON, (bound, str(result))


@pytest.mark.slow
@pytest.mark.parametrize('name', ['fig1', 'fig5', 'fig3'])
def test_synthesized_moves_win_large_bounds(name, fig1, fig5):
    aut = {'fig1': fig1, 'fig5': fig5, 'fig3': gen_fig3(2, 3)}[name]
    cert = certificate(aut)
    for bound in range(1, 65):
        assert play_sequence(aut, synthesize(aut, cert, bound), bound).status is PlayStatus.WON


def test_synthesize_rejects_bad_bound(fig1):
    with pytest.raises(ValueError):
        synthesize(fig1, certificate(fig1), 0)


# ========== Move files ==========

def test_move_file_round_trip(fig1):
    moves = synthesize(fig1, certificate(fig1), 2)
    text = format_moves(moves)
    assert text.splitlines()[0] == 'move: b a a (a)^w'
    assert parse_moves(text) == moves


def test_parse_moves_skips_comments():
    text = '# fig1\n\nmove: (a)^w\nmove: b (a b)^w\n'
    assert parse_moves(text) == [LassoMove((), ('a',)), LassoMove(('b',), ('a', 'b'))]


@pytest.mark.parametrize('text', ['b a (a)^w\n', 'move: b a\n', 'move: b ()^w\n', 'step: (a)^w\n'])
def test_parse_moves_errors(text):
    with pytest.raises(ValueError):
        parse_moves(text)


@pytest.mark.parametrize('name', ['fig1', 'fig5', 'fig3'])
def test_synthesized_moves_never_lose_past_the_bound(name, fig1, fig5):
    aut = {'fig1': fig1, 'fig5': fig5, 'fig3': gen_fig3(2, 3)}[name]
    cert = certificate(aut)
    for bound in (1, 4, 7):
        result = play_sequence(aut, synthesize(aut, cert, bound), 4 * bound)
        assert result.non_losing, (bound, str(result))
