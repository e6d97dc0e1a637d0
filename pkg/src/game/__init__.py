from .automaton import (
    Label, PairClass, LabelledAutomaton,
    AutomatonFormatError, DeterminismError,
    parse, serialize, load
)
from .winswords import (
    WinsWord, LassoMove, LossReport, PlayStatus, PlayResult,
    UndefinedPathError, apply_bits, apply_move, apply_lasso, play_sequence, leq, expand_runs
)

__all__ = [
    'Label', 'PairClass', 'LabelledAutomaton',
    'AutomatonFormatError', 'DeterminismError',
    'parse', 'serialize', 'load',
    'WinsWord', 'LassoMove', 'LossReport', 'PlayStatus', 'PlayResult',
    'UndefinedPathError', 'apply_bits', 'apply_move', 'apply_lasso', 'play_sequence', 'leq', 'expand_runs'
]
