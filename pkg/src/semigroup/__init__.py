from .frontiers import (
    Pair, Triple, Frontier, TripleTable, WitnessTable, IncompatibleProductError,
    reduce, make_frontier, sources, targets, project, format_frontier, parse_frontier,
    star_products, star_holds, set_star, MergeStats, unify_product, decompose_check,
    is_initial, diagonal_prefix_length, is_omega_iterable, window_frontier
)
from .morphism import (
    FrontierStream, FrontierFamily, Step, FamilyEntry, ClosureStats,
    ProvenancedFrontier, FrontierClosure,
    enum_psi0, enum_psi1, is_psi0_member, psi_of_word, successor_families,
    psi0plus_closure, reconstruct_witness
)

__all__ = [
    'Pair', 'Triple', 'Frontier', 'TripleTable', 'WitnessTable', 'IncompatibleProductError',
    'reduce', 'make_frontier', 'sources', 'targets', 'project', 'format_frontier', 'parse_frontier',
    'star_products', 'star_holds', 'set_star', 'MergeStats', 'unify_product', 'decompose_check',
    'is_initial', 'diagonal_prefix_length', 'is_omega_iterable', 'window_frontier',
    'FrontierStream', 'FrontierFamily', 'Step', 'FamilyEntry', 'ClosureStats',
    'ProvenancedFrontier', 'FrontierClosure',
    'enum_psi0', 'enum_psi1', 'is_psi0_member', 'psi_of_word', 'successor_families',
    'psi0plus_closure', 'reconstruct_witness'
]
