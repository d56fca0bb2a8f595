"""Symmetric group and non-crossing partition combinatorics."""
from .ncposet import (  # noqa: F401
    GeodesicChain,
    NcPoset,
    block_weighted_sums,
    catalan,
    count_genus_one_pairs,
    count_multichains,
    enumerate_broken_multichains,
    enumerate_genus_one_pairs,
    enumerate_multichains,
    enumerate_nc,
    fuss_catalan,
    genus_stratification,
    is_noncrossing,
    kreweras,
    mobius,
    nc_leq,
    nc_poset,
)
from .symgroup import (  # noqa: F401
    Permutation,
    SymmetricGroup,
    adjacency_indicator,
    cayley_distance,
    compose,
    conjugacy_classes,
    enumerate_permutations,
    integer_partitions,
    num_cycles,
    rank,
    symmetric_group,
    unrank,
)
