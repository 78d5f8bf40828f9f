"""Structure of outer automorphism groups of virtually free groups.

The package takes a finite graph of finite groups, computes the structural
decomposition of the outer automorphism group of its fundamental group
(vertex-relative pieces, Dehn-twist kernels, free-product kernels), and
decides whether that group is finite, emitting witness automorphisms with
verifiable growth certificates when it is infinite.
"""

from .config import BoundExceeded, InvalidInput, Limits, WitnessSearchFailed
from .fingrp import FiniteGroup, GroupMap, SubgroupHandle, group_from_permutations
from .gog import GraphOfGroups, PathWord

__all__ = [
    "BoundExceeded",
    "InvalidInput",
    "Limits",
    "WitnessSearchFailed",
    "FiniteGroup",
    "GroupMap",
    "SubgroupHandle",
    "group_from_permutations",
    "GraphOfGroups",
    "PathWord",
]
