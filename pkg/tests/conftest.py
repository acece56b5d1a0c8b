"""Shared fixtures and independent reference computations.

The helpers here deliberately avoid the library's vectorized paths: brute
pushforwards run scalar loops over full tuple spaces, conjugacy classes
are built by direct orbit partition, and the symmetric-group action on
alternating-group pairs is recomputed from one-line permutations.  They
exist so the fast implementations always have a slow, obviously-correct
counterpart to be compared against.
"""

import itertools

import numpy as np
import pytest
from hypothesis import settings

from wordlab.groups import PermutationGroup, construct_group
from wordlab.words import Word, evaluate_indices

settings.register_profile("suite", deadline=None, derandomize=True, max_examples=60)
settings.load_profile("suite")

CATALOG = (
    "cyclic:2", "cyclic:4", "cyclic:6", "dihedral:4",
    "symmetric:3", "symmetric:4", "alternating:4", "alternating:5",
    "alternating:6", "sl2:5", "sl2:7", "psl2:7", "psl2:11", "psl2:13",
)

_GROUP_CACHE = {}


def get_group(spec: str):
    if spec not in _GROUP_CACHE:
        _GROUP_CACHE[spec] = construct_group(spec)
    return _GROUP_CACHE[spec]


@pytest.fixture(scope="session")
def a5():
    return get_group("alternating:5")


@pytest.fixture(scope="session")
def s3():
    return get_group("symmetric:3")


@pytest.fixture(scope="session")
def s4():
    return get_group("symmetric:4")


def brute_pushforward(word: Word, group) -> np.ndarray:
    """Scalar enumeration of the word map over the full tuple space."""
    counts = np.zeros(group.order, dtype=np.int64)
    for tup in itertools.product(range(group.order), repeat=word.rank):
        counts[evaluate_indices(word, group, tup)] += 1
    return counts


def conjugacy_classes(group) -> list:
    """Partition of element indices into conjugacy classes (orbit walk)."""
    n = group.order
    mul, inv = group.mul, group.inv
    seen = [False] * n
    classes = []
    for start in range(n):
        if seen[start]:
            continue
        orbit = {start}
        frontier = [start]
        while frontier:
            x = frontier.pop()
            for g in range(n):
                y = mul(mul(g, x), inv(g))
                if y not in orbit:
                    orbit.add(y)
                    frontier.append(y)
        for x in orbit:
            seen[x] = True
        classes.append(frozenset(orbit))
    return classes


def s5_conjugation_maps(alt5: PermutationGroup) -> list:
    """Index maps of Aut(A5) = S5 acting on A5 by conjugation.

    Each map sends the index of x to the index of s x s^-1, for one s in
    S5 (one-line tuples over 0..4).
    """
    maps = []
    for s in itertools.permutations(range(5)):
        s_inv = [0] * 5
        for i, v in enumerate(s):
            s_inv[v] = i
        table = []
        for idx in range(alt5.order):
            x = alt5.carrier[idx]
            conj = tuple(s[x[s_inv[i]]] for i in range(5))
            table.append(alt5.index_of_perm(conj))
        maps.append(tuple(table))
    return maps
