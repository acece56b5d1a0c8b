"""Generating tuples, generation of direct powers, and lifting generators.

For a finite group G the ordered d-tuples whose entries generate G can be
counted exactly by a prefix walk over the subgroup lattice: the count of
extensions of a prefix depends only on the subgroup the prefix generates,
so the recursion memoizes on (depth, subgroup).  For the simple groups in
the catalog, Aut(G) permutes generating tuples freely, so the number of
orbits is the tuple count divided by |Aut(G)|; that orbit count is exactly
the largest N for which the direct power G^N is generated by d elements.

Direct checks on G^N work with explicit tuples: N tuples of d entries each
combine into d diagonal steps of G^N, and a closure run decides generation
outright (capped so the carrier stays enumerable).

`lift_generators` pulls a generating tuple of a central quotient back to
the parent group; when the parent is perfect, lifts of generators are
guaranteed to generate, so a verification failure signals a bug rather
than bad input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

from .errors import (
    BudgetExceededError,
    GroupMismatchError,
    LiftVerificationError,
    NotInCatalogError,
    NotPerfectError,
    UnsupportedParameterError,
    WordlabError,
)
from .groups import (
    CayleyGroup,
    DirectPowerGroup,
    Element,
    Group,
    _as_indices,
    center,
    closure,
    is_perfect,
)

# Orders of the automorphism groups of the simple groups in the catalog.
AUT_ORDERS = {
    ("alternating", 5): 120,
    ("alternating", 6): 1440,
    ("psl2", 7): 336,
    ("psl2", 11): 1320,
    ("psl2", 13): 2184,
}

# Largest |G|**d an exact generating-tuple count may cover.
GENERATION_TUPLE_BUDGET = 10**8
# Largest |G|**N for which direct powers are handled by explicit closure.
POWER_CLOSURE_CAP = 10**7


def is_generating(group: Group, elements: Sequence[Union[Element, int]]) -> bool:
    """True when the given elements generate the whole group."""
    idx = _as_indices(group, elements)
    if not idx:
        return group.order == 1
    return len(closure(group, idx)) == group.order


def count_generating_tuples(group: Group, d: int) -> int:
    """Number of ordered d-tuples of elements that generate the group.

    Walks prefixes depth-first; the number of completions depends only on
    the subgroup generated so far, so results are memoized per (depth,
    subgroup).  Transition closures are memoized too, keyed by (subgroup,
    adjoined element).  Cost scales with the subgroup lattice, not with
    |G|**d, but the raw tuple budget is still enforced up front.
    """
    if d < 0:
        raise UnsupportedParameterError("tuple length must be nonnegative")
    n = group.order
    if n**d > GENERATION_TUPLE_BUDGET:
        raise BudgetExceededError(
            f"{group.name}: |G|^{d} = {n**d} exceeds budget {GENERATION_TUPLE_BUDGET}"
        )
    if d == 0:
        return 1 if n == 1 else 0

    trivial = frozenset({group.identity})
    # Registry of seen subgroups: frozenset -> short generator list.
    gens_of = {trivial: ()}
    # (subgroup, adjoined element) -> resulting subgroup.
    step_cache = {}
    # (depth, subgroup) -> number of generating completions.
    count_cache = {}

    def adjoin(sub: frozenset, g: int) -> frozenset:
        if g in sub:
            return sub
        key = (sub, g)
        got = step_cache.get(key)
        if got is None:
            new_gens = gens_of[sub] + (g,)
            got = closure(group, new_gens)
            step_cache[key] = got
            if got not in gens_of:
                gens_of[got] = new_gens
        return got

    def completions(depth: int, sub: frozenset) -> int:
        if len(sub) == n:
            return n ** (d - depth)
        if depth == d:
            return 0
        key = (depth, sub)
        got = count_cache.get(key)
        if got is None:
            got = sum(completions(depth + 1, adjoin(sub, g)) for g in range(n))
            count_cache[key] = got
        return got

    return completions(0, trivial)


@dataclass(frozen=True)
class HallReport:
    """Exact count data behind the largest d-generated power of a group.

    `max_power` is the number of Aut-orbits of generating d-tuples: the
    direct power G^N is d-generated exactly when N <= max_power.  The
    crude `sqrt_bound` = floor(2*sqrt(|G|)) must never exceed it for the
    catalog groups with d = 2; `consistent` records that comparison.
    """

    group_name: str
    order: int
    d: int
    tuple_count: int
    aut_order: int
    max_power: int
    sqrt_bound: int
    consistent: bool


def hall_max_power(group: Group, d: int = 2) -> HallReport:
    """Largest N with G^N generated by d elements, for catalog simple groups.

    Aut(G) acts freely on generating tuples (an automorphism fixing a
    generating tuple fixes every element), so the orbit count is an exact
    division; a nonzero remainder would mean the automorphism order or the
    tuple count is wrong and raises.
    """
    spec = getattr(group, "spec", None)
    key = (spec.kind, spec.parameter) if spec is not None else None
    aut_order = AUT_ORDERS.get(key)
    if aut_order is None:
        raise NotInCatalogError(
            f"no automorphism-order record for {group.name}; known: "
            + ", ".join(f"{k}:{p}" for k, p in sorted(AUT_ORDERS))
        )
    tuple_count = count_generating_tuples(group, d)
    if tuple_count % aut_order != 0:
        raise WordlabError(
            f"{group.name}: {tuple_count} generating {d}-tuples not divisible "
            f"by |Aut| = {aut_order}"
        )
    max_power = tuple_count // aut_order
    sqrt_bound = math.isqrt(4 * group.order)
    return HallReport(
        group_name=group.name,
        order=group.order,
        d=d,
        tuple_count=tuple_count,
        aut_order=aut_order,
        max_power=max_power,
        sqrt_bound=sqrt_bound,
        consistent=sqrt_bound <= max_power,
    )


def power_tuple_generates(
    group: Group, tuples: Sequence[Sequence[Union[Element, int]]]
) -> bool:
    """Decide whether N tuples of d elements generate G^N.

    Tuple j supplies coordinate j: the d joint steps are
    (tuples[0][i], ..., tuples[N-1][i]) for i < d, and generation is
    decided by explicit closure on the direct power.
    """
    if not tuples:
        raise UnsupportedParameterError("need at least one tuple")
    rows = [_as_indices(group, t) for t in tuples]
    d = len(rows[0])
    if d == 0:
        raise UnsupportedParameterError("tuples must be nonempty")
    for r in rows:
        if len(r) != d:
            raise UnsupportedParameterError(
                f"tuple length {len(r)} differs from first tuple length {d}"
            )
    copies = len(rows)
    if group.order**copies > POWER_CLOSURE_CAP:
        raise BudgetExceededError(
            f"{group.name}^{copies}: {group.order**copies} states exceed "
            f"cap {POWER_CLOSURE_CAP}"
        )
    power = DirectPowerGroup(group, copies)
    steps = [power.join(tuple(r[i] for r in rows)) for i in range(d)]
    return len(closure(power, steps)) == power.order


def lift_generators(
    group: Group, quotient_tuple: Sequence[Element]
) -> tuple:
    """Pull a tuple of central-quotient elements back to the parent group.

    Each coset is lifted to its minimal parent index.  The parent must be
    perfect and the quotient must be one of its central quotients (built
    by `quotient_group`, carrying `.projection` and `.parent`).  When the
    input generates the quotient, the lift is guaranteed to generate the
    parent, so a failed check raises LiftVerificationError; when the input
    does not generate the quotient, the lift is returned as is and the
    caller's `is_generating` will report False.
    """
    if not quotient_tuple:
        raise UnsupportedParameterError("need at least one element to lift")
    if not is_perfect(group):
        raise NotPerfectError(f"{group.name} is not perfect; lifting not supported")
    quotient = quotient_tuple[0].group
    if not isinstance(quotient, CayleyGroup) or quotient.projection is None:
        raise GroupMismatchError("tuple elements do not belong to a quotient group")
    parent = quotient.parent
    if parent is not group and (parent is None or parent.name != group.name):
        raise GroupMismatchError(
            f"quotient {quotient.name} was not built from {group.name}"
        )
    for q in quotient_tuple:
        if q.group is not quotient and q.group.name != quotient.name:
            raise GroupMismatchError("tuple elements belong to different groups")
    proj = quotient.projection
    kernel = [g for g in range(group.order) if proj[g] == quotient.identity]
    central = center(group)
    if not set(kernel) <= central:
        raise GroupMismatchError(
            f"kernel of {quotient.name} is not central in {group.name}"
        )
    lifted = []
    for q in quotient_tuple:
        target = q.index
        rep = min(g for g in range(group.order) if proj[g] == target)
        lifted.append(group.element(rep))
    if is_generating(quotient, [q.index for q in quotient_tuple]):
        if not is_generating(group, [e.index for e in lifted]):
            raise LiftVerificationError(
                f"lift of a generating tuple fails to generate {group.name}; "
                "this contradicts the central-quotient lifting theorem"
            )
    return tuple(lifted)
