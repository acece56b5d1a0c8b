"""Random walks on finite groups driven by a finite step set.

A walk starts at the identity and multiplies one step per tick on the
right, each step drawn independently from a fixed weighted set.  The
module computes the exact law after n steps by integer convolution,
tracks the L1 distance to uniform step by step, detects the cyclic
obstruction that keeps some generating step sets from ever mixing, and
compares the two natural ways of randomizing a power of a group (one
shared letter sequence across coordinates versus independent walks).

Exact laws are kept as python big integers over the common denominator
D**n, where D is the lcm of the step-weight denominators, so distances
to uniform come out as exact Fractions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .errors import (
    DimensionMismatchError,
    GroupMismatchError,
    NotGeneratingError,
    TooLargeError,
    UnsupportedParameterError,
    WordlabError,
)
from .groups import (
    STRUCTURE_CAP,
    Element,
    Group,
    closure,
    commutator_subgroup,
    quotient_group,
    vector_multiplier,
)
from .measure import Distribution
from .rng import Rng, as_rng, stream

# Largest |G|**copies for which joint statistics are tabulated directly.
JOINT_STATE_CAP = 10**6
# Sample rows processed per vectorized batch.
WALK_BATCH = 1 << 14


def _step_indices(group: Group, steps: Sequence[Union[Element, int]]) -> tuple:
    out = []
    for s in steps:
        if isinstance(s, Element):
            if s.group is not group and s.group.name != group.name:
                raise GroupMismatchError(
                    f"step from {s.group.name}, expected {group.name}"
                )
            out.append(s.index)
        else:
            idx = int(s)
            if not 0 <= idx < group.order:
                raise IndexError(f"step index {idx} out of range for {group.name}")
            out.append(idx)
    return tuple(out)


@dataclass(frozen=True)
class StepSet:
    """A finite weighted step set: distinct element indices plus Fractions.

    Weights must be positive and sum to 1.  `uniform` builds the equal-
    weight set, the common case throughout.
    """

    group: Group
    support: tuple
    weights: tuple

    def __post_init__(self):
        if not self.support:
            raise UnsupportedParameterError("step set must be nonempty")
        if len(set(self.support)) != len(self.support):
            raise UnsupportedParameterError("step set has repeated elements")
        if len(self.weights) != len(self.support):
            raise DimensionMismatchError(
                f"{len(self.weights)} weights for {len(self.support)} steps"
            )
        for w in self.weights:
            if not isinstance(w, Fraction) or w <= 0:
                raise UnsupportedParameterError("weights must be positive Fractions")
        if sum(self.weights) != 1:
            raise UnsupportedParameterError("weights must sum to 1")
        for idx in self.support:
            if not 0 <= idx < self.group.order:
                raise IndexError(
                    f"step index {idx} out of range for {self.group.name}"
                )

    @classmethod
    def uniform(cls, group: Group, steps: Sequence[Union[Element, int]]) -> "StepSet":
        support = _step_indices(group, steps)
        k = len(support)
        if k == 0:
            raise UnsupportedParameterError("step set must be nonempty")
        if len(set(support)) != k:
            raise UnsupportedParameterError("step set has repeated elements")
        return cls(group=group, support=support, weights=tuple([Fraction(1, k)] * k))

    @property
    def size(self) -> int:
        return len(self.support)

    def denominator(self) -> int:
        """lcm of the weight denominators: one tick scales counts by this."""
        return math.lcm(*(w.denominator for w in self.weights))

    def __str__(self) -> str:
        parts = ", ".join(
            f"{self.group.element_repr(s)}:{w}" for s, w in zip(self.support, self.weights)
        )
        return f"steps[{parts}]"


def _step_columns(group: Group, support: Sequence[int]) -> list:
    """For each step g, the column s -> s*g as a plain python list."""
    mul_vec = vector_multiplier(group)
    n = group.order
    if mul_vec is not None:
        everyone = np.arange(n, dtype=np.int64)
        return [
            [int(v) for v in mul_vec(everyone, np.full(n, g, dtype=np.int64))]
            for g in support
        ]
    mul = group.mul
    return [[mul(s, g) for s in range(n)] for g in support]


def _convolve_step(counts: list, columns: list, int_weights: Sequence[int]) -> list:
    """One tick: push each state's count along every step column."""
    new = [0] * len(counts)
    for col, w in zip(columns, int_weights):
        if w == 1:
            for src, c in enumerate(counts):
                if c:
                    new[col[src]] += c
        else:
            for src, c in enumerate(counts):
                if c:
                    new[col[src]] += c * w
    return new


def _check_walk_size(group: Group) -> None:
    if group.order > STRUCTURE_CAP:
        raise TooLargeError(
            f"{group.name}: order {group.order} exceeds exact-walk cap {STRUCTURE_CAP}"
        )


def exact_walk_law(group: Group, steps: StepSet, n: int) -> Distribution:
    """Exact law of the n-step walk, as integer counts over D**n.

    The walk is the product s_1 s_2 ... s_n of independent draws, built by
    n rounds of right-multiplication convolution.
    """
    if steps.group is not group and steps.group.name != group.name:
        raise GroupMismatchError(
            f"step set lives on {steps.group.name}, expected {group.name}"
        )
    if n < 0:
        raise UnsupportedParameterError("step count must be nonnegative")
    _check_walk_size(group)
    D = steps.denominator()
    int_weights = [int(w * D) for w in steps.weights]
    columns = _step_columns(group, steps.support)
    counts = [0] * group.order
    counts[group.identity] = 1
    for _ in range(n):
        counts = _convolve_step(counts, columns, int_weights)
    return Distribution(
        group=group,
        counts=counts,
        total=D**n,
        mode="exact",
        d=1,
        label=f"walk n={n} {steps}",
    )


def mixing_profile(group: Group, steps: StepSet, n_max: int) -> list:
    """Exact L1 distances to uniform after 0, 1, ..., n_max steps."""
    if steps.group is not group and steps.group.name != group.name:
        raise GroupMismatchError(
            f"step set lives on {steps.group.name}, expected {group.name}"
        )
    if n_max < 0:
        raise UnsupportedParameterError("profile length must be nonnegative")
    _check_walk_size(group)
    D = steps.denominator()
    int_weights = [int(w * D) for w in steps.weights]
    columns = _step_columns(group, steps.support)
    order = group.order
    counts = [0] * order
    counts[group.identity] = 1
    total = 1
    profile = []
    for _ in range(n_max + 1):
        s = sum(abs(c * order - total) for c in counts)
        profile.append(Fraction(s, total * order))
        counts = _convolve_step(counts, columns, int_weights)
        total *= D
    return profile


# ---------------------------------------------------------------------------
# Cyclic obstruction to mixing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ObstructionWitness:
    """A surjective label map onto Z/modulus sending every step to 1.

    After n steps the walk sits entirely on the slice labeled n mod
    modulus, so the law misses the other modulus-1 slices forever.  The
    missed uniform mass plus the matching surplus give an L1 distance of
    at least 2*(modulus-1)/modulus, which is at least 1 whenever modulus
    is 2 or more.  `labels[g]` is the residue of element index g.
    """

    group_name: str
    modulus: int
    labels: tuple

    def residue(self, index: int) -> int:
        return self.labels[index]

    def distance_floor(self) -> Fraction:
        """Uniform mass on the slices the n-step law can never touch."""
        return 2 * Fraction(self.modulus - 1, self.modulus)

    def check_homomorphism(self, group: Group, trials: int, rng: Rng) -> bool:
        """Spot-check label(x*y) = label(x) + label(y) on random pairs."""
        if group.order != len(self.labels) or group.name != self.group_name:
            raise GroupMismatchError(
                f"witness for {self.group_name}, got {group.name}"
            )
        gen = as_rng(rng)
        mul = group.mul
        m = self.modulus
        xs = gen.integers(0, group.order, size=trials)
        ys = gen.integers(0, group.order, size=trials)
        for x, y in zip(xs, ys):
            if self.labels[mul(int(x), int(y))] != (self.labels[x] + self.labels[y]) % m:
                return False
        return True


def _discrete_log_labels(quot: Group, generator: int) -> list:
    """dlog table for a cyclic group given a generator, or None if not cyclic."""
    order = quot.order
    dlog = {quot.identity: 0}
    x = generator
    k = 1
    while x != quot.identity:
        dlog[x] = k
        x = quot.mul(x, generator)
        k += 1
    if len(dlog) != order:
        return None
    return [dlog[i] for i in range(order)]


def cyclic_obstruction(group: Group, steps: StepSet) -> Optional[ObstructionWitness]:
    """Detect the parity-style obstruction for a generating step set.

    Requires the steps to generate the group.  Passing to the largest
    abelian quotient A and then quotienting by the subgroup generated by
    the pairwise differences of the step images leaves a cyclic group on
    which every step maps to the same generator.  If that cyclic group is
    trivial the walk can mix; otherwise its order is returned together
    with the label of every group element.
    """
    if steps.group is not group and steps.group.name != group.name:
        raise GroupMismatchError(
            f"step set lives on {steps.group.name}, expected {group.name}"
        )
    _check_walk_size(group)
    generated = closure(group, steps.support)
    if len(generated) != group.order:
        raise NotGeneratingError(
            f"steps generate only {len(generated)} of {group.order} elements of {group.name}"
        )
    comm = commutator_subgroup(group)
    abelian = quotient_group(group, comm, name=f"{group.name}/commutator")
    proj = abelian.projection
    images = [proj[s] for s in steps.support]
    first = images[0]
    inv_first = abelian.inv(first)
    diffs = {abelian.mul(img, inv_first) for img in images[1:]}
    diffs.discard(abelian.identity)
    if diffs:
        drift = closure(abelian, diffs)
    else:
        drift = frozenset({abelian.identity})
    modulus = abelian.order // len(drift)
    if modulus == 1:
        return None
    quot = quotient_group(abelian, drift, name=f"{group.name}/walk-drift")
    sigma = quot.projection[first]
    labels_on_quot = _discrete_log_labels(quot, sigma)
    if labels_on_quot is None:
        raise WordlabError(
            f"{group.name}: step images do not generate the drift quotient"
        )
    labels = tuple(labels_on_quot[quot.projection[proj[g]]] for g in range(group.order))
    for s in steps.support:
        if labels[s] != 1 % modulus:
            raise WordlabError(f"{group.name}: step label is not 1 mod {modulus}")
    return ObstructionWitness(group_name=group.name, modulus=modulus, labels=labels)


# ---------------------------------------------------------------------------
# Shared-letters versus independent-walks comparison on G^copies
# ---------------------------------------------------------------------------


@dataclass
class PowerWalkReport:
    """Sampled comparison of two randomizations of G^copies.

    The word route draws one letter sequence per sample and applies the
    j-th coordinate of each chosen tuple to coordinate j, so coordinates
    share their randomness.  The walk route steps every coordinate with
    its own independent letter sequence.  Marginals must agree; the joint
    laws agree only when the tuples do not lock coordinates together.
    """

    group_name: str
    copies: int
    d: int
    n: int
    samples: int
    word_marginal_counts: np.ndarray  # (copies, |G|)
    walk_marginal_counts: np.ndarray  # (copies, |G|)
    marginal_l1: list  # per coordinate, word route vs walk route
    word_uniform_l1: list  # per coordinate
    walk_uniform_l1: list  # per coordinate
    joint_size: Optional[int] = None
    word_joint_counts: Optional[np.ndarray] = None
    walk_joint_counts: Optional[np.ndarray] = None
    joint_l1: Optional[float] = None
    word_joint_uniform_l1: Optional[float] = None
    walk_joint_uniform_l1: Optional[float] = None

    def max_marginal_l1(self) -> float:
        return max(self.marginal_l1)


def _tuple_matrix(group: Group, tuples: Sequence[Sequence[Union[Element, int]]]):
    """Validate a list of equal-length tuples; return a (copies, d) index array."""
    if not tuples:
        raise DimensionMismatchError("need at least one tuple")
    rows = []
    d = None
    for t in tuples:
        idx = _step_indices(group, tuple(t))
        if d is None:
            d = len(idx)
            if d == 0:
                raise DimensionMismatchError("tuples must be nonempty")
        elif len(idx) != d:
            raise DimensionMismatchError(
                f"tuple length {len(idx)} differs from first tuple length {d}"
            )
        rows.append(idx)
    gen = np.empty((len(rows), d), dtype=np.int64)
    for j, idx in enumerate(rows):
        gen[j, :] = idx
    return gen


def _two_streams(rng: Rng):
    """Two decorrelated generators from one seed or generator."""
    if isinstance(rng, (int, np.integer)):
        return stream(int(rng), 101), stream(int(rng), 102)
    gen = as_rng(rng)
    seeds = gen.integers(0, 2**63, size=2)
    return np.random.default_rng(int(seeds[0])), np.random.default_rng(int(seeds[1]))


def power_walk_equivalence(
    group: Group,
    tuples: Sequence[Sequence[Union[Element, int]]],
    n: int,
    samples: int,
    rng: Rng,
) -> PowerWalkReport:
    """Sample both randomizations of G^copies and tabulate their agreement.

    `tuples` is a list of d-tuples of group elements.  In the word route a
    single letter sequence is drawn per sample and letter i multiplies
    coordinate j by tuples[j][i], so all coordinates share their
    randomness; in the walk route every coordinate draws its own letters.
    Marginal counts, their pairwise L1 discrepancies, and distances to
    uniform are always reported; joint statistics are tabulated when
    |G|**copies fits the cap.
    """
    if n < 0:
        raise UnsupportedParameterError("step count must be nonnegative")
    if samples < 1:
        raise UnsupportedParameterError("need at least one sample")
    # gen_matrix[i, j] = element applied to coordinate j when letter i is drawn.
    gen_matrix = _tuple_matrix(group, tuples).T
    d, copies = gen_matrix.shape
    order = group.order
    mul_vec = vector_multiplier(group)
    if mul_vec is None:
        raise UnsupportedParameterError(
            f"{group.name} exposes no vectorized product for sampling"
        )
    track_joint = order**copies <= JOINT_STATE_CAP

    word_marg = np.zeros((copies, order), dtype=np.int64)
    walk_marg = np.zeros((copies, order), dtype=np.int64)
    if track_joint:
        joint_size = order**copies
        radix = np.array([order**e for e in range(copies - 1, -1, -1)], dtype=np.int64)
        word_joint = np.zeros(joint_size, dtype=np.int64)
        walk_joint = np.zeros(joint_size, dtype=np.int64)

    rng_word, rng_walk = _two_streams(rng)
    done = 0
    while done < samples:
        chunk = min(WALK_BATCH, samples - done)
        # Word route: per tick, one letter per sample shared by all coordinates.
        states = np.zeros((chunk, copies), dtype=np.int64)
        for _ in range(n):
            letters = rng_word.integers(0, d, size=chunk)
            picked = gen_matrix[letters, :]  # (chunk, copies)
            for j in range(copies):
                states[:, j] = mul_vec(states[:, j], picked[:, j])
        for j in range(copies):
            word_marg[j] += np.bincount(states[:, j], minlength=order)
        if track_joint:
            word_joint += np.bincount(states @ radix, minlength=joint_size)
        # Walk route: per tick, an independent letter per coordinate.
        states = np.zeros((chunk, copies), dtype=np.int64)
        for _ in range(n):
            letters = rng_walk.integers(0, d, size=(chunk, copies))
            for j in range(copies):
                states[:, j] = mul_vec(states[:, j], gen_matrix[letters[:, j], j])
        for j in range(copies):
            walk_marg[j] += np.bincount(states[:, j], minlength=order)
        if track_joint:
            walk_joint += np.bincount(states @ radix, minlength=joint_size)
        done += chunk

    def emp_l1(a: np.ndarray, b: np.ndarray) -> float:
        return float(np.abs(a / samples - b / samples).sum())

    def unif_l1(a: np.ndarray) -> float:
        return float(np.abs(a / samples - 1.0 / len(a)).sum())

    marginal_l1 = [emp_l1(word_marg[j], walk_marg[j]) for j in range(copies)]
    word_uniform = [unif_l1(word_marg[j]) for j in range(copies)]
    walk_uniform = [unif_l1(walk_marg[j]) for j in range(copies)]
    report = PowerWalkReport(
        group_name=group.name,
        copies=copies,
        d=d,
        n=n,
        samples=samples,
        word_marginal_counts=word_marg,
        walk_marginal_counts=walk_marg,
        marginal_l1=marginal_l1,
        word_uniform_l1=word_uniform,
        walk_uniform_l1=walk_uniform,
    )
    if track_joint:
        report.joint_size = joint_size
        report.word_joint_counts = word_joint
        report.walk_joint_counts = walk_joint
        report.joint_l1 = emp_l1(word_joint, walk_joint)
        report.word_joint_uniform_l1 = unif_l1(word_joint)
        report.walk_joint_uniform_l1 = unif_l1(walk_joint)
    return report
