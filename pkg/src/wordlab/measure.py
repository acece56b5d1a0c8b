"""Pushforward distributions of word maps and their distance to uniform.

For a word w of rank d and a finite group G, the word map sends a tuple in
G^d to its substitution product.  `exact_distribution` enumerates the full
pushforward of the uniform measure on G^d; `monte_carlo_distribution`
estimates it from uniform samples.  Both return integer counts, so the L1
distance to uniform is a Fraction in exact mode.

The L1 distance used everywhere is sum_g |P(g) - 1/|G||, which ranges over
[0, 2] and is twice the total-variation distance.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .errors import (
    BudgetExceededError,
    EmptyWordError,
    UnsupportedParameterError,
    WordlabError,
)
from .groups import Group, GroupSpec, construct_group, vector_multiplier
from .rng import Rng, as_rng, stream
from .words import Word, abelianize, bezout_certificate, evaluate_indices, gcd_of_vector

# Total tuple count |G|^d an exact enumeration may cover.
TUPLE_BUDGET = 10**8
# Samples processed per vectorized batch.
BATCH = 1 << 16


@dataclass
class Distribution:
    """Integer counts over a group carrier; total = |G|^d or the sample count.

    Word-map counts fit numpy int64 (bounded by the tuple budget); exact
    walk laws carry python big integers in a plain list.  Both shapes are
    accepted everywhere distances are computed.
    """

    group: Group
    counts: Union[np.ndarray, list]
    total: int
    mode: str  # "exact" | "sampled"
    d: int
    label: str = ""

    def probability(self, index: int) -> Fraction:
        return Fraction(int(self.counts[index]), self.total)

    def support(self) -> list:
        if isinstance(self.counts, np.ndarray):
            return [int(i) for i in np.flatnonzero(self.counts)]
        return [i for i, c in enumerate(self.counts) if c]

    def __post_init__(self):
        if self.mode not in ("exact", "sampled"):
            raise UnsupportedParameterError(f"bad distribution mode {self.mode!r}")


def _vector_mul(group: Group):
    """Best available elementwise multiplier on index arrays, or None."""
    return vector_multiplier(group)


def _check_budget(group: Group, d: int) -> int:
    total = group.order**d
    if total > TUPLE_BUDGET:
        raise BudgetExceededError(
            f"{group.name}^{d} has {total} tuples, over the {TUPLE_BUDGET} budget"
        )
    return total


def exact_distribution(word: Word, group: Group) -> Distribution:
    """Full pushforward of the uniform measure on G^d under the word map.

    Only the generators that actually occur in the word are enumerated;
    the remaining coordinates contribute an exact multiplicity factor.
    """
    d = word.rank
    total = _check_budget(group, d)
    n = group.order
    support = sorted({abs(v) for v in word.letters})
    k = len(support)
    if k == 0:
        counts = np.zeros(n, dtype=np.int64)
        counts[group.identity] = total
    else:
        remap = {g: i + 1 for i, g in enumerate(support)}
        letters = [remap[abs(v)] * (1 if v > 0 else -1) for v in word.letters]
        counts = _enumerate_pushforward(letters, k, group) * (n ** (d - k))
    return Distribution(group=group, counts=counts, total=total, mode="exact",
                        d=d, label=word.to_text())


def _enumerate_pushforward(letters: Sequence[int], k: int, group: Group) -> np.ndarray:
    """Counts over G for a word using exactly generators 1..k, total |G|^k.

    The last coordinate is kept as a vector over the whole carrier; the
    first k-1 coordinates are enumerated in an outer product loop.
    """
    n = group.order
    mul_vec = _vector_mul(group)
    if mul_vec is None:
        word = Word(k, tuple(letters))
        counts = np.zeros(n, dtype=np.int64)
        for tup in itertools.product(range(n), repeat=k):
            counts[evaluate_indices(word, group, tup)] += 1
        return counts
    inv_arr = group.inv_array()
    column = np.arange(n, dtype=np.int64)
    column_inv = inv_arr.astype(np.int64)
    counts = np.zeros(n, dtype=np.int64)
    mul, inv = group.mul, group.inv
    for outer in itertools.product(range(n), repeat=k - 1):
        scalar = group.identity
        vec = None
        for v in letters:
            a = abs(v)
            if a == k:
                col = column if v > 0 else column_inv
                vec = mul_vec(scalar, col) if vec is None else mul_vec(vec, col)
            else:
                x = outer[a - 1] if v > 0 else inv(outer[a - 1])
                if vec is None:
                    scalar = mul(scalar, x)
                else:
                    vec = mul_vec(vec, x)
        counts += np.bincount(vec, minlength=n)
    return counts


def monte_carlo_distribution(word: Word, group: Group, samples: int,
                             rng: Union[Rng, int]) -> Distribution:
    """Empirical pushforward from uniform tuples; deterministic per rng stream."""
    if samples < 1:
        raise UnsupportedParameterError(f"samples must be >= 1, got {samples}")
    rng = as_rng(rng)
    n = group.order
    support = sorted({abs(v) for v in word.letters})
    counts = np.zeros(n, dtype=np.int64)
    if not support:
        counts[group.identity] = samples
        return Distribution(group=group, counts=counts, total=samples, mode="sampled",
                            d=word.rank, label=word.to_text())
    mul_vec = _vector_mul(group)
    inv_arr = group.inv_array().astype(np.int64)
    done = 0
    while done < samples:
        b = min(BATCH, samples - done)
        draws = {g: rng.integers(0, n, size=b) for g in support}
        if mul_vec is None:
            tup = [0] * word.rank
            for i in range(b):
                for g in support:
                    tup[g - 1] = int(draws[g][i])
                counts[evaluate_indices(word, group, tup)] += 1
        else:
            state = None
            for v in word.letters:
                col = draws[abs(v)]
                if v < 0:
                    col = inv_arr[col]
                state = col if state is None else mul_vec(state, col)
            counts += np.bincount(state, minlength=n)
        done += b
    return Distribution(group=group, counts=counts, total=samples, mode="sampled",
                        d=word.rank, label=word.to_text())


# ---------------------------------------------------------------------------
# Distances
# ---------------------------------------------------------------------------


def l1_uniform_distance(dist: Distribution) -> Union[Fraction, float]:
    """sum_g |P(g) - 1/|G||; Fraction in exact mode, float in sampled mode."""
    n = dist.group.order
    if isinstance(dist.counts, np.ndarray):
        s = int(np.abs(dist.counts.astype(np.int64) * n - dist.total).sum())
    else:
        s = sum(abs(c * n - dist.total) for c in dist.counts)
    if dist.mode == "exact":
        return Fraction(s, dist.total * n)
    return s / (dist.total * n)


def _count_list(dist: Distribution) -> list:
    if isinstance(dist.counts, np.ndarray):
        return [int(c) for c in dist.counts]
    return dist.counts


def l1_distance(a: Distribution, b: Distribution) -> Union[Fraction, float]:
    """sum_g |P_a(g) - P_b(g)| between two laws on the same carrier."""
    if a.group.order != b.group.order:
        raise UnsupportedParameterError("distributions live on different carriers")
    if isinstance(a.counts, np.ndarray) and isinstance(b.counts, np.ndarray):
        prod = a.counts.astype(object) * b.total - b.counts.astype(object) * a.total
        s = int(sum(abs(v) for v in prod))
    else:
        s = sum(abs(ca * b.total - cb * a.total) for ca, cb in zip(_count_list(a), _count_list(b)))
    if a.mode == "exact" and b.mode == "exact":
        return Fraction(s, a.total * b.total)
    return s / (a.total * b.total)


# ---------------------------------------------------------------------------
# Image and power coverage
# ---------------------------------------------------------------------------


@dataclass
class ImageReport:
    """Word-map image versus the set of m-th powers."""

    group_name: str
    word_text: str
    mode: str
    m: int
    image: frozenset
    power_values: frozenset
    covers_powers: bool
    witness: Optional[int]  # image element that is not an m-th power
    certificate_values: Optional[frozenset]  # sampled mode: {g^m} hit by evaluation


def _certified_powers(word: Word, group: Group, coeffs: Sequence[int]) -> set:
    """Evaluate the word at (g^b1, ..., g^bd) for every g.

    By the gcd certificate these values are exactly the m-th powers; they
    are computed by genuine evaluation, not by powering, so they certify
    that the word map itself attains them.
    """
    n = group.order
    cols = {}
    for i, bi in enumerate(coeffs, start=1):
        cols[i] = np.array([group.pow(g, bi) for g in range(n)], dtype=np.int64)
    mul_vec = _vector_mul(group)
    if mul_vec is None:
        out = set()
        for g in range(n):
            tup = [int(cols[i][g]) for i in range(1, word.rank + 1)]
            out.add(evaluate_indices(word, group, tup))
        return out
    inv_arr = group.inv_array().astype(np.int64)
    state = None
    for v in word.letters:
        col = cols[abs(v)]
        if v < 0:
            col = inv_arr[col]
        state = col if state is None else mul_vec(state, col)
    if state is None:
        return {group.identity}
    return {int(x) for x in np.unique(state)}


def image_and_power_coverage(word: Word, group: Group, mode: str = "exact",
                             m: Optional[int] = None, samples: Optional[int] = None,
                             rng: Optional[Union[Rng, int]] = None) -> ImageReport:
    """Compare the word-map image with the set of m-th powers.

    m defaults to the gcd of the exponent-sum vector and must be passed
    explicitly when that gcd is zero.  In sampled mode the image is the
    union of sampled values and the certificate values, so it is always a
    subset of the true image.
    """
    vec = abelianize(word)
    gamma = gcd_of_vector(vec)
    if m is None:
        if gamma == 0:
            raise EmptyWordError(
                "exponent-sum vector is zero; pass the target power m explicitly"
            )
        m = gamma
    certificate = None
    if mode == "exact":
        dist = exact_distribution(word, group)
        image = {int(i) for i in np.flatnonzero(dist.counts)}
    elif mode == "sampled":
        if samples is None or rng is None:
            raise UnsupportedParameterError("sampled mode needs samples and rng")
        dist = monte_carlo_distribution(word, group, samples, rng)
        image = {int(i) for i in np.flatnonzero(dist.counts)}
        if gamma > 0:
            _, coeffs = bezout_certificate(vec)
            certificate = frozenset(_certified_powers(word, group, coeffs))
            image |= certificate
    else:
        raise UnsupportedParameterError(f"bad mode {mode!r}")
    powers = frozenset(group.pow(g, m) for g in range(group.order))
    image = frozenset(image)
    covers = powers <= image
    witness = min((x for x in image if x not in powers), default=None)
    return ImageReport(group_name=group.name, word_text=word.to_text(), mode=mode,
                       m=m, image=image, power_values=powers, covers_powers=covers,
                       witness=witness, certificate_values=certificate)


# ---------------------------------------------------------------------------
# Trends across a family of groups
# ---------------------------------------------------------------------------


@dataclass
class TrendRow:
    spec: str
    order: Optional[int]
    distance: Optional[Union[Fraction, float]]
    mode: str
    error: Optional[str] = None


def family_trend(word: Word, specs: Sequence[Union[GroupSpec, str]], mode: str = "exact",
                 samples: int = 10_000, seed: int = 0) -> list:
    """Distance to uniform for one word across several groups.

    Rows come back ordered by group order; per-group failures are recorded
    in the row instead of aborting the sweep.
    """
    rows = []
    for idx, spec in enumerate(specs):
        spec_text = str(spec)
        try:
            group = construct_group(spec)
        except WordlabError as exc:
            rows.append(TrendRow(spec=spec_text, order=None, distance=None,
                                 mode=mode, error=f"{type(exc).__name__}: {exc}"))
            continue
        try:
            if mode == "exact":
                dist = exact_distribution(word, group)
            elif mode == "sampled":
                dist = monte_carlo_distribution(word, group, samples, stream(seed, idx))
            else:
                raise UnsupportedParameterError(f"bad mode {mode!r}")
            rows.append(TrendRow(spec=spec_text, order=group.order,
                                 distance=l1_uniform_distance(dist), mode=mode))
        except WordlabError as exc:
            rows.append(TrendRow(spec=spec_text, order=group.order, distance=None,
                                 mode=mode, error=f"{type(exc).__name__}: {exc}"))
    rows.sort(key=lambda r: (r.order is None, r.order or 0, r.spec))
    return rows


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------


def write_distribution_csv(dist: Distribution, path: Union[str, Path]) -> None:
    """Write counts as CSV with a small commented header."""
    path = Path(path)
    lines = [
        f"# group={dist.group.name}",
        f"# label={dist.label}",
        f"# mode={dist.mode}",
        f"# d={dist.d}",
        f"# total={dist.total}",
        "element_index,count,probability",
    ]
    total = dist.total
    for i, c in enumerate(dist.counts):
        lines.append(f"{i},{int(c)},{int(c) / total!r}")
    path.write_text("\n".join(lines) + "\n")
