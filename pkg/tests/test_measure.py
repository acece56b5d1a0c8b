"""Pushforward distributions: exact vs brute force, sampling, image coverage."""

from fractions import Fraction

import numpy as np
import pytest

from wordlab.errors import BudgetExceededError, EmptyWordError
from wordlab.measure import (
    exact_distribution,
    family_trend,
    image_and_power_coverage,
    l1_distance,
    l1_uniform_distance,
    monte_carlo_distribution,
    write_distribution_csv,
)
from wordlab.rng import stream
from wordlab.words import Word, parse_word

from conftest import brute_pushforward, conjugacy_classes, get_group


@pytest.mark.parametrize("spec,word_text", [
    ("symmetric:3", "x1 x2 X1 X2"),
    ("symmetric:3", "x1 x1 x2"),
    ("cyclic:6", "x1 x1 x2 x2 x2"),
    ("dihedral:4", "x1 x2 x1"),
    ("alternating:4", "x1 x2 X1 X2"),
])
def test_exact_distribution_matches_brute_force(spec, word_text):
    group = get_group(spec)
    word = parse_word(word_text)
    dist = exact_distribution(word, group)
    brute = brute_pushforward(word, group)
    assert dist.total == group.order**word.rank
    assert np.array_equal(np.asarray(dist.counts), brute)


def test_single_letter_word_is_exactly_uniform():
    for spec in ("symmetric:4", "psl2:7", "cyclic:6"):
        group = get_group(spec)
        dist = exact_distribution(parse_word("x1"), group)
        assert l1_uniform_distance(dist) == Fraction(0)


def test_unused_generators_scale_counts():
    group = get_group("symmetric:3")
    w2 = parse_word("x1 x1", rank=2)  # rank 2, uses only x1
    w1 = parse_word("x1 x1", rank=1)
    d2 = exact_distribution(w2, group)
    d1 = exact_distribution(w1, group)
    assert d2.total == group.order**2
    assert np.array_equal(np.asarray(d2.counts), np.asarray(d1.counts) * group.order)
    # distances agree exactly
    assert l1_uniform_distance(d2) == l1_uniform_distance(d1)


def test_squaring_word_on_small_cyclic_group():
    c2 = get_group("cyclic:2")
    dist = exact_distribution(parse_word("x1 x1"), c2)
    # squares in C2 are trivial: point mass at the identity
    assert list(dist.counts) == [2, 0]
    assert l1_uniform_distance(dist) == Fraction(1)


def test_commutator_identity_count_equals_order_times_classes():
    # classical count: #{(x, y): [x, y] = e} = sum_x |C(x)| = |G| * #classes
    for spec in ("symmetric:3", "symmetric:4", "dihedral:4", "alternating:4"):
        group = get_group(spec)
        word = parse_word("x1 x2 X1 X2")
        dist = exact_distribution(word, group)
        classes = conjugacy_classes(group)
        assert int(dist.counts[group.identity]) == group.order * len(classes)


def test_monte_carlo_matches_exact():
    group = get_group("symmetric:4")
    word = parse_word("x1 x1 x2")
    exact = exact_distribution(word, group)
    sampled = monte_carlo_distribution(word, group, 200_000, stream(7))
    gap = l1_distance(exact, sampled)
    # crude bound: expected L1 sampling error ~ sqrt(2 |G| / (pi N))
    assert gap < 4 * np.sqrt(2 * group.order / (np.pi * 200_000))
    again = monte_carlo_distribution(word, group, 200_000, stream(7))
    assert np.array_equal(np.asarray(sampled.counts), np.asarray(again.counts))


def test_budget_enforced_on_full_tuple_space():
    group = get_group("alternating:6")  # order 360
    word = parse_word("x1 x2 x3 x4")  # 360^4 = 1.7e10 > budget
    with pytest.raises(BudgetExceededError):
        exact_distribution(word, group)


def test_image_coverage_exact_mode():
    c4 = get_group("cyclic:4")
    rep = image_and_power_coverage(parse_word("x1 x1"), c4)
    assert rep.m == 2
    assert rep.image == frozenset({0, 2})
    assert rep.power_values == frozenset({0, 2})
    assert rep.covers_powers
    assert rep.witness is None

    s3 = get_group("symmetric:3")
    rep = image_and_power_coverage(parse_word("x1 x1"), s3)
    assert rep.covers_powers  # squares of S3 form the rotation subgroup
    assert rep.image == rep.power_values


def test_image_coverage_sampled_mode_certifies_powers():
    g = get_group("psl2:7")
    word = parse_word("x1 x1 x2 x2")  # gamma = 2
    rep = image_and_power_coverage(word, g, mode="sampled", samples=500, rng=stream(9))
    assert rep.m == 2
    assert rep.covers_powers  # certificate values fill in all m-th powers
    assert rep.certificate_values is not None
    assert rep.certificate_values <= rep.image
    assert rep.power_values <= rep.image


def test_image_coverage_needs_m_for_balanced_words():
    s3 = get_group("symmetric:3")
    with pytest.raises(EmptyWordError):
        image_and_power_coverage(parse_word("x1 x2 X1 X2"), s3)
    rep = image_and_power_coverage(parse_word("x1 x2 X1 X2"), s3, m=1)
    assert rep.m == 1


def test_family_trend_sorts_and_captures_errors():
    word = parse_word("x1 x1", rank=2)  # rank 2: budget is |G|^2
    rows = family_trend(word, ("symmetric:4", "cyclic:2", "symmetric:9", "nosuch:3"))
    specs = [r.spec for r in rows]
    # sorted by order, errors (no order) last
    assert specs[0] == "cyclic:2"
    assert specs[1] == "symmetric:4"
    assert rows[2].error is not None  # symmetric:9 blows the budget at d = 2
    assert rows[3].order is None and rows[3].error is not None
    assert rows[0].distance == Fraction(1)


def test_distribution_csv_output(tmp_path):
    group = get_group("cyclic:4")
    dist = exact_distribution(parse_word("x1 x1"), group)
    path = tmp_path / "dist.csv"
    write_distribution_csv(dist, path)
    lines = path.read_text().splitlines()
    data = [ln for ln in lines if not ln.startswith("#")]
    assert data[0] == "element_index,count,probability"
    assert len(data) == 1 + group.order
