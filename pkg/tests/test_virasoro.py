"""Virasoro machinery: Gram matrices, matrix elements, block series."""

import math
import warnings
from fractions import Fraction

import numpy as np
import pytest

from conftest import brute_partitions, oracle_gram
from liouville import (DomainError, LiouvilleParams, SingularGram,
                       TailWarning, block_coefficients, block_series,
                       evaluate_block, gram_matrix, kac_degenerate_weight,
                       one_point_matrix_element, orthonormalize,
                       partition_count, partitions_of)
from liouville.virasoro import (Partition, _orthonormalized_diag,
                                _partition_tuples, virasoro_tables)


def _p(gamma):
    return LiouvilleParams(gamma=gamma, mu=1.0)


# ---------------------------------------------------------------------------
# partitions
# ---------------------------------------------------------------------------

def test_partitions_examples():
    assert [p.parts for p in partitions_of(0)] == [()]
    assert [p.parts for p in partitions_of(3)] == [(3,), (2, 1), (1, 1, 1)]
    assert len(partitions_of(6)) == 11
    assert [p.parts for p in partitions_of(7)] == brute_partitions(7)


def test_partition_type():
    p = Partition((3, 1))
    assert p.size == 4 and p.length == 2
    with pytest.raises(DomainError):
        Partition((1, 2))
    with pytest.raises(DomainError):
        Partition((0,))


def test_partition_dimension_matches_count():
    for n in range(9):
        assert len(partitions_of(n)) == partition_count(n)


# ---------------------------------------------------------------------------
# Gram matrices
# ---------------------------------------------------------------------------

def test_gram_level_one():
    g = gram_matrix(1, 0.35 + 0j, 25.0 + 0j)
    assert abs(g.entries[0][0] - 0.7) < 1e-14


def test_gram_level_two_closed_form():
    d, c = Fraction(1, 3), Fraction(11, 2)
    g = gram_matrix(2, d, c)
    assert g.entries == [[4 * d + c / 2, 6 * d], [6 * d, 4 * d * (2 * d + 1)]]


def test_gram_oracle_levels_1_to_4_exact():
    """Exact rational match with the brute-force commutator oracle."""
    d, c = Fraction(7, 3), Fraction(53, 2)
    for n in range(1, 5):
        parts, mat = oracle_gram(n, d, c)
        ours = gram_matrix(n, d, c)
        assert [p.parts for p in ours.partitions] == parts
        assert ours.entries == mat


def test_gram_symmetry_and_dimension(rng):
    for n in (2, 3, 4, 5):
        delta = complex(rng.uniform(0.5, 3), rng.uniform(-1, 1))
        g = gram_matrix(n, delta, 30.0 + 0j).as_array()
        assert g.shape == (partition_count(n),) * 2
        assert np.max(np.abs(g - g.T)) < 1e-9 * np.max(np.abs(g))


def test_gram_hermitian_for_real_delta():
    g = gram_matrix(4, 2.2 + 0j, 38.5 + 0j).as_array()
    assert np.max(np.abs(g.imag)) == 0.0


def test_kac_degeneracy_level_one():
    p = _p(1.3)
    d11 = kac_degenerate_weight(1, 1, p)
    det = gram_matrix(1, d11, complex(p.c_liouville)).determinant()
    assert abs(det) < 1e-10


def test_numeric_tables_match_generic_gram(rng):
    """The fast table path and the generic path agree."""
    p = _p(1.0)
    c = p.c_liouville
    delta = p.weight(complex(p.q_charge, 0.8))
    tab = virasoro_tables(c, 5)
    fast = tab.gram_blocks(delta, levels=range(6))
    for n in range(6):
        slow = gram_matrix(n, complex(delta), complex(c)).as_array()
        assert np.max(np.abs(fast[n] - slow)) <= 1e-9 * max(1, np.max(np.abs(slow)))


# ---------------------------------------------------------------------------
# matrix elements
# ---------------------------------------------------------------------------

def test_matrix_element_normalization():
    assert one_point_matrix_element((), (), 0.7, 1.5, 26.0) == 1.0


def test_matrix_element_level_one():
    # w((1),(1)) = 2 Delta - h + h^2
    for h, d in ((0.0, 0.8), (1.0, 0.8), (0.37, 2.1)):
        got = one_point_matrix_element((1,), (1,), h, d, 26.0)
        assert abs(got - (2 * d - h + h * h)) < 1e-12


def test_matrix_element_orthonormalized_level_one():
    """Raw then orthonormalized at the degenerate insertion weight."""
    p = _p(1.0)
    delta = p.weight(complex(p.q_charge, 1.0))
    raw = block_coefficients(1.0, delta, p.c_liouville, 1)
    assert abs(raw.entry((1,), (1,)) - 2 * delta) < 1e-12  # w = 2 Delta at h=1
    grams = {n: virasoro_tables(p.c_liouville, 1).gram_blocks(delta)[n]
             for n in (0, 1)}
    orth = orthonormalize(raw, grams)
    assert abs(orth.entry((1,), (1,)) - 1.0) < 1e-12
    assert orth.normalization == "orthonormalized_W"
    # level 1: W = w / (2 Delta_spec)
    raw2 = block_coefficients(0.4, delta, p.c_liouville, 1)
    orth2 = orthonormalize(raw2, grams)
    assert abs(orth2.entry((1,), (1,))
               - raw2.entry((1,), (1,)) / (2 * delta)) < 1e-12


def test_degenerate_kronecker_example():
    p = _p(1.0)
    delta = p.weight(complex(p.q_charge, 0.7))
    c = p.c_liouville
    raw = block_coefficients(1.0, delta, c, 4)
    grams = virasoro_tables(c, 4).gram_blocks(delta, levels=range(5))
    orth = orthonormalize(raw, grams)
    assert abs(orth.entry((2,), (1, 1))) < 1e-12
    assert abs(orth.entry((2,), (2,)) - 1.0) < 1e-12
    assert abs(orth.entry((2, 1), (3,))) < 1e-12


def test_identity_insertion_gives_identity():
    """Delta_insert = 0: w = F so W is the identity per level."""
    p = _p(1.4)
    delta = p.weight(complex(p.q_charge, 1.3))
    c = p.c_liouville
    wb, _ = _orthonormalized_diag(0.0, delta, c, 4)
    for n, m in wb.items():
        assert np.max(np.abs(m - np.eye(m.shape[0]))) < 1e-10


def test_singular_gram_raises():
    p = _p(1.3)
    d11 = kac_degenerate_weight(1, 1, p)  # level-1 Gram vanishes here
    raw = block_coefficients(0.5, complex(d11), complex(p.c_liouville), 1)
    with pytest.raises(SingularGram):
        orthonormalize(raw, {0: np.array([[1.0 + 0j]]),
                             1: np.array([[2 * complex(d11)]])})


def test_off_level_matrix_elements_exposed():
    """The chiral matrix element between levels is generically nonzero."""
    got = one_point_matrix_element((2,), (1,), 1.0, 0.9, 26.0)
    assert abs(got - 1.0) < 1e-12  # 2h^2 - h at h = 1
    # while the annulus coefficient tables are level-diagonal
    raw = block_coefficients(1.0, 0.9, 26.0, 2)
    assert raw.entry((2,), (1,)) == 0.0


def test_matrix_element_transpose_symmetry_empirical():
    """nu <-> nut symmetry of the chiral element, levels <= 4 (reported)."""
    worst = 0.0
    for a in range(5):
        for b in range(5):
            for nu in _partition_tuples(a):
                for nt in _partition_tuples(b):
                    m1 = one_point_matrix_element(nu, nt, 0.63, 1.7, 29.0)
                    m2 = one_point_matrix_element(nt, nu, 0.63, 1.7, 29.0)
                    worst = max(worst, abs(m1 - m2))
    assert worst < 1e-9


# ---------------------------------------------------------------------------
# block series
# ---------------------------------------------------------------------------

def test_annulus_1pt_degenerate_coefficients():
    """beta = gamma: coefficient of (q^2)^n equals P(n) for n <= 8."""
    p = _p(1.0)
    s = block_series("annulus_1pt", (p.gamma,), 1.0, p, 8)
    for n in range(9):
        assert abs(s.coefficients[(n, 0)] - partition_count(n)) < 1e-9


def test_annulus_equals_torus_with_q_squared():
    p = _p(1.2)
    s_a = block_series("annulus_1pt", (0.9,), 0.8, p, 6)
    s_t = block_series("torus_1pt", (0.9,), 0.8, p, 6)
    for k in s_a.coefficients:
        assert abs(s_a.coefficients[k] - s_t.coefficients[k]) < 1e-12
    q = 0.37
    va = evaluate_block(s_a, q)
    vt = evaluate_block(s_t, q * q)
    assert abs(va - vt) < 1e-12


def test_annulus_2pt_degenerate_structure():
    """beta1 = beta2 = gamma: delta-coefficients giving sum P(n) q^{2n}."""
    p = _p(1.0)
    s = block_series("annulus_2pt", (1.0, 1.0), 1.0, p, 4)
    for (n, m), cf in s.coefficients.items():
        if n == m:
            assert abs(cf - partition_count(n)) < 1e-9
        else:
            assert cf == 0.0
    v = evaluate_block(s, 0.3, b1b2=np.exp(0.7j))
    expect = sum(partition_count(n) * 0.3 ** (2 * n) for n in range(5))
    assert abs(v - expect) < 1e-9


def test_annulus_2pt_equals_torus_2pt_tables():
    p = _p(1.0)
    s2 = block_series("torus_2pt", (0.8, 1.3), (0.7, 0.7), p, 4)
    s4 = block_series("annulus_2pt", (0.8, 1.3), 0.7, p, 4)
    for k in s2.coefficients:
        assert abs(s2.coefficients[k] - s4.coefficients[k]) < 1e-12


def test_evaluate_block_basics():
    p = _p(1.0)
    s0 = block_series("annulus_1pt", (0.9,), 0.8, p, 0)
    assert abs(evaluate_block(s0, 0.5) - 1.0) < 1e-14  # constant term 1
    s = block_series("annulus_1pt", (0.9,), 0.8, p, 6)
    assert abs(evaluate_block(s, 1e-6) - 1.0) < 1e-10  # q -> 0 limit
    with pytest.raises(DomainError):
        evaluate_block(s, 1.5)


def test_degenerate_block_vs_eta_series():
    """beta=gamma partial sum at q=0.3, N=20 vs the partition series, 1e-10."""
    p = _p(1.0)
    s = block_series("annulus_1pt", (1.0,), 1.0, p, 20)
    got = evaluate_block(s, 0.3)
    expect = sum(partition_count(n) * 0.3 ** (2 * n) for n in range(80))
    assert abs(got - expect) < 1e-10
    # equivalently q^{1/12}/eta(q^2)
    from liouville import dedekind_eta
    assert abs(got - 0.3 ** (1 / 12.0) / dedekind_eta(0.09)) < 1e-10


def test_tail_warning_when_not_contracting():
    p = _p(1.0)
    s = block_series("annulus_1pt", (1.0,), 1.0, p, 12)
    with pytest.warns(TailWarning):
        evaluate_block(s, 0.93)


def test_block_positivity_reported():
    """Level-diagonal orthonormalized W matrices: PSD on the spectrum line."""
    p = _p(1.0)
    delta = p.weight(complex(p.q_charge, 0.9))
    wb, _ = _orthonormalized_diag(p.weight(0.8), delta, p.c_liouville, 5)
    min_eig = min(float(np.min(np.linalg.eigvalsh(m.real))) for m in wb.values())
    # reported, not asserted as a hard contract: record through an assertion
    # with generous floor to catch sign blunders only
    assert min_eig > -1e-8


def test_block_series_validation():
    p = _p(1.0)
    with pytest.raises(DomainError):
        block_series("nonsense", (1.0,), 1.0, p, 4)
    with pytest.raises(DomainError):
        block_series("annulus_1pt", (1.0,), 1.0, p, -1)


def test_json_export_round_trip():
    import json
    p = _p(1.0)
    delta = p.weight(complex(p.q_charge, 0.7))
    raw = block_coefficients(0.8, delta, p.c_liouville, 2)
    d = raw.to_json_dict()
    text = json.dumps(d)
    back = json.loads(text)
    assert back["normalization"] == "raw_w"
    assert back["levels"]["1,1"][0][0][0] == pytest.approx(
        raw.entry((1,), (1,)).real)
