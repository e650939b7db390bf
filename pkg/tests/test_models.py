import math
from functools import reduce

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cgploc.models import (
    AndersonParams,
    LloydParams,
    XXXParams,
    build,
    build_anderson,
    build_lloyd,
    build_xxx,
    chain_hamiltonian,
    hilbert_dim,
    hopping_matrix,
    rebuild,
    transverse_field_operator,
    xxx_hamiltonian,
)
from cgploc.rng import RngStream, as_generator, open_uniform
from cgploc.spectral import check_nonresonance, eigendecompose

SX = np.array([[0.0, 1.0], [1.0, 0.0]])
SY = np.array([[0.0, -1j], [1j, 0.0]])
SZ = np.diag([1.0, -1.0])  # basis state 0 carries sigma^z = +1


def site_op(op, i, L):
    # site 0 is the least significant bit, i.e. the rightmost Kronecker factor
    factors = [op if L - 1 - k == i else np.eye(2) for k in range(L)]
    return reduce(np.kron, factors)


def kron_xxx(L, hx, w, periodic=True):
    bonds = [(i, (i + 1) % L) for i in range(L)] if periodic else [(i, i + 1) for i in range(L - 1)]
    h = np.zeros((2**L, 2**L), dtype=complex)
    for i, j in bonds:
        for s in (SX, SY, SZ):
            h += 0.5 * site_op(s, i, L) @ site_op(s, j, L)
    for i in range(L):
        h += w[i] * site_op(SZ, i, L) + hx * site_op(SX, i, L)
    assert np.max(np.abs(h.imag)) == 0
    return h.real


@pytest.mark.parametrize("L", [2, 3, 4])
@pytest.mark.parametrize("periodic", [True, False])
def test_xxx_matches_kronecker_oracle(L, periodic):
    gen = np.random.default_rng(L)
    for _ in range(3):
        w = gen.uniform(-2, 2, L)
        hx = gen.uniform(0, 1)
        np.testing.assert_allclose(xxx_hamiltonian(L, hx, w, periodic), kron_xxx(L, hx, w, periodic), atol=1e-14)


def test_two_site_ring_double_counts_bond():
    e = eigendecompose(xxx_hamiltonian(2, 0.0, np.zeros(2))).eigenvalues
    np.testing.assert_allclose(e, [-3, 1, 1, 1], atol=1e-14)


def test_xxx_conserves_magnetization_without_field():
    L = 5
    h = xxx_hamiltonian(L, 0.0, np.random.default_rng(0).uniform(-1, 1, L))
    mz = sum(site_op(SZ, i, L) for i in range(L))
    np.testing.assert_allclose(h @ mz - mz @ h, 0, atol=1e-13)


def test_transverse_field_operator_is_sum_of_sigma_x():
    L = 3
    np.testing.assert_array_equal(transverse_field_operator(L), sum(site_op(SX, i, L) for i in range(L)))


def test_xxx_nonresonant_at_reference_point():
    h, _ = build_xxx(XXXParams(8, 0.3, 0.4), RngStream(42, 0))
    ok, violations = check_nonresonance(eigendecompose(h), tol=1e-10)
    assert ok, violations[:3]


def test_anderson_clean_spectra():
    np.testing.assert_allclose(
        eigendecompose(build_anderson(AndersonParams(4, 0.0), 0)[0]).eigenvalues, [-2, 0, 0, 2], atol=1e-14
    )
    h, _ = build_anderson(AndersonParams(3, 0.0, periodic=False), 0)
    np.testing.assert_allclose(eigendecompose(h).eigenvalues, [-math.sqrt(2), 0, math.sqrt(2)], atol=1e-14)
    L = 9
    expected = np.sort(-2 * np.cos(2 * np.pi * np.arange(L) / L))
    np.testing.assert_allclose(eigendecompose(hopping_matrix(L)).eigenvalues, expected, atol=1e-13)


@given(st.integers(3, 40), st.floats(0, 20), st.integers(0, 2**63))
def test_anderson_structure(L, W, seed):
    h, rec = build_anderson(AndersonParams(L, W), RngStream(seed, 3))
    assert np.array_equal(h, h.T)
    assert np.all(np.abs(np.diag(h)) <= W)
    off = h - np.diag(np.diag(h))
    assert np.all(off[np.abs(off) > 0] == -1.0)
    assert np.count_nonzero(off) == 2 * L
    np.testing.assert_array_equal(np.diag(h), rec.fields)
    assert (rec.master_seed, rec.stream_index) == (seed, 3)


def test_lloyd_cauchy_statistics():
    gen = np.random.default_rng(5)
    eps = np.concatenate([build_lloyd(LloydParams(1000, 1.5), gen)[1].fields for _ in range(100)])
    n = eps.size
    # median of a symmetric law; its standard error is pi * Gamma / (2 sqrt(n))
    assert abs(np.median(eps)) <= 3 * math.pi * 1.5 / (2 * math.sqrt(n))
    frac = np.mean(np.abs(eps) <= 1.5)
    assert abs(frac - 0.5) <= 3 * math.sqrt(0.25 / n)


def test_lloyd_small_gamma_recovers_clean_spectrum():
    h, _ = build_lloyd(LloydParams(12, 1e-12), 3)
    clean = eigendecompose(hopping_matrix(12)).eigenvalues
    np.testing.assert_allclose(eigendecompose(h).eigenvalues, clean, atol=1e-8)


@pytest.mark.parametrize("model,L,disorder", [("anderson", 16, 2.0), ("lloyd", 16, 0.5), ("xxx", 6, 3.7)])
def test_replay_is_bit_identical(model, L, disorder):
    stream = RngStream(123, 77)
    h1, rec = build(model, L, disorder, stream, hx=0.3)
    h2, _ = build(model, L, disorder, RngStream(123, 77), hx=0.3)
    np.testing.assert_array_equal(h1, h2)
    np.testing.assert_array_equal(rebuild(rec), h1)
    h3, _ = build(model, L, disorder, RngStream(123, 78), hx=0.3)
    assert not np.array_equal(h1, h3)


def test_param_validation():
    with pytest.raises(ValueError):
        AndersonParams(2, 1.0)
    with pytest.raises(ValueError):
        AndersonParams(4, -1.0)
    with pytest.raises(ValueError):
        LloydParams(4, 0.0)
    with pytest.raises(ValueError):
        XXXParams(15, 0.3, 1.0)
    with pytest.raises(ValueError):
        XXXParams(1, 0.3, 1.0)
    with pytest.raises(ValueError):
        build("ising", 4, 1.0, 0)
    assert XXXParams(10, 0.3, 1.0).dim == 1024
    assert hilbert_dim("xxx", 10) == 1024 and hilbert_dim("anderson", 10) == 10


def test_chain_hamiltonian_open_boundary():
    h = chain_hamiltonian([1.0, 2.0, 3.0], periodic=False)
    np.testing.assert_array_equal(h, [[1, -1, 0], [-1, 2, -1], [0, -1, 3]])


def test_rng_streams():
    a = RngStream(42, 0).generator().random(5)
    np.testing.assert_array_equal(a, RngStream(42, 0).generator().random(5))
    assert not np.array_equal(a, RngStream(42, 1).generator().random(5))
    assert not np.array_equal(a, RngStream(43, 0).generator().random(5))
    assert RngStream(42, 0).child(9) == RngStream(42, 9)
    with pytest.raises(ValueError):
        RngStream(-1, 0)
    with pytest.raises(TypeError):
        as_generator("seed")
    u = open_uniform(np.random.default_rng(0), 100_000)
    assert u.min() > 0 and u.max() < 1


def test_independent_streams_uncorrelated():
    a = np.array([RngStream(7, i).generator().random() for i in range(4000)])
    b = np.array([RngStream(7, i).generator().random(2)[1] for i in range(4000)])
    assert abs(np.corrcoef(a[:-1], a[1:])[0, 1]) < 0.06
    assert abs(np.corrcoef(a, b)[0, 1]) < 0.06
