import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.linalg import expm, fractional_matrix_power, logm, sqrtm

from swssb import operators as ops
from swssb.states import random_density_matrix

from conftest import random_unitary


def test_pauli_string_matches_kron_order():
    # site 0 is the rightmost kron factor
    x, z, i2 = ops.PAULI["X"], ops.PAULI["Z"], np.eye(2)
    assert np.allclose(ops.pauli_string(3, {0: "X", 2: "Z"}), np.kron(z, np.kron(i2, x)))
    assert np.allclose(ops.pauli_from_label("ZIX"), np.kron(z, np.kron(i2, x)))


@given(st.integers(2, 4), st.data())
def test_embed_agrees_with_pauli_string(n, data):
    i, j = data.draw(st.lists(st.integers(0, n - 1), min_size=2, max_size=2, unique=True))
    a, b = data.draw(st.sampled_from("XYZ")), data.draw(st.sampled_from("XYZ"))
    local = np.kron(ops.PAULI[b], ops.PAULI[a])  # a on sites[0], b on sites[1]
    assert np.allclose(ops.embed(local, [i, j], n), ops.pauli_string(n, {i: a, j: b}))


def test_n_qubits_rejects_bad_shapes():
    with pytest.raises(ValueError):
        ops.n_qubits_of(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        ops.n_qubits_of(np.zeros((2, 4)))


def test_hermitian_eig_rejects_non_hermitian():
    with pytest.raises(ops.NotHermitianError):
        ops.hermitian_eig(ops.SIGMA_PLUS)


def test_matrix_power_against_scipy():
    rho = random_density_matrix(3, 8, seed=5).matrix
    for a in (0.25, 0.5, 0.8, 1.7):
        ref = fractional_matrix_power(rho, a)
        assert ops.frobenius_rel(ops.matrix_power(rho, a), ref) < 1e-10
    assert ops.frobenius_rel(ops.matrix_power(rho, 0.5), sqrtm(rho)) < 1e-10


def test_matrix_power_rank_deficient_zero_power_is_support_projector():
    rho = np.diag([0.5, 0.5, 0.0, 0.0]).astype(complex)
    assert np.allclose(ops.matrix_power(rho, 0.0), np.diag([1, 1, 0, 0]))
    assert np.allclose(ops.matrix_power(rho, 0.5), np.diag([np.sqrt(0.5)] * 2 + [0, 0]))


def test_matrix_power_rejects_negative_spectrum():
    with pytest.raises(ops.NotPSDError):
        ops.matrix_power(np.diag([1.0, -0.1]).astype(complex), 0.5)


def test_schatten_norms(rng):
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    s = np.linalg.svd(a, compute_uv=False)
    assert ops.schatten_norm(a, 1) == pytest.approx(s.sum(), rel=1e-12)
    assert ops.schatten_norm(a, 2) == pytest.approx(np.linalg.norm(a), rel=1e-12)
    assert ops.schatten_norm(a, np.inf) == pytest.approx(s.max(), rel=1e-12)
    with pytest.raises(ValueError):
        ops.schatten_norm(a, 0.5)


@given(st.integers(1, 3), st.integers(0, 2**31 - 1))
def test_trace_norm_unitary_invariance(n, seed):
    rng = np.random.default_rng(seed)
    d = 1 << n
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    u, v = random_unitary(rng, d), random_unitary(rng, d)
    assert ops.schatten_norm(u @ a @ v, 1) == pytest.approx(ops.schatten_norm(a, 1), rel=1e-10)


def test_matrix_log_and_exp():
    rho = random_density_matrix(2, 4, seed=1).matrix
    assert ops.frobenius_rel(ops.matrix_log(rho), logm(rho)) < 1e-10
    h = ops.pauli_string(2, {0: "X", 1: "Z"})
    assert np.allclose(ops.matrix_exp_hermitian(h, -0.7), expm(-0.7 * h))
    with pytest.raises(ops.RankDeficientError):
        ops.matrix_log(np.diag([1.0, 0.0]).astype(complex))


def test_is_unitary():
    assert ops.is_unitary(ops.PAULI["Y"])
    assert not ops.is_unitary(ops.SIGMA_PLUS)


@given(st.integers(1, 3), st.integers(1, 8), st.floats(0, 2), st.floats(0, 2), st.integers(0, 10**6))
def test_matrix_power_semigroup(n, rank, a, b, seed):
    rho = random_density_matrix(n, min(rank, 2**n), seed).matrix
    lhs = ops.matrix_power(rho, a) @ ops.matrix_power(rho, b)
    assert ops.frobenius_rel(lhs, ops.matrix_power(rho, a + b)) < 1e-10


def test_matrix_power_examples():
    assert np.allclose(ops.matrix_power(np.eye(2) / 2, 0.5), np.eye(2) / np.sqrt(2))
    proj = np.diag([1.0, 0, 0, 0]).astype(complex)
    for a in (0.1, 0.5, 3.0):
        assert np.allclose(ops.matrix_power(proj, a), proj)
    rho = random_density_matrix(3, 8, 2).matrix
    assert np.allclose(ops.matrix_power(rho, 1), rho)


def test_schatten_examples_and_monotonicity(rng):
    assert ops.schatten_norm(np.diag([3.0, 4.0]), 1) == pytest.approx(7)
    assert ops.schatten_norm(np.diag([3.0, 4.0]), 2) == pytest.approx(5)
    assert ops.schatten_norm(random_unitary(rng, 8), np.inf) == pytest.approx(1)
    a = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    vals = [ops.schatten_norm(a, p) for p in np.linspace(1, 12, 20)]
    assert all(x >= y - 1e-12 for x, y in zip(vals, vals[1:]))


@given(st.floats(1.01, 8), st.integers(0, 10**6))
def test_holder(p, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    b = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    q = p / (p - 1)
    assert ops.schatten_norm(a @ b, 1) <= ops.schatten_norm(a, p) * ops.schatten_norm(b, q) * (1 + 1e-12)


@given(st.integers(1, 4), st.data())
def test_pauli_strings_involutory_and_commuting(n, data):
    labels = st.dictionaries(st.integers(0, n - 1), st.sampled_from("XYZ"), min_size=1)
    p = ops.pauli_string(n, data.draw(labels))
    assert np.allclose(p @ p, np.eye(2**n))
    assert ops.is_hermitian(p)
    if n >= 2:
        a = ops.pauli_string(n, {0: data.draw(st.sampled_from("XYZ"))})
        b = ops.pauli_string(n, {n - 1: data.draw(st.sampled_from("XYZ"))})
        assert np.allclose(a @ b, b @ a)
