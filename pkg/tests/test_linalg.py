import numpy as np
import pytest

from transposim import (
    DensityMatrix,
    DomainError,
    Ket,
    Operator,
    basis_ket,
    eig_hermitian,
    haar_random_density,
    haar_random_ket,
    identity,
    kron,
    kron_ket,
    outer,
    partial_trace,
    partial_transpose,
    permute_subsystems,
    phase_free_distance,
    swap_operator,
)


def random_hermitian(d, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return Operator((a + a.conj().T) / 2, None)


def test_kron_identity():
    assert np.array_equal(kron(identity((2,)), identity((2,))).mat, np.eye(4))


def test_kron_basis_projectors():
    p = kron(outer(basis_ket(2, 0)), outer(basis_ket(2, 1)))
    assert np.array_equal(p.mat, np.diag([0.0, 1.0, 0.0, 0.0]))


def test_kron_dims_law():
    a = Operator(np.eye(2), (2,))
    b = Operator(np.eye(3), (3,))
    out = kron(a, b)
    assert out.dims == (2, 3)
    assert out.dim == 6


def test_kron_associativity():
    a, b, c = (random_hermitian(2, s) for s in (0, 1, 2))
    left = kron(kron(a, b), c)
    right = kron(a, kron(b, c))
    assert np.abs(left.mat - right.mat).max() < 1e-14


def test_partial_trace_maximally_entangled():
    phi = (kron_ket(basis_ket(2, 0), basis_ket(2, 0)).vec
           + kron_ket(basis_ket(2, 1), basis_ket(2, 1)).vec) / np.sqrt(2)
    red = partial_trace(Operator(np.outer(phi, phi.conj()), (2, 2)), keep=[0])
    assert np.abs(red.mat - np.eye(2) / 2).max() < 1e-14


def test_partial_trace_product_law():
    a = random_hermitian(2, 3)
    b = random_hermitian(3, 4)
    got = partial_trace(kron(a, b), keep=[1])
    assert np.abs(got.mat - np.trace(a.mat) * b.mat).max() < 1e-12
    got = partial_trace(kron(a, b), keep=[0])
    assert np.abs(got.mat - np.trace(b.mat) * a.mat).max() < 1e-12


def test_partial_trace_of_symmetric_cj_state():
    # direct 4x4 arithmetic oracle: block-diagonal sums of (I + V)/6
    m = (np.eye(4) + swap_operator(2).mat) / 6
    oracle = np.array(
        [[m[0, 0] + m[1, 1], m[0, 2] + m[1, 3]], [m[2, 0] + m[3, 1], m[2, 2] + m[3, 3]]]
    )
    assert np.abs(oracle - np.eye(2) / 2).max() < 1e-15
    got = partial_trace(Operator(m, (2, 2)), keep=[0])
    assert np.abs(got.mat - oracle).max() < 1e-15


def test_partial_trace_preserves_trace():
    m = random_hermitian(12, 5)
    m = Operator(m.mat, (2, 3, 2))
    for keep in ([0], [1], [2], [0, 2]):
        red = partial_trace(m, keep)
        assert abs(np.trace(red.mat) - np.trace(m.mat)) < 1e-12


def test_partial_trace_bad_index():
    m = Operator(np.eye(4), (2, 2))
    with pytest.raises(IndexError):
        partial_trace(m, keep=[2])
    with pytest.raises(IndexError):
        partial_trace(m, keep=[])


def test_partial_transpose_matrix_unit():
    m = np.zeros((4, 4), dtype=complex)
    m[1, 2] = 1.0  # |01><10|
    got = partial_transpose(Operator(m, (2, 2)), 0)
    want = np.zeros((4, 4), dtype=complex)
    want[3, 0] = 1.0  # |11><00|
    assert np.array_equal(got.mat, want)


def test_partial_transpose_singlet_spectrum():
    v = np.zeros(4, dtype=complex)
    v[1], v[2] = 1 / np.sqrt(2), -1 / np.sqrt(2)
    pt = partial_transpose(Operator(np.outer(v, v.conj()), (2, 2)), 0)
    eigs = np.linalg.eigvalsh(pt.mat)
    assert abs(eigs[0] + 0.5) < 1e-12


def test_partial_transpose_involution():
    m = random_hermitian(6, 6)
    m = Operator(m.mat, (2, 3))
    back = partial_transpose(partial_transpose(m, 1), 1)
    assert np.array_equal(back.mat, m.mat)


def test_partial_transpose_bad_index():
    with pytest.raises(IndexError):
        partial_transpose(Operator(np.eye(4), (2, 2)), 5)


def test_permute_subsystems_roundtrip():
    m = random_hermitian(8, 7)
    m = Operator(m.mat, (2, 2, 2))
    swapped = permute_subsystems(m, [0, 2, 1])
    assert np.abs(permute_subsystems(swapped, [0, 2, 1]).mat - m.mat).max() == 0.0


def test_eig_identity():
    vals, _ = eig_hermitian(identity((2, 2)))
    assert np.abs(vals - 1.0).max() < 1e-14


def test_eig_swap_spectrum():
    # symmetric subspace has dimension 3, antisymmetric 1
    vals, _ = eig_hermitian(swap_operator(2))
    assert np.abs(np.sort(vals) - np.array([-1.0, 1.0, 1.0, 1.0])).max() < 1e-12


def test_eig_sigma_x():
    vals, _ = eig_hermitian(Operator([[0, 1], [1, 0]]))
    assert np.abs(vals - np.array([-1.0, 1.0])).max() < 1e-14


def test_eig_reconstruction_and_orthonormality():
    m = random_hermitian(9, 8)
    vals, vecs = eig_hermitian(m)
    recon = sum(v * np.outer(k.vec, k.vec.conj()) for v, k in zip(vals, vecs))
    assert np.linalg.norm(recon - m.mat) < 1e-9 * np.linalg.norm(m.mat)
    gram = np.array([[np.vdot(a.vec, b.vec) for b in vecs] for a in vecs])
    assert np.abs(gram - np.eye(9)).max() < 1e-9


def test_eig_rejects_non_hermitian():
    with pytest.raises(DomainError):
        eig_hermitian(Operator([[0, 1], [0, 0]]))


def test_haar_ket_norm_and_determinism():
    for seed in (0, 1, 17):
        k = haar_random_ket(5, seed)
        assert abs(k.norm() - 1.0) < 1e-12
        again = haar_random_ket(5, seed)
        assert np.array_equal(k.vec, again.vec)


def test_haar_ket_zero_dim():
    with pytest.raises(DomainError):
        haar_random_ket(0, 0)


def test_haar_first_component_moment():
    # |<0|psi>|^2 is Beta(1, d-1) under the Haar measure: mean 1/4, var 3/80 at d=4
    n = 10_000
    vals = np.array([abs(haar_random_ket(4, seed).vec[0]) ** 2 for seed in range(n)])
    se = np.sqrt(3 / 80 / n)
    assert abs(vals.mean() - 0.25) < 5 * se


def test_haar_density_is_valid_state():
    rho = haar_random_density(4, 3, dims=(2, 2))
    assert rho.dims == (2, 2)
    assert abs(np.trace(rho.mat) - 1.0) < 1e-12
    assert np.linalg.eigvalsh(rho.mat)[0] > -1e-12


def test_phase_free_distance_zero_iff_phase_related():
    k = haar_random_ket(4, 9)
    rotated = Ket(np.exp(1j * 0.7) * k.vec)
    assert phase_free_distance(k, rotated) < 1e-15
    other = haar_random_ket(4, 10)
    assert phase_free_distance(k, other) > 1e-2
    # the naive sqrt(2 - 2|ip|) formula would floor out near 1e-8 here
    assert phase_free_distance(k, k) < 1e-15


def test_density_matrix_validation():
    with pytest.raises(DomainError):
        DensityMatrix(np.diag([0.9, 0.2]))  # trace 1.1
    with pytest.raises(DomainError):
        DensityMatrix(np.array([[0.5, 0.3], [0.1, 0.5]]))  # not Hermitian
    with pytest.raises(DomainError):
        DensityMatrix(np.diag([1.5, -0.5]))  # negative eigenvalue


def test_operator_rejects_non_finite():
    with pytest.raises(DomainError):
        Operator(np.array([[np.nan, 0], [0, 1]]))


def test_arrays_are_frozen():
    k = haar_random_ket(3, 0)
    with pytest.raises(ValueError):
        k.vec[0] = 0.0
    m = identity((3,))
    with pytest.raises(ValueError):
        m.mat[0, 0] = 2.0
