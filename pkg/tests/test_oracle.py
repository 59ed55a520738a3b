import numpy as np
import pytest

from spinbath.model import build_model
from spinbath.oracle import dense_hamiltonian, dense_partial_trace, exact_evolve
from spinbath.state import PureState, SpinLayout, product_state, random_bath_state
from spinbath.validation import TOLERANCES, compare, random_specs
from conftest import random_state


def test_bare_central_eigenvalues():
    ev = np.linalg.eigvalsh(dense_hamiltonian(J=-5.0).matrix)
    np.testing.assert_allclose(ev, [-3.75, 1.25, 1.25, 1.25], atol=1e-14)


def test_j_only_is_block_diagonal():
    spec = build_model(3, 2, -5.0, "isotropic", 0.0, "isotropic", 0.0)
    H = dense_hamiltonian(spec).matrix.reshape(8, 4, 8, 4)
    # no bath index ever changes
    off = H.copy()
    for k in range(8):
        off[k, :, k, :] = 0
    assert np.abs(off).max() == 0
    np.testing.assert_allclose(H[3, :, 3, :], dense_hamiltonian(J=-5.0).matrix, atol=0)


def test_dense_hermitian(small_spec):
    H = dense_hamiltonian(small_spec).matrix
    assert np.abs(H - H.conj().T).max() < 1e-13


def test_refuses_large_bath():
    spec = build_model(11, 0, -5.0, "isotropic", 0.1, "none", 0.0)
    with pytest.raises(ValueError):
        dense_hamiltonian(spec)
    with pytest.raises(ValueError):
        dense_partial_trace(product_state([1, 0, 0, 0], random_bath_state(11, 0)))


def test_exact_evolve_identity_and_eigenphase(small_spec):
    H = dense_hamiltonian(small_spec)
    psi = random_state(small_spec.layout, 1)
    np.testing.assert_allclose(exact_evolve(psi, H, 0.0).amplitudes, psi.amplitudes, atol=1e-13)
    w, V = H.eig()
    v = PureState(small_spec.layout, V[:, 7])
    out = exact_evolve(v, H, 2.3).amplitudes
    np.testing.assert_allclose(out, np.exp(-1j * w[7] * 2.3) * v.amplitudes, atol=1e-12)
    assert abs(np.linalg.norm(exact_evolve(psi, H, 50.0).amplitudes) - 1) < 1e-12


def test_dense_partial_trace_product_and_trace():
    c = np.array([0, 0.6, 0.8, 0])
    rho = dense_partial_trace(product_state(c, random_bath_state(3, 2))).matrix
    np.testing.assert_allclose(rho, np.outer(c, c), atol=1e-15)
    r = dense_partial_trace(random_state(SpinLayout(4), 3)).matrix
    assert abs(np.trace(r) - 1) < 1e-13


def test_random_specs_cover_every_k_and_mode():
    specs = random_specs()
    assert len(specs) == 20
    assert {s.n_bath for s in specs} <= {4, 5, 6}
    nk = {(s.n_bath, len(s.bath_edges) * 2 // s.n_bath) for s in specs}
    assert nk == {(N, K) for N in (4, 5, 6) for K in (0, 2, N - 1)}
    assert {s.ce_mode for s in specs} == {"isotropic", "heisenberg-like", "diag-random"}
    assert {s.bath_mode for s in specs} == {"none", "isotropic", "heisenberg-like"}


@pytest.mark.parametrize("index", range(5))
def test_compare_passes_on_random_specs(index):
    dev = compare(random_specs()[index * 4], t=10.0, seed=index)
    for k, tol in TOLERANCES.items():
        assert dev[k] <= tol, k


def _spin_matrices(s):
    m = np.arange(s, -s - 1, -1)
    up = np.diag(np.sqrt(s * (s + 1) - m[1:] * (m[1:] + 1)), 1)
    return [(up + up.T) / 2, (up - up.T) / 2j, np.diag(m)]


def _sector_rho23(N, J, delta, t):
    """Bath-traced rho_23 for K=0, isotropic coupling, built from total-bath-spin sectors."""
    from math import comb

    half = [np.array([[0, 1], [1, 0]]) / 2, np.array([[0, -1j], [1j, 0]]) / 2, np.diag([0.5, -0.5])]
    s1 = [np.kron(a, np.eye(2)) for a in half]
    s2 = [np.kron(np.eye(2), a) for a in half]
    singlet = np.array([0, 1, -1, 0]) / np.sqrt(2)
    t0 = np.array([0, 1, 1, 0]) / np.sqrt(2)
    total = 0j
    for I in np.arange(N / 2, -0.1, -1.0):
        mult = comb(N, int(N / 2 - I)) - (comb(N, int(N / 2 - I) - 1) if I < N / 2 else 0)
        bath = _spin_matrices(I)
        d = bath[0].shape[0]
        H = -J * sum(np.kron(a @ b, np.eye(d)) for a, b in zip(s1, s2)) \
            - delta * sum(np.kron(a + b, c) for a, b, c in zip(s1, s2, bath))
        w, V = np.linalg.eigh(H)
        U = (V * np.exp(-1j * w * t)) @ V.conj().T
        for m in range(d):
            psi = (U @ np.kron([0, 1, 0, 0], np.eye(d)[m])).reshape(4, d)
            total += mult * np.sum((singlet @ psi) * np.conj(t0 @ psi))
    return total / 2**N


@pytest.mark.parametrize("t", [1.3, 7.9])
def test_isotropic_k0_matches_total_spin_sectors(t):
    from spinbath.observables import reduce_central, to_pointer_basis
    from spinbath.propagator import evolve
    from spinbath.state import basis_state

    N, J, delta = 4, -5.0, 0.4
    spec = build_model(N, 0, J, "isotropic", delta, "none", 0.0)
    acc = 0j
    for b in range(1 << N):
        psi = evolve(basis_state(spec.layout, "ud", b), spec, t, dt=0.5)
        acc += to_pointer_basis(reduce_central(psi))[2, 3]
    assert abs(acc / (1 << N) - _sector_rho23(N, J, delta, t)) < 1e-10
