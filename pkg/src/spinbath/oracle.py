"""Brute-force reference: dense Hamiltonian, eigendecomposition evolution, naive partial trace.

Only for small baths (N <= 10).  Built from explicit Kronecker products of
spin matrices; shares no kernel code with the matrix-free path.
"""
from __future__ import annotations

from functools import reduce

import numpy as np
import scipy.sparse as sp

from .model import ModelSpec
from .observables import PRODUCT, ReducedDensityMatrix
from .state import PureState

MAX_BATH = 10

_SX = np.array([[0, 1], [1, 0]], dtype=np.complex128) / 2
_SY = np.array([[0, -1j], [1j, 0]], dtype=np.complex128) / 2
_SZ = np.array([[1, 0], [0, -1]], dtype=np.complex128) / 2
_SPIN = (_SX, _SY, _SZ)
_I2 = np.eye(2, dtype=np.complex128)


def _bit_of(spin: int) -> int:
    # spin 0 -> bit 1, spin 1 -> bit 0, bath spin j (= spin 2 + j) -> bit 2 + j
    return 1 - spin if spin < 2 else spin


def _two_spin(n_spins: int, s1: int, s2: int, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Embed a(s1) b(s2); kron factors run from the highest bit down to bit 0."""
    placed = {_bit_of(s1): a, _bit_of(s2): b}
    factors = [sp.csr_matrix(placed.get(bit, _I2)) for bit in range(n_spins - 1, -1, -1)]
    return reduce(lambda x, y: sp.kron(x, y, format="csr"), factors)


class DenseHamiltonian:
    def __init__(self, matrix: np.ndarray, spec: ModelSpec | None = None):
        self.matrix = matrix
        self.spec = spec
        self._eig = None

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eig(self):
        if self._eig is None:
            self._eig = np.linalg.eigh(self.matrix)
        return self._eig


def dense_hamiltonian(spec: ModelSpec | None = None, *, J: float | None = None,
                      n_bath: int | None = None) -> DenseHamiltonian:
    """Dense H for ``spec``; ``J`` alone (``n_bath=0``) gives the bare central pair."""
    if spec is None:
        if J is None:
            raise ValueError("need a spec or J")
        n_bath = n_bath or 0
        ce = np.zeros((2, n_bath, 3))
        edges, bc = (), np.zeros((0, 3))
    else:
        J, n_bath = spec.J, spec.n_bath
        ce, edges, bc = spec.ce_couplings, spec.bath_edges, spec.bath_couplings
    if n_bath > MAX_BATH:
        raise ValueError(f"dense oracle refuses N={n_bath} > {MAX_BATH}")
    n = n_bath + 2
    H = sp.csr_matrix((1 << n, 1 << n), dtype=np.complex128)
    for a in range(3):
        H -= J * _two_spin(n, 0, 1, _SPIN[a], _SPIN[a])
        for i in range(2):
            for j in range(n_bath):
                H -= ce[i, j, a] * _two_spin(n, i, 2 + j, _SPIN[a], _SPIN[a])
        for (i, j), c in zip(edges, bc):
            H -= c[a] * _two_spin(n, 2 + i, 2 + j, _SPIN[a], _SPIN[a])
    return DenseHamiltonian(H.toarray(), spec)


def exact_evolve(psi: PureState, H: DenseHamiltonian, t: float) -> PureState:
    """V exp(-i L t) V^dagger psi."""
    if psi.amplitudes.size != H.dim:
        raise ValueError("dimension mismatch")
    w, V = H.eig()
    out = V @ (np.exp(-1j * w * t) * (V.conj().T @ psi.amplitudes))
    return PureState(psi.layout, out, check_norm=False)


def dense_partial_trace(psi: PureState) -> ReducedDensityMatrix:
    """Product-basis reduced matrix by an explicit loop over central and bath indices."""
    if psi.layout.n_bath > MAX_BATH:
        raise ValueError(f"dense oracle refuses N={psi.layout.n_bath} > {MAX_BATH}")
    amps = psi.amplitudes
    rho = np.zeros((4, 4), dtype=np.complex128)
    for a in range(4):
        for b in range(4):
            s = 0j
            for k in range(psi.layout.bath_dim):
                s += amps[a + 4 * k] * np.conj(amps[b + 4 * k])
            rho[a, b] = s
    return ReducedDensityMatrix(rho, PRODUCT)


def dense_energy(psi: PureState, H: DenseHamiltonian) -> float:
    return float(np.vdot(psi.amplitudes, H.matrix @ psi.amplitudes).real)
