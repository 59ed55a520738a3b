"""Reduced density matrix of the central pair and the scalars derived from it."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ModelSpec
from .state import PureState

PRODUCT = "product"
POINTER = "pointer"

_R2 = 1 / np.sqrt(2)
# rows: |T1>, |S>, |T0>, |T-1> in the product basis (uu, ud, du, dd)
POINTER_BASIS = np.array([
    [1, 0, 0, 0],
    [0, _R2, -_R2, 0],
    [0, _R2, _R2, 0],
    [0, 0, 0, 1],
], dtype=np.complex128)
POINTER_LABELS = ("T1", "S", "T0", "T-1")


@dataclass(frozen=True)
class ReducedDensityMatrix:
    matrix: np.ndarray
    basis: str = PRODUCT

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.shape != (4, 4):
            raise ValueError("reduced density matrix must be 4x4")
        if self.basis not in (PRODUCT, POINTER):
            raise ValueError(f"unknown basis tag {self.basis!r}")
        object.__setattr__(self, "matrix", m)

    def __getitem__(self, ij):
        """1-based element access, ``rho[2, 3]`` is rho_23."""
        i, j = ij
        return self.matrix[i - 1, j - 1]

    def diagonal(self) -> np.ndarray:
        return self.matrix.diagonal().real.copy()

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


@dataclass(frozen=True)
class SnapshotObservables:
    """Everything recorded at one sampling instant (pointer basis)."""

    t: float
    rho: ReducedDensityMatrix
    s_c: float
    echo: float
    e_total: float
    e_central: float

    @property
    def rho23(self) -> complex:
        return complex(self.rho[2, 3])

    @property
    def diagonals(self) -> np.ndarray:
        return self.rho.diagonal()

    def row(self) -> dict:
        d = self.diagonals
        r23 = self.rho23
        return {
            "t": self.t,
            "re_r11": d[0], "re_r22": d[1], "re_r33": d[2], "re_r44": d[3],
            "re_r23": r23.real, "im_r23": r23.imag, "abs_r23": float(np.hypot(r23.real, r23.imag)),
            "s_c": self.s_c, "echo": self.echo,
            "e_total": self.e_total, "e_central": self.e_central,
        }


def reduce_central(psi: PureState) -> ReducedDensityMatrix:
    """Trace out the bath: rho_ab = sum_bath psi(a, bath) psi*(b, bath)."""
    m = psi.as_matrix()
    rho = m.T @ m.conj()
    return ReducedDensityMatrix((rho + rho.conj().T) / 2, PRODUCT)


def to_pointer_basis(rho: ReducedDensityMatrix) -> ReducedDensityMatrix:
    if rho.basis != PRODUCT:
        raise ValueError(f"expected a product-basis matrix, got {rho.basis!r}")
    U = POINTER_BASIS
    return ReducedDensityMatrix(U @ rho.matrix @ U.conj().T, POINTER)


def quadratic_entropy(rho: ReducedDensityMatrix) -> float:
    """1 - Tr rho^2."""
    m = rho.matrix
    return float(1.0 - np.vdot(m, m).real)


def loschmidt_echo(rho: ReducedDensityMatrix, rho0: ReducedDensityMatrix) -> float:
    """Tr(rho rho0)."""
    if rho.basis != rho0.basis:
        raise ValueError("basis mismatch")
    # Tr(AB) = sum_ij A_ij B_ji
    return float(np.sum(rho.matrix * rho0.matrix.T).real)


def reference_rdm(t: float, J: float) -> ReducedDensityMatrix:
    """Pointer-basis rho_0(t) for the initial state |ud> evolved with H_ce = 0."""
    m = np.zeros((4, 4), dtype=np.complex128)
    m[1, 1] = m[2, 2] = 0.5
    m[1, 2] = 0.5 * np.exp(-1j * J * t)
    m[2, 1] = np.conj(m[1, 2])
    return ReducedDensityMatrix(m, POINTER)


def central_hamiltonian(J: float) -> np.ndarray:
    """4x4 matrix of -J S1.S2 in the product basis."""
    m = np.diag([1.0, -1.0, -1.0, 1.0]).astype(np.complex128) * (-J / 4)
    m[1, 2] = m[2, 1] = -J / 2
    return m


def central_energy(rho: ReducedDensityMatrix, J: float) -> float:
    """Tr(rho H_c) for a product-basis reduced matrix."""
    if rho.basis != PRODUCT:
        raise ValueError("central energy needs the product-basis matrix")
    return float(np.sum(rho.matrix * central_hamiltonian(J).T).real)


def energies(psi: PureState, spec: ModelSpec, e_total: float | None = None) -> tuple[float, float]:
    """(<H>, <H_c>).  The central energy comes from the reduced matrix."""
    if e_total is None:
        amps = psi.amplitudes
        e_total = float(np.vdot(amps, spec.operator("full").apply(amps)).real)
    return e_total, central_energy(reduce_central(psi), spec.J)


def snapshot(t: float, psi: PureState, spec: ModelSpec, e_total: float | None = None) -> SnapshotObservables:
    """Observables at time ``t``; pass ``e_total`` if <H> is already known."""
    rho_prod = reduce_central(psi)
    if e_total is None:
        e_total = energies(psi, spec)[0]
    rho = to_pointer_basis(rho_prod)
    return SnapshotObservables(
        t=float(t),
        rho=rho,
        s_c=quadratic_entropy(rho),
        echo=loschmidt_echo(rho, reference_rdm(t, spec.J)),
        e_total=float(e_total),
        e_central=central_energy(rho_prod, spec.J),
    )
