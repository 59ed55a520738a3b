"""Hamiltonian of two exchange-coupled central spins in an interacting spin bath.

    H = H_c + H_ce + H_e
    H_c  = -J S_1 . S_2
    H_ce = -sum_{i=1,2} sum_j sum_a Delta_{ij}^a S_i^a I_j^a
    H_e  = -sum_{(i,j) in edges} sum_a Omega_{ij}^a I_i^a I_j^a

with spin-1/2 operators (S^a = sigma^a / 2).  H is applied matrix-free: every
two-spin term is streamed through a bit-indexed kernel, nothing of size
(dim x dim) is ever stored.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np

from . import _kernels
from .state import PureState, SpinLayout, make_rng, split_seed

BATH_MODES = ("none", "heisenberg-like", "isotropic")
CE_MODES = ("isotropic", "heisenberg-like", "diag-random")
PARTS = ("full", "Hc", "Hce", "He")


class ConfigurationError(ValueError):
    """Unsupported model parameters (connectivity, lattice size, mode)."""


# --------------------------------------------------------------------------
# topology


def _triangular_shape(n: int) -> tuple[int, int]:
    best = None
    for lx in range(3, n + 1):
        if n % lx == 0 and n // lx >= 3:
            ly = n // lx
            if best is None or abs(lx - ly) < abs(best[0] - best[1]):
                best = (lx, ly)
    if best is None:
        raise ConfigurationError(
            f"K=6 needs N = Lx*Ly with Lx, Ly >= 3 (triangular torus); N={n} has no such factorization"
        )
    return best


def build_topology(K: int, N: int) -> tuple[tuple[int, int], ...]:
    """Bath edge list with every vertex of degree ``K``.

    K=0: no edges; K=2: periodic ring; K=4: periodic L x L square lattice;
    K=6: periodic triangular lattice on the most square Lx x Ly torus;
    K=N-1: complete graph.  Edges are ``(i, j)`` with ``i < j``, sorted.
    """
    K = int(K)
    N = int(N)
    if N < 2:
        raise ConfigurationError(f"bath needs at least 2 spins, got N={N}")
    edges: set[tuple[int, int]] = set()

    def add(i, j):
        edges.add((min(i, j), max(i, j)))

    if K == 0:
        pass
    elif K == N - 1:
        for i in range(N):
            for j in range(i + 1, N):
                add(i, j)
    elif K == 2:
        if N < 3:
            raise ConfigurationError("K=2 ring needs N >= 3")
        for i in range(N):
            add(i, (i + 1) % N)
    elif K == 4:
        L = math.isqrt(N)
        if L * L != N or L < 3:
            raise ConfigurationError(f"K=4 needs N a perfect square L*L with L >= 3, got N={N}")
        for y in range(L):
            for x in range(L):
                s = x + L * y
                add(s, (x + 1) % L + L * y)
                add(s, x + L * ((y + 1) % L))
    elif K == 6:
        lx, ly = _triangular_shape(N)
        for y in range(ly):
            for x in range(lx):
                s = x + lx * y
                add(s, (x + 1) % lx + lx * y)
                add(s, x + lx * ((y + 1) % ly))
                add(s, (x + 1) % lx + lx * ((y + 1) % ly))
    else:
        raise ConfigurationError(f"unsupported connectivity K={K} (allowed: 0, 2, 4, 6, N-1={N - 1})")

    out = tuple(sorted(edges))
    degree = np.zeros(N, dtype=int)
    for i, j in out:
        degree[i] += 1
        degree[j] += 1
    if not np.all(degree == K):
        raise ConfigurationError(f"K={K} with N={N} does not give a regular graph")
    return out


# --------------------------------------------------------------------------
# couplings


def sample_bath_couplings(mode: str, omega: float, edges, seed: int) -> np.ndarray:
    """Per-edge, per-axis couplings Omega_{ij}^a, shape ``(len(edges), 3)``.

    Values are drawn edge by edge (in the given order), axes x, y, z, so the
    seed fixes the table.
    """
    if omega < 0:
        raise ValueError("omega must be >= 0")
    n = len(edges)
    if mode == "none":
        return np.zeros((0, 3))
    if mode == "isotropic":
        return np.full((n, 3), float(omega))
    if mode == "heisenberg-like":
        return make_rng(seed).uniform(-omega, omega, size=(n, 3))
    raise ConfigurationError(f"unknown bath coupling mode {mode!r}")


def sample_ce_couplings(mode: str, delta: float, N: int, seed: int) -> np.ndarray:
    """Central-bath couplings Delta_{ij}^a, shape ``(2, N, 3)``.

    ``diag-random`` draws one value per (i, j) uniformly between 0 and
    ``delta`` and uses it on all three axes.
    """
    delta = float(delta)
    if mode == "isotropic":
        return np.full((2, N, 3), delta)
    rng = make_rng(seed)
    if mode == "heisenberg-like":
        return rng.uniform(-abs(delta), abs(delta), size=(2, N, 3))
    if mode == "diag-random":
        d = rng.uniform(0.0, 1.0, size=(2, N)) * delta
        return np.repeat(d[:, :, None], 3, axis=2)
    raise ConfigurationError(f"unknown central-bath coupling mode {mode!r}")


# --------------------------------------------------------------------------
# model


class TermOperator(NamedTuple):
    """Compiled two-spin terms of one Hamiltonian part."""

    diag: np.ndarray
    masks: np.ndarray
    pp: np.ndarray
    qq: np.ndarray
    c_same: np.ndarray
    c_diff: np.ndarray

    def apply(self, psi: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
        if out is None:
            out = np.empty_like(psi)
        _kernels.apply_terms(psi, out, self.diag, self.masks, self.pp, self.qq,
                             self.c_same, self.c_diff)
        return out


def _readonly(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ModelSpec:
    """Couplings of one realization of the model.  Immutable."""

    J: float
    layout: SpinLayout
    bath_edges: tuple
    bath_couplings: np.ndarray
    ce_couplings: np.ndarray
    bath_mode: str = "heisenberg-like"
    ce_mode: str = "isotropic"
    tags: dict = field(default_factory=dict)

    def __post_init__(self):
        N = self.layout.n_bath
        object.__setattr__(self, "bath_edges", tuple((int(i), int(j)) for i, j in self.bath_edges))
        bc = _readonly(self.bath_couplings).reshape(-1, 3)
        cc = _readonly(self.ce_couplings)
        if bc.shape[0] not in (0, len(self.bath_edges)):
            raise ValueError("bath coupling table does not match the edge list")
        if bc.shape[0] == 0 and self.bath_edges:
            bc = _readonly(np.zeros((len(self.bath_edges), 3)))
        if cc.shape != (2, N, 3):
            raise ValueError(f"central-bath table must have shape (2, {N}, 3), got {cc.shape}")
        for i, j in self.bath_edges:
            if not 0 <= i < j < N:
                raise ValueError(f"invalid bath edge {(i, j)}")
        object.__setattr__(self, "bath_couplings", bc)
        object.__setattr__(self, "ce_couplings", cc)

    @property
    def n_bath(self) -> int:
        return self.layout.n_bath

    @cached_property
    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(np.float64(self.J).tobytes())
        h.update(np.asarray(self.bath_edges, dtype=np.int64).tobytes())
        h.update(self.bath_couplings.tobytes())
        h.update(self.ce_couplings.tobytes())
        h.update(str(self.layout.n_bath).encode())
        return h.hexdigest()[:16]

    def terms(self, part: str = "full") -> list[tuple[int, int, float, float, float]]:
        """Two-spin terms ``(bit_p, bit_q, gx, gy, gz)`` with H_part = sum g_a σ^a σ^a."""
        if part not in PARTS:
            raise ValueError(f"unknown Hamiltonian part {part!r}")
        lay = self.layout
        out = []
        if part in ("full", "Hc"):
            g = -self.J / 4
            out.append((0, 1, g, g, g))
        if part in ("full", "Hce"):
            for i in range(2):
                for j in range(lay.n_bath):
                    gx, gy, gz = -self.ce_couplings[i, j] / 4
                    b_i, b_j = lay.spin_bit(i), lay.spin_bit(2 + j)
                    out.append((min(b_i, b_j), max(b_i, b_j), gx, gy, gz))
        if part in ("full", "He"):
            for (i, j), c in zip(self.bath_edges, self.bath_couplings):
                gx, gy, gz = -c / 4
                out.append((lay.spin_bit(2 + i), lay.spin_bit(2 + j), gx, gy, gz))
        return out

    def operator(self, part: str = "full") -> TermOperator:
        """Compiled operator of one part, built once per spec."""
        cache = self.__dict__.setdefault("_op_cache", {})
        if part not in cache:
            cache[part] = _compile(self.terms(part), self.layout.total_dim)
        return cache[part]


def _compile(terms, dim: int) -> TermOperator:
    idx = np.arange(dim, dtype=np.int64)
    diag = np.zeros(dim)
    pp, qq, cs, cd = [], [], [], []
    for p, q, gx, gy, gz in terms:
        differ = ((idx >> p) ^ (idx >> q)) & 1
        diag += gz * (1.0 - 2.0 * differ)
        pp.append(p)
        qq.append(q)
        cs.append(gx - gy)
        cd.append(gx + gy)
    pp = np.array(pp, dtype=np.int64)
    qq = np.array(qq, dtype=np.int64)
    masks = (np.int64(1) << pp) | (np.int64(1) << qq)
    return TermOperator(diag, masks, pp, qq, np.array(cs, dtype=float), np.array(cd, dtype=float))


def build_model(N: int, K: int, J: float, ce_mode: str, delta: float,
                bath_mode: str, omega: float, seed: int | None = None,
                bath_seed: int | None = None, ce_seed: int | None = None) -> ModelSpec:
    """Sample a ModelSpec.

    Either give one master ``seed`` (split into the ``bath-couplings`` and
    ``ce-couplings`` streams) or the two sub-seeds explicitly.  A model
    without random couplings needs no seed.
    """
    if bath_seed is None or ce_seed is None:
        if seed is None:
            if ce_mode != "isotropic" or bath_mode == "heisenberg-like":
                raise ValueError("random couplings need a master seed or both sub-seeds")
            seed = 0
        bath_seed = split_seed(seed, "bath-couplings") if bath_seed is None else bath_seed
        ce_seed = split_seed(seed, "ce-couplings") if ce_seed is None else ce_seed
    if ce_mode not in CE_MODES:
        raise ConfigurationError(f"unknown ce_mode {ce_mode!r}")
    if bath_mode not in BATH_MODES:
        raise ConfigurationError(f"unknown bath_mode {bath_mode!r}")
    edges = build_topology(K, N) if bath_mode != "none" else ()
    return ModelSpec(
        J=float(J),
        layout=SpinLayout(N),
        bath_edges=edges,
        bath_couplings=sample_bath_couplings(bath_mode, omega, edges, bath_seed),
        ce_couplings=sample_ce_couplings(ce_mode, delta, N, ce_seed),
        bath_mode=bath_mode,
        ce_mode=ce_mode,
        tags={"K": K, "omega": omega, "delta": delta},
    )


def apply_hamiltonian(spec: ModelSpec, part: str, psi: PureState) -> PureState:
    """H_part |psi> (not normalized)."""
    if psi.layout != spec.layout:
        raise ValueError("state layout does not match the model")
    out = spec.operator(part).apply(psi.amplitudes)
    return PureState(spec.layout, out, check_norm=False)


def spectral_bound(spec: ModelSpec) -> float:
    """Upper bound on ||H|| from the triangle inequality (each S^a S^a has norm 1/4)."""
    return (0.75 * abs(spec.J)
            + 0.25 * float(np.abs(spec.bath_couplings).sum())
            + 0.25 * float(np.abs(spec.ce_couplings).sum()))


def spectral_interval(spec: ModelSpec, margin: float = 0.05, max_iter: int = 300,
                      rtol: float = 1e-4) -> tuple[float, float]:
    """Estimated [E_min, E_max] of H from a Lanczos iteration, widened by ``margin``.

    Much tighter than :func:`spectral_bound` for strongly coupled baths.
    The extreme Ritz values are pushed outward by their residual bounds
    ``|beta_k s_k|`` before the relative ``margin`` (of the half-width) is
    added.  Never wider than the triangle bound.
    """
    op = spec.operator("full")
    dim = spec.layout.total_dim
    bound = spectral_bound(spec)
    if dim <= 256:
        ev = np.linalg.eigvalsh(_dense_from_operator(op, dim))
        lo, hi = float(ev[0]), float(ev[-1])
    else:
        lo, hi = _lanczos_edges(op, dim, max_iter, rtol)
    pad = margin * max(hi - lo, 1e-12) / 2
    return max(lo - pad, -bound), min(hi + pad, bound)


def _lanczos_edges(op: TermOperator, dim: int, max_iter: int, rtol: float) -> tuple[float, float]:
    from scipy.linalg import eigh_tridiagonal

    # H is real symmetric in this basis; a real start vector keeps the Krylov space real
    v = make_rng(0x5EED).standard_normal(dim).astype(np.complex128)
    v /= np.linalg.norm(v)
    v_prev = np.zeros_like(v)
    alpha, beta = [], []
    b = 0.0
    lo = hi = 0.0
    for k in range(max_iter):
        w = op.apply(v)
        a = float(np.vdot(v, w).real)
        w -= a * v + b * v_prev
        alpha.append(a)
        b = float(np.linalg.norm(w))
        if k >= 1 and (k % 10 == 0 or b < 1e-12):
            theta, s = eigh_tridiagonal(np.array(alpha), np.array(beta))
            res = np.abs(b * s[-1, :])
            lo, hi = theta[0] - res[0], theta[-1] + res[-1]
            if max(res[0], res[-1]) < rtol * (hi - lo) or b < 1e-12:
                return float(lo), float(hi)
        beta.append(b)
        v_prev, v = v, w / b
    theta, s = eigh_tridiagonal(np.array(alpha), np.array(beta[: len(alpha) - 1]))
    res = np.abs(b * s[-1, :])
    return float(theta[0] - res[0]), float(theta[-1] + res[-1])


def _dense_from_operator(op: TermOperator, dim: int) -> np.ndarray:
    cols = [op.apply(np.eye(1, dim, k, dtype=np.complex128).ravel()).real for k in range(dim)]
    return np.array(cols).T
