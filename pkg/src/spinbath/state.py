"""Pure states of two central spins plus an N-spin bath.

Bit convention
--------------
A basis-state index ``i`` of the full system encodes one σ^z configuration.
Bit value 0 is spin up, bit value 1 is spin down.

* bit 1 holds central spin 1, bit 0 holds central spin 2, so the central
  code ``i & 3`` runs over ``↑↑, ↑↓, ↓↑, ↓↓`` as 0, 1, 2, 3;
* bit ``j + 2`` holds bath spin ``j`` (0-based), so ``i >> 2`` is the bath
  basis index.

Hence ``i = central_code + 4 * bath_index`` and the amplitudes reshaped to
``(2**N, 4)`` have the bath index on rows and the central code on columns.
"""
from __future__ import annotations

from dataclasses import dataclass
from zlib import crc32

import numpy as np

NORM_TOL = 1e-12

CENTRAL_LABELS = ("uu", "ud", "du", "dd")
_LABEL_ALIASES = {
    "↑↑": "uu", "↑↓": "ud", "↓↑": "du", "↓↓": "dd",
    "up,up": "uu", "up,down": "ud", "down,up": "du", "down,down": "dd",
}


@dataclass(frozen=True)
class SpinLayout:
    """Sizes of the central system and the bath."""

    n_bath: int
    n_central: int = 2

    def __post_init__(self):
        if self.n_central != 2:
            raise ValueError("the central system always has two spins")
        if self.n_bath < 0:
            raise ValueError(f"n_bath must be >= 0, got {self.n_bath}")

    @property
    def n_spins(self) -> int:
        return self.n_central + self.n_bath

    @property
    def bath_dim(self) -> int:
        return 1 << self.n_bath

    @property
    def total_dim(self) -> int:
        return 1 << self.n_spins

    def spin_bit(self, spin: int) -> int:
        """Bit position of ``spin``: 0, 1 are the central spins, 2.. the bath."""
        if not 0 <= spin < self.n_spins:
            raise IndexError(f"spin {spin} out of range for {self.n_spins} spins")
        if spin < 2:
            return 1 - spin
        return spin

    def encode(self, config) -> int:
        """Map a configuration (sequence of 0/1 per spin, central first) to an index."""
        config = tuple(int(s) for s in config)
        if len(config) != self.n_spins or any(s not in (0, 1) for s in config):
            raise ValueError(f"configuration must be {self.n_spins} values in {{0, 1}}")
        return sum(s << self.spin_bit(k) for k, s in enumerate(config))

    def decode(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.total_dim:
            raise IndexError(f"basis index {index} out of range")
        return tuple((index >> self.spin_bit(k)) & 1 for k in range(self.n_spins))


def central_code(pattern) -> int:
    """Central code 0..3 for a two-spin label such as ``"ud"`` or ``"↑↓"``."""
    if isinstance(pattern, (int, np.integer)):
        if not 0 <= pattern < 4:
            raise ValueError(f"central code must be in 0..3, got {pattern}")
        return int(pattern)
    key = _LABEL_ALIASES.get(pattern, pattern)
    if key not in CENTRAL_LABELS:
        raise ValueError(f"unknown central pattern {pattern!r}")
    return CENTRAL_LABELS.index(key)


class PureState:
    """Normalized amplitude vector over the full tensor-product basis."""

    __slots__ = ("layout", "amplitudes")

    def __init__(self, layout: SpinLayout, amplitudes, check_norm: bool = True):
        amplitudes = np.ascontiguousarray(amplitudes, dtype=np.complex128)
        if amplitudes.shape != (layout.total_dim,):
            raise ValueError(
                f"expected {layout.total_dim} amplitudes, got shape {amplitudes.shape}"
            )
        if check_norm:
            norm = np.linalg.norm(amplitudes)
            if abs(norm - 1.0) > NORM_TOL:
                raise ValueError(f"state is not normalized (norm = {norm!r})")
        self.layout = layout
        self.amplitudes = amplitudes

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "PureState":
        return PureState(self.layout, self.amplitudes.copy(), check_norm=False)

    def as_matrix(self) -> np.ndarray:
        """View of the amplitudes as ``(bath_dim, 4)``."""
        return self.amplitudes.reshape(self.layout.bath_dim, 4)

    def __repr__(self):
        return f"PureState(n_bath={self.layout.n_bath}, norm={self.norm():.15f})"


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator (Philox) seeded with a 64-bit integer."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


def split_seed(master: int, stream: str) -> int:
    """Derive an independent 64-bit sub-seed for a named stream.

    The sub-seed is the first 64-bit word of ``SeedSequence(master,
    spawn_key=(crc32(stream),))``, so every stream can be reproduced from the
    master seed alone.
    """
    ss = np.random.SeedSequence(int(master), spawn_key=(crc32(stream.encode()),))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def basis_state(layout: SpinLayout, central_pattern, bath_index: int) -> PureState:
    """Single computational basis state ``|central> ⊗ |bath_index>``."""
    if not 0 <= bath_index < layout.bath_dim:
        raise IndexError(f"bath_index {bath_index} out of range [0, {layout.bath_dim})")
    amps = np.zeros(layout.total_dim, dtype=np.complex128)
    amps[central_code(central_pattern) + 4 * bath_index] = 1.0
    return PureState(layout, amps)


def random_bath_state(n_bath: int, seed: int) -> np.ndarray:
    """Random bath vector: i.i.d. standard complex normal amplitudes, normalized.

    This samples the unitarily invariant ensemble of pure states, i.e. a
    typical state of the infinite-temperature bath.
    """
    if n_bath < 1:
        raise ValueError("n_bath must be >= 1")
    rng = make_rng(seed)
    dim = 1 << n_bath
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return z / np.linalg.norm(z)


def product_state(central, bath) -> PureState:
    """Tensor product of a 4-component central vector and a bath vector."""
    central = np.asarray(central, dtype=np.complex128)
    bath = np.asarray(bath, dtype=np.complex128)
    if central.shape != (4,):
        raise ValueError("central factor must have 4 components")
    n_bath = int(np.log2(bath.size)) if bath.size else -1
    if bath.ndim != 1 or bath.size != 1 << max(n_bath, 0):
        raise ValueError("bath factor length must be a power of two")
    for name, v in (("central", central), ("bath", bath)):
        nv = np.linalg.norm(v)
        if abs(nv - 1.0) > NORM_TOL:
            raise ValueError(f"{name} factor is not normalized (norm = {nv!r})")
    # bath index is the slow axis
    return PureState(SpinLayout(n_bath), np.outer(bath, central).ravel())


def inner_product(a: PureState, b: PureState) -> complex:
    """<a|b>, conjugate-linear in ``a``."""
    if a.layout != b.layout:
        raise ValueError("layout mismatch")
    return complex(np.vdot(a.amplitudes, b.amplitudes))
