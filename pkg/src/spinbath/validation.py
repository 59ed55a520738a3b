"""Fast path versus dense oracle on small systems."""
from __future__ import annotations

import numpy as np

from .config import ConfigError, ScenarioConfig
from .model import BATH_MODES, CE_MODES, ModelSpec, apply_hamiltonian, build_model
from .observables import energies, reduce_central
from .oracle import MAX_BATH, dense_energy, dense_hamiltonian, dense_partial_trace, exact_evolve
from .propagator import evolve
from .state import PureState, make_rng, product_state, random_bath_state

TOLERANCES = {"hamiltonian": 1e-13, "evolution": 1e-10, "partial_trace": 1e-13, "energy": 1e-12}


def random_state(layout, rng) -> PureState:
    z = rng.standard_normal(layout.total_dim) + 1j * rng.standard_normal(layout.total_dim)
    return PureState(layout, z / np.linalg.norm(z))


def compare(spec: ModelSpec, t: float = 10.0, seed: int = 0, n_vectors: int = 4,
            dt: float = 0.5, bound: str = "triangle") -> dict[str, float]:
    """Worst deviations between fast path and oracle.

    The Hamiltonian deviation is relative to max(1, ||H||_2); everything else
    is absolute.
    """
    rng = make_rng(seed)
    H = dense_hamiltonian(spec)
    scale = max(1.0, float(np.abs(H.eig()[0]).max()))
    dev = dict.fromkeys(TOLERANCES, 0.0)
    for _ in range(n_vectors):
        psi = random_state(spec.layout, rng)
        fast = apply_hamiltonian(spec, "full", psi).amplitudes
        dev["hamiltonian"] = max(dev["hamiltonian"], np.abs(fast - H.matrix @ psi.amplitudes).max() / scale)
        dev["partial_trace"] = max(dev["partial_trace"], np.abs(
            reduce_central(psi).matrix - dense_partial_trace(psi).matrix).max())
        dev["energy"] = max(dev["energy"], abs(energies(psi, spec)[0] - dense_energy(psi, H)))
    psi0 = product_state(np.array([0, 1, 0, 0]), random_bath_state(spec.n_bath, seed + 1))
    a = evolve(psi0, spec, t, dt=dt, bound=bound).amplitudes
    b = exact_evolve(psi0, H, t).amplitudes
    dev["evolution"] = float(np.abs(a - b).max())
    return {k: float(v) for k, v in dev.items()}


def oracle_report(cfg: ScenarioConfig, t: float = 10.0) -> dict:
    if cfg.N > MAX_BATH:
        raise ConfigError(f"N: check-oracle needs N <= {MAX_BATH}, got {cfg.N}")
    from .runner import scenario_model

    dev = compare(scenario_model(cfg), t=t, seed=cfg.seed, bound=cfg.bound)
    checks = {k: (dev[k], TOLERANCES[k]) for k in TOLERANCES}
    return {"checks": checks, "passed": all(d <= tol for d, tol in checks.values())}


def random_specs(count: int = 20, seed: int = 2024, sizes=(4, 5, 6)) -> list[ModelSpec]:
    """Random specs covering every supported (N, K) at the given sizes and all coupling modes.

    Grid cells are visited in a seeded random order; cells that add an
    uncovered (N, K), ce mode or bath mode are taken first, the rest fill up
    to ``count``.  A K > 0 cell only counts as covered with an active bath.
    """
    rng = make_rng(seed)
    combos = [(N, K) for N in sizes for K in sorted({0, 2, N - 1})]
    grid = [(nk, ce, bm) for nk in combos for ce in CE_MODES for bm in BATH_MODES
            if not (nk[1] == 0 and bm != "none")]
    order = [grid[i] for i in rng.permutation(len(grid))]
    covered: set = set()
    chosen = []
    for cell in order:
        nk, ce, bm = cell
        features = {("ce", ce), ("bath", bm), ("nk", nk)}
        if not features <= covered:
            chosen.append(cell)
            covered |= features
    chosen += [c for c in order if c not in chosen]
    specs = []
    for i in range(count):
        (N, K), ce_mode, bath_mode = chosen[i % len(chosen)]
        J = float(rng.uniform(-6, 6))
        delta = float(rng.uniform(-0.5, 0.5))
        omega = float(rng.uniform(0, 3))
        specs.append(build_model(N, K, J, ce_mode, delta, bath_mode, omega,
                                 seed=int(rng.integers(2**63))))
    return specs
