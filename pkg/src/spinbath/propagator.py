"""Unitary time stepping with the Chebyshev expansion of exp(-i H dt).

With the spectrum of H inside [center - R, center + R] and x = (H - center)/R,

    exp(-i H dt) = exp(-i center dt) [ J_0(z) + 2 sum_{k>=1} (-i)^k J_k(z) T_k(x) ],   z = R dt,

where J_k are Bessel functions of the first kind.  The series is cut once
all remaining coefficients fall below the tolerance, which makes every step
exact to that tolerance.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import jv

from . import _kernels
from .model import ModelSpec, spectral_bound, spectral_interval
from .state import PureState

log = logging.getLogger(__name__)

SAFETY_MARGIN = 0.05
DEFAULT_TOL = 1e-12


class PropagationError(RuntimeError):
    """Norm or energy left its tolerance during a trajectory."""


@dataclass(frozen=True)
class PropagatorPlan:
    radius: float
    dt: float
    tol: float
    coeffs: np.ndarray
    center: float = 0.0
    spec_key: str | None = None

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1


def plan_step(R: float, dt: float, eps: float = DEFAULT_TOL, center: float = 0.0,
              spec_key: str | None = None) -> PropagatorPlan:
    """Chebyshev coefficients for one step of length ``dt`` on ``[center-R, center+R]``."""
    if not R > 0:
        raise ValueError("spectral radius must be positive")
    if not dt > 0:
        raise ValueError("time step must be positive")
    if not 0 < eps <= 1e-8:
        raise ValueError(f"tolerance must lie in (0, 1e-8], got {eps}")
    z = R * dt
    kmax = int(z + 10 * z ** (1 / 3) + 60)
    while True:
        bess = jv(np.arange(kmax + 1), z)
        if np.all(np.abs(bess[-10:]) < eps * 1e-3):
            break
        kmax *= 2
    mags = np.abs(bess) * 2
    mags[0] /= 2
    above = np.nonzero(mags >= eps)[0]
    m = int(above[-1]) if above.size else 0
    k = np.arange(m + 1)
    coeffs = 2 * (-1j) ** k * bess[: m + 1]
    coeffs[0] = bess[0]
    return PropagatorPlan(radius=float(R), dt=float(dt), tol=float(eps),
                          coeffs=coeffs.astype(np.complex128), center=float(center),
                          spec_key=spec_key)


def step_tolerance(eps: float, n_steps: int) -> float:
    """Per-step tolerance so that ``n_steps`` truncation errors add up to at most ``eps``."""
    return max(eps / max(n_steps, 1), 1e-17)


def plan_for(spec: ModelSpec, dt: float, eps: float = DEFAULT_TOL,
             bound: str = "triangle") -> PropagatorPlan:
    """Plan for ``spec``.

    ``bound="triangle"`` uses :func:`spectral_bound` (rigorous, loose);
    ``bound="lanczos"`` uses the Ritz estimate of the spectral edges (tight).
    Both get the 5% safety margin.
    """
    if bound == "triangle":
        R = spectral_bound(spec) * (1 + SAFETY_MARGIN)
        return plan_step(R, dt, eps, spec_key=spec.fingerprint)
    if bound == "lanczos":
        lo, hi = spectral_interval(spec, margin=SAFETY_MARGIN)
        return plan_step((hi - lo) / 2, dt, eps, center=(hi + lo) / 2, spec_key=spec.fingerprint)
    raise ValueError(f"unknown bound method {bound!r}")


def _check_plan(spec: ModelSpec, plan: PropagatorPlan):
    if plan.spec_key is not None:
        if plan.spec_key != spec.fingerprint:
            raise ValueError("propagator plan was built for a different model")
        return
    b = spectral_bound(spec)
    if plan.center - plan.radius > -b or plan.center + plan.radius < b:
        raise ValueError(
            f"stale plan: interval [{plan.center - plan.radius:g}, {plan.center + plan.radius:g}] "
            f"does not cover the spectral bound {b:g}"
        )


def _chebyshev(op, psi: np.ndarray, plan: PropagatorPlan) -> np.ndarray:
    c = plan.coeffs
    scale = 2.0 / plan.radius
    acc = c[0] * psi
    if plan.order >= 1:
        prev = psi.copy()
        cur = (op.apply(psi) - plan.center * psi) / plan.radius
        acc += c[1] * cur
        h = np.empty_like(psi)
        for k in range(2, plan.order + 1):
            op.apply(cur, h)
            _kernels.chebyshev_update(h, cur, prev, acc, scale, plan.center, c[k])
            prev, cur = cur, prev
    if plan.center:
        acc *= np.exp(-1j * plan.center * plan.dt)
    return acc


def evolve_step(psi: PureState, spec: ModelSpec, plan: PropagatorPlan) -> PureState:
    """exp(-i H dt) |psi> to within ``plan.tol``."""
    if psi.layout != spec.layout:
        raise ValueError("state layout does not match the model")
    _check_plan(spec, plan)
    out = _chebyshev(spec.operator("full"), psi.amplitudes, plan)
    return PureState(spec.layout, out, check_norm=False)


def evolve(psi: PureState, spec: ModelSpec, t: float, dt: float = 0.05,
           eps: float = DEFAULT_TOL, bound: str = "triangle") -> PureState:
    """Evolve to time ``t`` (any sign) in equal steps no longer than ``dt``."""
    if t == 0:
        return psi.copy()
    n = max(1, int(np.ceil(abs(t) / dt - 1e-9)))
    plan = plan_for(spec, abs(t) / n, step_tolerance(eps, n), bound)
    if t < 0:
        plan = _reverse(plan)
    for _ in range(n):
        psi = evolve_step(psi, spec, plan)
    return psi


def _reverse(plan: PropagatorPlan) -> PropagatorPlan:
    # exp(+iH dt): conjugate the scalar series, T_k(x) is real
    return PropagatorPlan(plan.radius, -plan.dt, plan.tol, np.conj(plan.coeffs),
                          plan.center, plan.spec_key)


def trotter_step(psi: PureState, spec: ModelSpec, dt: float) -> PureState:
    """Second-order (Strang) product-formula step; cross-check only.

    Each two-spin term exponentiates exactly; terms are swept forward then
    backward with dt/2.
    """
    amps = psi.amplitudes.copy()
    terms = spec.terms("full")
    for p, q, gx, gy, gz in terms:
        _kernels.pair_exponential(amps, p, q, gx, gy, gz, dt / 2)
    for p, q, gx, gy, gz in reversed(terms):
        _kernels.pair_exponential(amps, p, q, gx, gy, gz, dt / 2)
    return PureState(spec.layout, amps, check_norm=False)


def expectation(spec: ModelSpec, part: str, amps: np.ndarray) -> float:
    return float(np.vdot(amps, spec.operator(part).apply(amps)).real)


def evolve_trajectory(psi0: PureState, spec: ModelSpec, t_max: float, dt_sample: float,
                      sink: Callable | None = None, eps: float = DEFAULT_TOL,
                      bound: str = "triangle", plan: PropagatorPlan | None = None,
                      energy_tol: float = 1e-10, norm_tol: float = 1e-12) -> PureState:
    """Evolve ``psi0`` and call ``sink(t, psi, e_total)`` at every multiple of ``dt_sample``.

    ``eps`` bounds the accumulated truncation error of the whole trajectory.

    Norm and total energy are checked at each snapshot; a drift beyond
    ``norm_tol`` or ``energy_tol * (1 + |E(0)|)`` raises :class:`PropagationError`.
    """
    if not dt_sample > 0:
        raise ValueError("dt_sample must be positive")
    if not t_max >= dt_sample:
        raise ValueError("t_max must be at least dt_sample")
    n_steps = int(round(t_max / dt_sample))
    if abs(n_steps * dt_sample - t_max) > 1e-9 * max(1.0, t_max):
        raise ValueError("t_max must be a multiple of dt_sample")
    if plan is None:
        plan = plan_for(spec, dt_sample, step_tolerance(eps, n_steps), bound)
    elif abs(plan.dt - dt_sample) > 1e-15 * dt_sample:
        raise ValueError("plan step does not match dt_sample")
    _check_plan(spec, plan)
    log.debug("trajectory: %d steps, expansion order %d, radius %.4g", n_steps, plan.order, plan.radius)

    op = spec.operator("full")
    amps = psi0.amplitudes.copy()
    e0 = None
    for step in range(n_steps + 1):
        t = step * dt_sample
        norm = float(np.linalg.norm(amps))
        energy = float(np.vdot(amps, op.apply(amps)).real)
        if e0 is None:
            e0 = energy
        if abs(norm - 1.0) > norm_tol or abs(energy - e0) > energy_tol * (1 + abs(e0)):
            raise PropagationError(
                f"t={t:g}: norm={norm:.16g}, energy drift={energy - e0:.3g} "
                f"(radius {plan.radius:g}, order {plan.order})"
            )
        if sink is not None:
            sink(t, PureState(spec.layout, amps, check_norm=False), energy)
        if step < n_steps:
            amps = _chebyshev(op, amps, plan)
    return PureState(spec.layout, amps, check_norm=False)
