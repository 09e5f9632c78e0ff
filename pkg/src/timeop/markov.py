"""The contraction semigroup induced by a decay weighting.

Conjugating the forward step by an admissible decay operator yields,
for t >= 0, a strongly contracting evolution on the fluctuation space:
the coefficient sitting at age n moves to age n + t with the weight
lambda(n+t)/lambda(n) in (0, 1].  The weight table is precomputed as
log ratios, and the inverse weighting is never formed as a matrix: its
entries reach exp(exp(hi)) on a window topping out at hi, so the ratio
form is the only finitely representable realization.

Negative times are rejected; the backward weights are unbounded as the
window widens, which :func:`asymmetry_probe` demonstrates, so the
forward family is a semigroup and not a group.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cascade import GridDensity, MarginError, StateVector, grid_to_walsh, walsh_to_grid
from .hilbert import BasisMismatchError, HVector
from .profiles import DecayOperator

__all__ = [
    "MarkovEvolution",
    "markov_step",
    "LyapunovTrace",
    "lyapunov_trace",
    "PositivityReport",
    "positivity_probe",
    "AsymmetryReport",
    "asymmetry_probe",
]

SUPPORT_TOLERANCE = 1e-12


class MarkovEvolution:
    """Precomputed log-ratio tables for an induced contraction semigroup.

    ``log_ratios[a - lo, t]`` holds log lambda(a+t) - log lambda(a) for
    every window age a with a + t <= hi, and NaN where the image leaves
    the window.  Ratios are guaranteed in (0, 1] by profile
    admissibility, and the time-zero column is exactly zero.
    """

    def __init__(self, decay: DecayOperator, max_t: int):
        if max_t < 0:
            raise ValueError("the horizon must be non-negative")
        self.decay = decay
        self.system = decay.system
        self.max_t = int(max_t)
        window = self.system.window
        ages = np.arange(window.lo, window.hi + 1)
        log_lambda = decay.log_weight(ages)
        table = np.full((ages.size, self.max_t + 1), np.nan)
        for t in range(self.max_t + 1):
            reach = ages + t <= window.hi
            table[reach, t] = decay.log_weight(ages[reach] + t) - log_lambda[reach]
        valid = ~np.isnan(table)
        if np.any(table[valid] > 0):
            raise ValueError("decay ratios exceed one; the profile is not admissible")
        if np.any(table[:, 0][valid[:, 0]] != 0.0):
            raise ValueError("time-zero weights must be exactly one")
        table.setflags(write=False)
        self.log_ratios = table
        self._age_offset = window.lo

    def label_log_ratio(self, t: int) -> np.ndarray:
        """Per-label log weight at time t (NaN where out of margin)."""
        return self.log_ratios[self.system.ages - self._age_offset, t]


def markov_step(ev: MarkovEvolution, rho: HVector, t: int,
                support_tol: float = SUPPORT_TOLERANCE) -> HVector:
    """Evolve a margin-supported fluctuation vector t steps forward.

    The coefficient at age n contributes exp(log lambda(n+t) -
    log lambda(n)) times itself at age n + t.  Coefficients below
    ``support_tol`` (relative to the largest) are treated as truncation
    dust and dropped; larger coefficients outside the t-margin raise
    :class:`MarginError`.
    """
    if t < 0:
        raise ValueError("negative times are outside the semigroup")
    if t > ev.max_t:
        raise ValueError(f"t={t} exceeds the precomputed horizon {ev.max_t}")
    system = ev.system
    if rho.basis_id != system.basis_id:
        raise BasisMismatchError("vector does not belong to the evolved system")
    coeffs = rho.coeffs
    floor = support_tol * max(1.0, float(np.abs(coeffs).max(initial=0.0)))
    outside = system.ages + t > system.window.hi
    offending = np.nonzero(outside & (np.abs(coeffs) > floor))[0]
    if offending.size:
        names = ", ".join(system.label_text(system.labels[i]) for i in offending[:8])
        raise MarginError(f"support leaves the window within {t} steps at labels: {names}")
    out = np.zeros(system.dim)
    alive = np.nonzero(~outside & (coeffs != 0.0))[0]
    targets = system.step_indices(t)[alive]
    out[targets] = np.exp(ev.label_log_ratio(t)[alive]) * coeffs[alive]
    return HVector(out, system.basis_id)


@dataclass(frozen=True)
class LyapunovTrace:
    """Norm decay record of one evolved vector.

    ``norms[t]`` is the evolved norm and ``forms[t]`` the quadratic form
    of the squared weighting against the pulled-back trajectory; the two
    are independent float routes to the same quantity and their
    agreement is asserted at construction.
    """

    t_values: tuple
    norms: tuple
    forms: tuple
    monotone: bool
    ratio_to_zero: float


def lyapunov_trace(ev: MarkovEvolution, rho: HVector, max_t: int | None = None,
                   agreement_tol: float = 1e-10) -> LyapunovTrace:
    """Trace the evolved norm of ``rho`` and cross-check its decay.

    For each t the direct route squares the per-coefficient products
    while the quadratic-form route sums exp(2 log ratio) times the
    squared coefficients; both must agree within ``agreement_tol``
    relative.  Monotone decrease of the norms is reported, not assumed.
    """
    horizon = ev.max_t if max_t is None else int(max_t)
    if horizon > ev.max_t:
        raise ValueError(f"max_t={horizon} exceeds the precomputed horizon {ev.max_t}")
    norms = []
    forms = []
    for t in range(horizon + 1):
        evolved = markov_step(ev, rho, t)
        norm_direct = evolved.norm()
        log_ratio = ev.label_log_ratio(t)
        alive = (rho.coeffs != 0.0) & ~np.isnan(log_ratio)
        with np.errstate(under="ignore"):
            form = float(np.sum(np.exp(2.0 * log_ratio[alive]) * rho.coeffs[alive] ** 2))
        if norm_direct > 0.0 and abs(np.sqrt(form) - norm_direct) > agreement_tol * norm_direct:
            raise AssertionError(
                f"norm routes disagree at t={t}: direct {norm_direct!r} vs form {np.sqrt(form)!r}"
            )
        norms.append(norm_direct)
        forms.append(form)
    monotone = all(b <= a for a, b in zip(norms, norms[1:]))
    ratio = norms[-1] / norms[0] if norms and norms[0] > 0 else 0.0
    return LyapunovTrace(tuple(range(horizon + 1)), tuple(norms), tuple(forms), monotone, ratio)


@dataclass(frozen=True)
class PositivityReport:
    """Minimum cell value of an evolved density; violation if negative."""

    t: int
    min_cell: float
    violation: float


def positivity_probe(ev: MarkovEvolution, rho: GridDensity, t: int) -> PositivityReport:
    """Evolve a nonnegative unit-mass density and report its minimum cell.

    The density is transformed to Walsh coefficients, the equilibrium
    component is held fixed while the fluctuation evolves, and the
    result is mapped back to the grid.  Whether the evolved density
    stays nonnegative is measured, never assumed: the report carries the
    violation magnitude when the minimum dips below zero.
    """
    if ev.system.kind != "baker":
        raise ValueError("positivity is probed on the baker grid realization")
    if float(rho.values.min()) < -1e-12:
        raise ValueError("probe density must be nonnegative")
    if abs(rho.mass - 1.0) > 1e-9:
        raise ValueError(f"probe density must have unit mass, got {rho.mass!r}")
    state = grid_to_walsh(ev.system, rho)
    evolved = markov_step(ev, state.fluct, t)
    grid = walsh_to_grid(ev.system, StateVector(state.equilibrium, evolved))
    min_cell = float(grid.values.min())
    return PositivityReport(t=t, min_cell=min_cell, violation=max(0.0, -min_cell))


@dataclass(frozen=True)
class AsymmetryReport:
    """Forward contraction versus backward amplification at time t."""

    t: int
    forward_norm_ratio: float
    backward_log_factor: float
    backward_factor: float
    backward_age: int


def asymmetry_probe(ev: MarkovEvolution, rho: HVector, t: int) -> AsymmetryReport:
    """Contrast the forward contraction with the backward weight table.

    The backward weights log lambda(n-t) - log lambda(n) are all
    nonnegative and their maximum grows like exp(hi) as the window
    widens, so the backward family cannot be bounded: the report carries
    the largest backward factor (and its log, which stays finite when
    the factor itself overflows).
    """
    if t < 0:
        raise ValueError("probe times are non-negative")
    system = ev.system
    window = system.window
    forward = markov_step(ev, rho, t)
    base = rho.norm()
    forward_ratio = forward.norm() / base if base > 0 else 0.0
    ages = np.arange(window.lo + t, window.hi + 1)
    if ages.size == 0:
        raise ValueError("window too narrow for the requested backward time")
    back_logs = ev.decay.log_weight(ages - t) - ev.decay.log_weight(ages)
    i = int(np.argmax(back_logs))
    log_factor = float(back_logs[i])
    with np.errstate(over="ignore"):
        factor = float(np.exp(log_factor))
    return AsymmetryReport(
        t=t,
        forward_norm_ratio=forward_ratio,
        backward_log_factor=log_factor,
        backward_factor=factor,
        backward_age=int(ages[i]),
    )
