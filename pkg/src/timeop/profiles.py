"""Admissible decay profiles and the block decay transform.

A decay profile is a nonincreasing function lambda: Z -> [0, 1] with
lambda -> 1 at -infinity, lambda -> 0 at +infinity, and ratio decay
lambda(s+t)/lambda(s) -> 0 for every fixed t > 0.  Profiles passing a
sampled certificate of the three conditions define a diagonal weighting
of the age basis; extended blockwise by the identity on the equilibrium
component, the weighting preserves total mass while damping every
fluctuation, and it intertwines the reversible step with an
irreversible contraction semigroup (see the markov module).

All profile evaluation is done in the log domain; the default gumbel
family has log lambda(s) = -exp(a s) exactly, so windows far past the
underflow point of the plain values remain fully usable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .cascade import CascadeSystem, GridDensity, StateVector, grid_to_walsh, walsh_to_grid
from .hilbert import HOperator, HVector

__all__ = [
    "ProfileError",
    "DecayProfile",
    "gumbel",
    "logistic",
    "profile_from_table",
    "AdmissibilityCertificate",
    "check_admissible",
    "DecayOperator",
    "build_decay_operator",
    "apply_block",
    "verify_covariant_transform",
    "verify_mass_preservation",
    "log_condition_number",
]

LIMIT_TOLERANCE = 1e-6


class ProfileError(ValueError):
    """A profile is malformed, inadmissible, or unusable on a window."""


@dataclass(frozen=True)
class DecayProfile:
    """A decay family with log-domain evaluation.

    Families:
      * ``gumbel``:   lambda(s) = exp(-exp(a s)), a > 0
      * ``logistic``: lambda(s) = 1 / (1 + exp(s))
      * ``custom``:   tabulated integer points (s, lambda(s))
    """

    family: str
    a: float = 1.0
    table: tuple = ()

    def __post_init__(self):
        if self.family not in ("gumbel", "logistic", "custom"):
            raise ProfileError(f"unknown profile family {self.family!r}")
        if self.family == "gumbel" and not self.a > 0:
            raise ProfileError(f"gumbel steepness must be positive, got {self.a!r}")
        if self.family == "custom":
            if not self.table:
                raise ProfileError("custom profile needs a table of (s, value) points")
            seen = {}
            for s, v in self.table:
                s = int(s)
                v = float(v)
                if s in seen:
                    raise ProfileError(f"duplicate table point s={s}")
                if not (0.0 <= v <= 1.0):
                    raise ProfileError(f"table value {v!r} at s={s} is outside [0, 1]")
                seen[s] = v
            object.__setattr__(self, "table", tuple(sorted(seen.items())))

    @cached_property
    def _lookup(self):
        return dict(self.table)

    def log_value(self, s):
        """log lambda(s); vectorized over integer arrays."""
        s_arr = np.asarray(s, dtype=float)
        if self.family == "gumbel":
            out = -np.exp(self.a * s_arr)
        elif self.family == "logistic":
            out = -np.logaddexp(0.0, s_arr)
        else:
            flat = np.atleast_1d(s_arr)
            vals = np.empty(flat.shape)
            for i, point in enumerate(flat):
                key = int(point)
                if key != point or key not in self._lookup:
                    raise ProfileError(f"profile table does not cover s={point!r}")
                with np.errstate(divide="ignore"):
                    vals[i] = np.log(self._lookup[key])
            out = vals.reshape(s_arr.shape)
        return out if out.shape else float(out)

    def value(self, s):
        """lambda(s); may underflow to 0.0, use log_value where that matters."""
        return np.exp(self.log_value(s))

    def describe(self) -> str:
        if self.family == "gumbel":
            return f"gumbel(a={self.a:g})"
        if self.family == "logistic":
            return "logistic"
        return f"custom({len(self.table)} points)"


def gumbel(a: float = 1.0) -> DecayProfile:
    return DecayProfile("gumbel", a=float(a))


def logistic() -> DecayProfile:
    return DecayProfile("logistic")


def profile_from_table(points) -> DecayProfile:
    return DecayProfile("custom", table=tuple((int(s), float(v)) for s, v in points))


@dataclass(frozen=True)
class AdmissibilityCertificate:
    """Sampled verification record for the three profile conditions.

    A certificate refers to a concrete finite grid; it is evidence, not
    a proof over all integers.  ``witnesses`` maps a failed condition to
    the offending sample points.
    """

    monotone_ok: bool
    limits_ok: bool
    ratio_ok: bool
    grid: tuple
    t_set: tuple
    tolerance: float
    witnesses: dict = field(default_factory=dict)

    @property
    def admissible(self) -> bool:
        return self.monotone_ok and self.limits_ok and self.ratio_ok

    def failing(self) -> tuple:
        names = []
        if not self.monotone_ok:
            names.append("monotone")
        if not self.limits_ok:
            names.append("limits")
        if not self.ratio_ok:
            names.append("ratio")
        return tuple(names)


def check_admissible(profile: DecayProfile, grid=(-20, 20), t_set=(1, 2),
                     tolerance=LIMIT_TOLERANCE) -> AdmissibilityCertificate:
    """Certify the three decay conditions on an integer sample grid.

    Checks, on ``grid = (lo, hi)`` with ``lo <= -20`` and ``hi >= 20``:

      1. monotone: lambda nonincreasing across the grid;
      2. limits:   lambda(lo) >= 1 - tol and lambda(hi) <= tol;
      3. ratio:    for each t in ``t_set``, s -> lambda(s+t)/lambda(s)
                   is nonincreasing and its last sampled value is <= tol.

    Ratios are formed as exp of log differences, never by dividing
    plain values.
    """
    lo, hi = int(grid[0]), int(grid[1])
    if lo > -20 or hi < 20:
        raise ProfileError(f"certificate grid must cover [-20, 20], got [{lo}, {hi}]")
    t_set = tuple(sorted(set(int(t) for t in t_set)))
    if not t_set or t_set[0] < 1:
        raise ProfileError("t_set must contain positive integers")
    t_max = t_set[-1]
    s_values = np.arange(lo, hi + t_max + 1)
    log_vals = profile.log_value(s_values)
    if np.any(np.isnan(log_vals)) or np.any(log_vals > 1e-12):
        raise ProfileError("profile leaves [0, 1] on the sample grid")

    witnesses = {}
    grid_logs = log_vals[: hi - lo + 1]

    # exact zeros give -inf logs; their flat tails diff to NaN, not a rise
    with np.errstate(invalid="ignore"):
        rises = np.nonzero(np.diff(grid_logs) > 0)[0]
    monotone_ok = rises.size == 0
    if not monotone_ok:
        witnesses["monotone"] = tuple(int(s_values[i]) for i in rises[:8])

    lam_lo = float(np.exp(grid_logs[0]))
    lam_hi = float(np.exp(grid_logs[-1]))
    limits_ok = lam_lo >= 1.0 - tolerance and lam_hi <= tolerance
    if not limits_ok:
        ends = []
        if lam_lo < 1.0 - tolerance:
            ends.append((lo, lam_lo))
        if lam_hi > tolerance:
            ends.append((hi, lam_hi))
        witnesses["limits"] = tuple(ends)

    ratio_ok = True
    ratio_witnesses = []
    for t in t_set:
        # an exact zero makes the ratio undefined (NaN); caught below
        with np.errstate(invalid="ignore"):
            log_ratio = log_vals[t : t + hi - lo + 1] - grid_logs
            bad = np.nonzero(np.diff(log_ratio) > 0)[0]
        for i in bad[:4]:
            ratio_ok = False
            ratio_witnesses.append((t, int(s_values[i]), float(np.exp(log_ratio[i + 1]))))
        last = float(np.exp(log_ratio[-1]))
        if np.isnan(log_ratio[-1]) or last > tolerance:
            ratio_ok = False
            ratio_witnesses.append((t, hi, last))
    if not ratio_ok:
        witnesses["ratio"] = tuple(ratio_witnesses)

    return AdmissibilityCertificate(
        monotone_ok=monotone_ok,
        limits_ok=limits_ok,
        ratio_ok=ratio_ok,
        grid=(lo, hi),
        t_set=t_set,
        tolerance=tolerance,
        witnesses=witnesses,
    )


class DecayOperator:
    """Diagonal age weighting of a cascade, kept in the log domain.

    The diagonal entry over a label of age n is lambda(n); entries are
    strictly positive in the log domain even where the plain float
    value underflows.  Blockwise (see :func:`apply_block`) the transform
    acts as the identity on the equilibrium component.
    """

    def __init__(self, system: CascadeSystem, profile: DecayProfile,
                 certificate: AdmissibilityCertificate):
        self.system = system
        self.profile = profile
        self.certificate = certificate
        log_diag = np.asarray(profile.log_value(system.ages), dtype=float)
        if np.any(~np.isfinite(log_diag)):
            bad_age = int(system.ages[~np.isfinite(log_diag)][0])
            raise ProfileError(f"decay value 0 at age {bad_age} breaks injectivity")
        log_diag.setflags(write=False)
        self.log_diag = log_diag

    @property
    def basis_id(self) -> str:
        return self.system.basis_id

    @cached_property
    def diag(self) -> np.ndarray:
        """Plain diagonal values; may underflow to 0.0 on wide windows."""
        d = np.exp(self.log_diag)
        d.setflags(write=False)
        return d

    @cached_property
    def operator(self) -> HOperator:
        return HOperator.diagonal(self.diag, self.basis_id)

    def log_weight(self, ages) -> np.ndarray:
        """log lambda evaluated at arbitrary integer ages."""
        return self.profile.log_value(np.asarray(ages))

    def apply(self, v: HVector) -> HVector:
        return self.operator.apply(v)


def build_decay_operator(profile: DecayProfile, system: CascadeSystem,
                         certificate: AdmissibilityCertificate | None = None) -> DecayOperator:
    """Weight the age basis by a certified profile.

    An uncertified profile is certified here first, on a grid covering
    both [-20, 20] and the system window; a failing certificate is
    rejected with its witnesses.
    """
    if certificate is None:
        grid = (min(-20, system.window.lo), max(20, system.window.hi))
        certificate = check_admissible(profile, grid=grid)
    if not certificate.admissible:
        failed = ", ".join(certificate.failing())
        raise ProfileError(
            f"profile {profile.describe()} is not admissible (failed: {failed}); "
            f"witnesses: {certificate.witnesses!r}"
        )
    lo, hi = certificate.grid
    if lo > system.window.lo or hi < system.window.hi:
        raise ProfileError("certificate grid does not cover the system window")
    return DecayOperator(system, profile, certificate)


def apply_block(op: DecayOperator, state: StateVector) -> StateVector:
    """Blockwise transform: equilibrium fixed exactly, fluctuation weighted."""
    return StateVector(state.equilibrium, HVector(op.diag * state.fluct.coeffs, op.basis_id))


def verify_covariant_transform(op: DecayOperator, t: int) -> float:
    """Deviation of the weighted covariance at time t.

    Checks ``(U^t)' L U^t = lambda(T + t)`` and the squared variant
    ``(U^t)' L^2 U^t = lambda(T + t)^2`` on basis vectors inside the
    t-margin; the squared side is formed by squaring the evaluated
    lambda floats so a correct construction returns exactly 0.0.
    """
    if t < 0:
        raise ValueError("covariant transform is checked for t >= 0")
    system = op.system
    ut = np.linalg.matrix_power(system.U.matrix, t)
    lam = op.diag
    lam_shift = np.exp(op.log_weight(system.ages + t))
    cols = system.interior_mask(t)
    if not np.any(cols):
        return 0.0
    dev = 0.0
    for mat, target in ((np.diag(lam), np.diag(lam_shift)),
                        (np.diag(lam * lam), np.diag(lam_shift * lam_shift))):
        diff = ut.T @ mat @ ut - target
        dev = max(dev, float(np.abs(diff[:, cols]).max()))
    return dev


def verify_mass_preservation(op: DecayOperator, samples) -> float:
    """Largest mass deviation of the block transform over the samples.

    Samples may be grid densities (baker realization) or state vectors.
    The transform fixes the equilibrium component and every fluctuation
    integrates to zero, so the deviation is pure round-off.
    """
    worst = 0.0
    for sample in samples:
        if isinstance(sample, GridDensity):
            state = grid_to_walsh(op.system, sample)
            after = walsh_to_grid(op.system, apply_block(op, state))
            worst = max(worst, abs(after.mass - sample.mass))
        elif isinstance(sample, StateVector):
            after = apply_block(op, sample)
            worst = max(worst, abs(after.equilibrium - sample.equilibrium))
            if op.system.kind == "baker":
                fluct_mass = walsh_to_grid(op.system, StateVector(0.0, after.fluct)).mass
                worst = max(worst, abs(fluct_mass))
        else:
            raise TypeError(f"cannot measure mass of {type(sample).__name__}")
    return worst


def log_condition_number(op: DecayOperator) -> float:
    """log of lambda(lo)/lambda(hi); grows without bound as windows widen."""
    return float(op.log_diag.max() - op.log_diag.min())
