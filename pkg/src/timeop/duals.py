"""The conjugated evolution web over the strengthened/weakened pairing.

With real scalars the ambient pairing is nondegenerate, so continuous
functionals collapse onto coefficient vectors and the strengthened
space, the ambient space, and the antidual survive as three Gram
weightings of one coefficient space: exp(-2 log d), identity, and
exp(+2 log d) over the decay diagonal d.  The antitransposed decay map
is then the plain transpose (the decay diagonal itself), the Riesz map
is its square, and six conjugated evolutions arise from one forward
step:

  u_ext : the plain step, extended to functionals;
  w     : decay-conjugated step (the contraction semigroup);
  v     : inverse conjugation by the antitransposed decay map;
  x     : Riesz conjugation of w (equal to v, which is verified);
  y     : decay conjugation of u_ext (equal to w in this realization);
  z     : Riesz conjugation of u_ext.

Every conjugation is evaluated in log-ratio form on margin-safe labels;
weights of v and x reach exp(exp(hi) - exp(lo + t)) and overflow guards
reject windows past the representable range.  Deviations between
operators that the theory says coincide are measured in the antidual
operator metric (relative weight deviation), where the conjugated
families are uniformly bounded; witnesses for the asserted inequalities
are reported in the plain coefficient norm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cascade import CascadeSystem, MarginError
from .hilbert import HOperator, HVector, inner
from .profiles import DecayOperator
from .rigging import LOG_WEIGHT_CAP, weighted_inner

__all__ = [
    "DualVector",
    "antitranspose",
    "RieszMaps",
    "riesz_map",
    "OperatorWeb",
    "build_operator_web",
    "WitnessRecord",
    "WebReport",
    "verify_web",
    "antidual_inner",
]


@dataclass(frozen=True)
class DualVector:
    """A continuous functional represented through the ambient pairing."""

    coeffs: np.ndarray
    basis_id: str

    def __post_init__(self):
        arr = np.array(self.coeffs, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    def evaluate(self, v: HVector) -> float:
        return inner(v, HVector(self.coeffs, self.basis_id))


def antitranspose(lam: HOperator, samples: int = 100, seed: int = 0,
                  tolerance: float = 1e-12) -> HOperator:
    """The antitransposed decay map under the ambient pairing.

    Returns the matrix M with ``inner(rho, M f) = inner(L rho, f)`` for
    all rho, f; over real scalars this is the transpose, hence the
    symmetric diagonal itself.  The pairing identity is verified on a
    seeded sample of (rho, f) pairs before returning.
    """
    if lam.diag is None or np.any(lam.diag <= 0):
        raise ValueError("need a symmetric positive diagonal map")
    transposed = HOperator(lam.matrix.T.copy(), lam.basis_id, diag=lam.diag)
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        rho = HVector(rng.standard_normal(lam.dim), lam.basis_id)
        f = HVector(rng.standard_normal(lam.dim), lam.basis_id)
        lhs = inner(rho, transposed.apply(f))
        rhs = inner(lam.apply(rho), f)
        scale = max(rho.norm() * f.norm(), 1e-300)
        if abs(lhs - rhs) > tolerance * scale:
            raise AssertionError("pairing identity failed for the antitransposed map")
    return transposed


@dataclass(frozen=True)
class RieszMaps:
    """Riesz map of the strengthened pairing and its ambient restriction.

    ``riesz`` is the decay map composed with its antitranspose (the
    squared diagonal); ``restriction`` is the same operator viewed on
    the ambient space; the inverse is kept in log-diagonal form only.
    """

    riesz: HOperator
    riesz_inv_log_diag: np.ndarray
    restriction: HOperator


def riesz_map(decay: DecayOperator, tolerance: float = 1e-12) -> RieszMaps:
    """Build the Riesz map of the decay rigging and confirm its square root.

    The construction multiplies the decay map by its antitranspose,
    checks that the entrywise square root recovers the decay diagonal
    within ``tolerance`` relative, and confirms nonnegativity of the
    restriction.
    """
    lam = decay.operator
    lam_anti = antitranspose(lam)
    riesz = lam @ lam_anti
    sqrt_back = np.sqrt(riesz.diag)
    mismatch = np.abs(sqrt_back - lam.diag)
    if np.any(mismatch > tolerance * np.maximum(lam.diag, 1e-300)):
        raise AssertionError("square root of the Riesz diagonal does not recover the decay map")
    if np.any(riesz.diag < 0):
        raise AssertionError("Riesz restriction must be nonnegative")
    inv_log = -2.0 * decay.log_diag
    inv_log.setflags(write=False)
    return RieszMaps(riesz=riesz, riesz_inv_log_diag=inv_log, restriction=riesz)


def antidual_inner(u: HVector, v: HVector, decay: DecayOperator) -> float:
    """Pairing of functionals in the weakened (antidual) Gram weighting."""
    return weighted_inner(u, v, 2.0 * decay.log_diag)


class OperatorWeb:
    """Six conjugated evolutions at one time, on the margin-safe labels.

    Matrices are full-dimensional with columns zeroed outside the safe
    labels; per-label log weights are kept alongside for exact checks.
    Weight conventions (a = label age, L = log lambda):

      u_ext : 0
      w     : L(a+t) - L(a)
      v     : L(a) - L(a+t)
      x     : 2 L(a) + [L(a+t) - L(a)] - 2 L(a+t)   (composite route)
      y     : -L(a) + L(a+t)                        (composite route)
      z     : 2 L(a+t) - 2 L(a)                     (composite route)
    """

    NAMES = ("u_ext", "w", "v", "x", "y", "z")

    def __init__(self, decay: DecayOperator, t: int, safe_mask, log_weights, matrices):
        self.decay = decay
        self.system: CascadeSystem = decay.system
        self.t = int(t)
        self.safe_mask = safe_mask
        self.safe_labels = tuple(
            label for label, ok in zip(self.system.labels, safe_mask) if ok
        )
        self.log_weights = log_weights
        self.matrices = matrices

    def weight(self, name: str, label) -> float:
        """Weight carried by a safe label under the named evolution."""
        i = self.system.index_of(label)
        if not self.safe_mask[i]:
            raise MarginError(f"label {self.system.label_text(label)} is not t-margin safe")
        return float(np.exp(self.log_weights[name][i]))

    def matrix(self, name: str) -> np.ndarray:
        return self.matrices[name]

    def restricted(self, name: str) -> np.ndarray:
        """Compression of the named evolution to the safe labels."""
        safe = np.nonzero(self.safe_mask)[0]
        return self.matrices[name][np.ix_(safe, safe)]


def build_operator_web(decay: DecayOperator, t: int,
                       overflow_cap: float = LOG_WEIGHT_CAP) -> OperatorWeb:
    """Materialize the six evolutions at time t.

    Conjugations by the decay map and its square are composed in the
    log domain; a conjugation whose weights exceed ``overflow_cap`` in
    log magnitude is rejected by name rather than materialized as
    infinities.
    """
    if t < 0:
        raise ValueError("the web is built for t >= 0")
    system = decay.system
    safe = system.interior_mask(t)
    if not np.any(safe):
        raise MarginError(f"no labels admit a {t}-step margin on this window")
    ages = system.ages
    log_lam = decay.log_diag
    log_lam_shift = np.where(safe, decay.log_weight(np.where(safe, ages + t, ages)), np.nan)

    ratio = log_lam_shift - log_lam
    log_weights = {
        "u_ext": np.where(safe, 0.0, np.nan),
        "w": ratio,
        "v": log_lam - log_lam_shift,
        "x": 2.0 * log_lam + ratio - 2.0 * log_lam_shift,
        "y": -log_lam + log_lam_shift,
        "z": 2.0 * log_lam_shift - 2.0 * log_lam,
    }

    conjugation_names = {
        "v": "inverse conjugation by the antitransposed decay map (v)",
        "x": "Riesz conjugation of the contraction semigroup (x)",
    }
    for name, label in conjugation_names.items():
        peak = np.nanmax(log_weights[name])
        if peak > overflow_cap:
            raise MarginError(
                f"{label} is not materializable on this window: weights reach exp({peak:.1f})"
            )

    targets = system.step_indices(t)
    matrices = {}
    for name, lw in log_weights.items():
        mat = np.zeros((system.dim, system.dim))
        cols = np.nonzero(safe)[0]
        with np.errstate(under="ignore"):
            mat[targets[cols], cols] = np.exp(lw[cols])
        matrices[name] = mat
    return OperatorWeb(decay, t, safe, log_weights, matrices)


@dataclass(frozen=True)
class WitnessRecord:
    """A concrete basis label certifying that two evolutions differ."""

    label: str
    deviation: float


@dataclass(frozen=True)
class WebReport:
    """Mechanical verification record of the six-evolution relations.

    Parts: (1) v and x coincide, measured in the antidual operator
    metric; (2) the v-route traces decay monotonically, transported by
    the Riesz map; (3, 4, 5) witnesses separate v from u_ext, y from the
    plain step, and w from z; (6) z is conjugate to u_ext, checked both
    by spectrum agreement of the safe compressions and by the conjugacy
    route deviation.
    """

    t: int
    v_equals_x_deviation: float
    dual_markov_monotone: bool
    dual_markov_traces: tuple
    v_vs_u_witness: WitnessRecord
    y_vs_u_witness: WitnessRecord
    w_vs_z_witness: WitnessRecord
    z_spectrum_deviation: float
    z_conjugacy_deviation: float
    identity_tol: float = 1e-10
    witness_floor: float = 1e-6
    spectrum_tol: float = 1e-8

    @property
    def all_passed(self) -> bool:
        return (
            self.v_equals_x_deviation <= self.identity_tol
            and self.dual_markov_monotone
            and self.v_vs_u_witness.deviation >= self.witness_floor
            and self.y_vs_u_witness.deviation >= self.witness_floor
            and self.w_vs_z_witness.deviation >= self.witness_floor
            and self.z_spectrum_deviation <= self.spectrum_tol
            and self.z_conjugacy_deviation <= self.identity_tol
        )


def _best_witness(web: OperatorWeb, name_a: str, name_b: str) -> WitnessRecord:
    safe = np.nonzero(web.safe_mask)[0]
    with np.errstate(under="ignore"):
        dev = np.abs(
            np.exp(web.log_weights[name_a][safe]) - np.exp(web.log_weights[name_b][safe])
        )
    i = int(np.argmax(dev))
    label = web.system.labels[safe[i]]
    return WitnessRecord(label=web.system.label_text(label), deviation=float(dev[i]))


def _spectrum_deviation(web: OperatorWeb) -> float:
    za = np.linalg.eigvals(web.restricted("z"))
    ua = np.linalg.eigvals(web.restricted("u_ext"))
    za = np.sort_complex(za)
    ua = np.sort_complex(ua)
    return float(np.abs(za - ua).max()) if za.size else 0.0


def verify_web(web: OperatorWeb, max_steps: int = 3, seed: int = 0) -> WebReport:
    """Verify the six relations of the conjugated evolution web.

    The time must be positive: at t = 0 every evolution is the identity
    and the inequality parts are degenerate.
    """
    if web.t == 0:
        raise ValueError("t = 0 is degenerate for the witness parts; build the web at t >= 1")
    system = web.system
    decay = web.decay
    safe = np.nonzero(web.safe_mask)[0]

    diff = web.log_weights["x"][safe] - web.log_weights["v"][safe]
    v_equals_x = float(np.abs(np.expm1(diff)).max())

    # v-route traces, transported isometrically by the Riesz map: the
    # coefficient of age a after k blocks carries exp(L(a) + L(a+kt)).
    steps = min(max_steps, max((system.window.hi - system.window.lo) // web.t, 1))
    band = system.ages + steps * web.t <= system.window.hi
    rng = np.random.default_rng(seed)
    traces = []
    if np.any(band):
        f = np.where(band, rng.standard_normal(system.dim), 0.0)
        log_lam = decay.log_diag
        for k in range(steps + 1):
            shifted = decay.log_weight(system.ages + k * web.t * band.astype(int))
            logs = np.where(band, log_lam + shifted, -np.inf)
            with np.errstate(under="ignore"):
                trace = float(np.sqrt(np.sum(np.exp(2.0 * logs[band]) * f[band] ** 2)))
            traces.append(trace)
    monotone = all(b <= a for a, b in zip(traces, traces[1:]))

    report = WebReport(
        t=web.t,
        v_equals_x_deviation=v_equals_x,
        dual_markov_monotone=monotone,
        dual_markov_traces=tuple(traces),
        v_vs_u_witness=_best_witness(web, "v", "u_ext"),
        y_vs_u_witness=_best_witness(web, "y", "u_ext"),
        w_vs_z_witness=_best_witness(web, "w", "z"),
        z_spectrum_deviation=_spectrum_deviation(web),
        z_conjugacy_deviation=float(
            np.abs(
                np.expm1(
                    web.log_weights["z"][safe]
                    - 2.0 * (decay.log_weight(system.ages[safe] + web.t) - decay.log_diag[safe])
                )
            ).max()
        ),
    )
    return report
