"""Finite-window cascades carrying an age grading.

Two models are realized over an integer age window [lo, hi]:

* the abstract bilateral shift, truncated with an open boundary, and
* the dyadic baker transformation of the unit square in its
  Rademacher/Walsh product basis.

In both, the one-step operator ``U`` raises age by exactly one and
truncates at the top of the window, the age projectors ``E_n`` grade
the fluctuation space, and the internal-time operator ``T = sum n E_n``
satisfies the step covariance ``U^t' T U^t = T + t`` on every basis
label whose t-step image stays inside the window.  The open boundary is
deliberate: a cyclic wrap would restore global unitarity but break the
covariance at the seam, so every verification instead carries a
support-margin precondition.

Walsh basis convention for the baker model: coordinates i in [-m, m]
index binary digits of a point of the unit square, digits i >= 1 giving
the x expansion and digits i <= 0 the y expansion.  A basis label is a
nonempty subset S of coordinates, realized pointwise as the product of
the Rademacher signs of its digits, and its age is max(S), so the
one-step index shift S -> S+1 raises age by one.  The constant function
(empty subset) is kept apart as the equilibrium component.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .hilbert import BasisMismatchError, HOperator, HVector

__all__ = [
    "MarginError",
    "AgeWindow",
    "GridDensity",
    "StateVector",
    "CascadeSystem",
    "build_shift_cascade",
    "build_baker_cascade",
    "koopman_power",
    "verify_covariance",
    "verify_imprimitivity",
    "walsh_to_grid",
    "grid_to_walsh",
    "system_to_json",
    "system_from_json",
]

BAKER_SIZE_CAP = 6


class MarginError(ValueError):
    """A vector's support leaves the window before the requested time."""


@dataclass(frozen=True)
class AgeWindow:
    """Inclusive integer age range; must contain age zero and both signs."""

    lo: int
    hi: int

    def __post_init__(self):
        if not (isinstance(self.lo, int) and isinstance(self.hi, int)):
            raise ValueError("window bounds must be integers")
        if not (self.lo < 0 < self.hi):
            raise ValueError(f"window must satisfy lo < 0 < hi, got [{self.lo}, {self.hi}]")

    @property
    def ages(self) -> range:
        return range(self.lo, self.hi + 1)

    def __contains__(self, n) -> bool:
        return self.lo <= n <= self.hi


@dataclass(frozen=True)
class GridDensity:
    """Real cell values over the dyadic grid of the unit square."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=float)
        if arr.ndim != 2:
            raise ValueError("grid values must form a 2-dimensional array")
        if not np.all(np.isfinite(arr)):
            raise ValueError("grid values must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def mass(self) -> float:
        """Integral against the uniform measure (mean of the cell values)."""
        return float(self.values.mean())


@dataclass(frozen=True)
class StateVector:
    """Equilibrium scalar plus the fluctuation coefficients.

    The constant function is stored apart from the fluctuation vector,
    so block transforms can fix it exactly.
    """

    equilibrium: float
    fluct: HVector


class CascadeSystem:
    """A finite-window realization of (U, {E_n}, T).

    Instances are immutable after construction.  Labels are ages (ints)
    for the shift model and frozensets of coordinates for the baker
    model, ordered age-major.  Dense matrices are materialized lazily;
    the structural step map is the primary representation, so the
    permutation action stays exact.
    """

    def __init__(self, kind, window, labels, ages, step, basis_id, m=None, masks=None):
        self.kind = kind
        self.window = window
        self.labels = tuple(labels)
        ages = np.asarray(ages, dtype=np.int64)
        ages.setflags(write=False)
        self.ages = ages
        step = np.asarray(step, dtype=np.int64)
        step.setflags(write=False)
        self._step = step
        self.basis_id = basis_id
        self.m = m
        self._masks = masks
        self._index = {label: i for i, label in enumerate(self.labels)}

    # -- basic queries -------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.labels)

    def index_of(self, label) -> int:
        if isinstance(label, (set, list, tuple)):
            label = frozenset(label)
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"{label!r} is not a basis label of {self.basis_id}") from None

    def age_of(self, label) -> int:
        return int(self.ages[self.index_of(label)])

    def basis_vector(self, label) -> HVector:
        c = np.zeros(self.dim)
        c[self.index_of(label)] = 1.0
        return HVector(c, self.basis_id)

    def interior_mask(self, t: int) -> np.ndarray:
        """Boolean mask of labels whose t-step image stays inside the window."""
        if t < 0:
            raise ValueError("margins are defined for t >= 0")
        return self.ages + t <= self.window.hi

    def interior_labels(self, t: int) -> tuple:
        mask = self.interior_mask(t)
        return tuple(label for label, ok in zip(self.labels, mask) if ok)

    def step_indices(self, t: int) -> np.ndarray:
        """Index map of U^t on labels; -1 where the image leaves the window."""
        if t < 0:
            raise ValueError("the step map is defined for t >= 0")
        idx = np.arange(self.dim, dtype=np.int64)
        for _ in range(t):
            alive = idx >= 0
            idx[alive] = self._step[idx[alive]]
        return idx

    # -- dense operators ------------------------------------------------

    @cached_property
    def U(self) -> HOperator:
        """One-step operator; an exact permutation on interior labels."""
        mat = np.zeros((self.dim, self.dim))
        for col, row in enumerate(self._step):
            if row >= 0:
                mat[row, col] = 1.0
        return HOperator(mat, self.basis_id)

    @cached_property
    def T(self) -> HOperator:
        """Internal-time operator, diagonal with the label ages."""
        return HOperator.diagonal(self.ages.astype(float), self.basis_id)

    def projector(self, delta) -> HOperator:
        """Orthogonal projector onto the labels whose age lies in ``delta``."""
        if isinstance(delta, (int, np.integer)):
            delta = (int(delta),)
        delta = set(int(n) for n in delta)
        for n in delta:
            if n not in self.window:
                raise ValueError(f"age {n} is outside the window [{self.window.lo}, {self.window.hi}]")
        mask = np.isin(self.ages, sorted(delta)).astype(float)
        return HOperator.diagonal(mask, self.basis_id)

    def label_text(self, label) -> str:
        if isinstance(label, frozenset):
            return "{" + ",".join(str(i) for i in sorted(label)) + "}"
        return str(label)


# -- construction -------------------------------------------------------


def build_shift_cascade(window: AgeWindow) -> CascadeSystem:
    """Truncated bilateral shift: one basis vector per age in the window.

    ``U e_n = e_{n+1}`` below the top age and ``U e_hi = 0`` (open
    boundary); ``E({n})`` is the rank-one projector onto ``e_n`` and
    ``T e_n = n e_n``.
    """
    if window.hi - window.lo < 2:
        raise ValueError("window too small: need hi - lo >= 2")
    labels = list(window.ages)
    ages = np.array(labels, dtype=np.int64)
    step = np.array([i + 1 if n < window.hi else -1 for i, n in enumerate(labels)], dtype=np.int64)
    basis_id = f"shift[{window.lo},{window.hi}]"
    return CascadeSystem("shift", window, labels, ages, step, basis_id)


def build_baker_cascade(m: int) -> CascadeSystem:
    """Dyadic baker model over coordinates [-m, m] in the Walsh basis.

    Basis labels are the nonempty coordinate subsets S with age max(S);
    the one-step action is the index shift S -> S+1, truncated when the
    shifted subset leaves the window.  The age-n eigenspace has
    dimension 2**(n+m).
    """
    if not isinstance(m, int) or m < 1:
        raise ValueError(f"baker size must be a positive integer, got {m!r}")
    if m > BAKER_SIZE_CAP:
        raise ValueError(f"m exceeds desk-scale cap {BAKER_SIZE_CAP}")
    window = AgeWindow(-m, m)
    n_coords = 2 * m + 1
    full = 1 << n_coords
    masks = np.arange(1, full, dtype=np.int64)
    # age of a mask is its highest set bit, recentred by -m
    ages = np.floor(np.log2(masks)).astype(np.int64) - m
    order = np.lexsort((masks, ages))
    masks = masks[order]
    ages = ages[order]
    position = {int(mask): i for i, mask in enumerate(masks)}
    step = np.array(
        [position[int(mask) << 1] if (int(mask) << 1) < full else -1 for mask in masks],
        dtype=np.int64,
    )
    labels = [frozenset(j - m for j in range(n_coords) if mask >> j & 1) for mask in masks]
    basis_id = f"baker(m={m})"
    masks.setflags(write=False)
    return CascadeSystem("baker", window, labels, ages, step, basis_id, m=m, masks=masks)


# -- dynamics ------------------------------------------------------------


def _support_indices(v: HVector) -> np.ndarray:
    return np.nonzero(v.coeffs)[0]


def koopman_power(system: CascadeSystem, v: HVector, t: int) -> HVector:
    """Apply the one-step operator t times to a margin-supported vector.

    The action is a pure relabelling, so inner products between vectors
    jointly supported in the t-margin are preserved: the summands are
    identical floats, reordered at most by the label permutation.
    """
    if t < 0:
        raise ValueError("the step semigroup is defined for t >= 0")
    if v.basis_id != system.basis_id:
        raise BasisMismatchError(f"vector over {v.basis_id!r} does not belong to {system.basis_id!r}")
    support = _support_indices(v)
    offending = support[system.ages[support] + t > system.window.hi]
    if offending.size:
        names = ", ".join(system.label_text(system.labels[i]) for i in offending[:8])
        raise MarginError(f"support leaves the window within {t} steps at labels: {names}")
    out = np.zeros(system.dim)
    idx = system.step_indices(t)
    keep = support[idx[support] >= 0]
    out[idx[keep]] = v.coeffs[keep]
    return HVector(out, system.basis_id)


def verify_covariance(system: CascadeSystem, t: int) -> float:
    """Deviation of the internal-time covariance at time t.

    Returns the maximum, over basis vectors inside the t-margin, of
    ``|| (U^t)' T U^t e - (T + t) e ||``.  Both sides are permutation
    and small-integer arithmetic, so a correct construction returns
    exactly 0.0.
    """
    if t < 0:
        raise ValueError("covariance is checked for t >= 0")
    ut = np.linalg.matrix_power(system.U.matrix, t)
    lhs = ut.T @ system.T.matrix @ ut
    rhs = system.T.matrix + t * np.eye(system.dim)
    diff = lhs - rhs
    cols = system.interior_mask(t)
    if not np.any(cols):
        return 0.0
    return float(np.abs(diff[:, cols]).max())


def verify_imprimitivity(system: CascadeSystem, delta, t: int) -> float:
    """Deviation of the covariant transport of age projectors at time t.

    Conjugating by t forward steps carries the projector for the ages
    ``delta + t`` onto the projector for ``delta``; this orientation is
    the one compatible with the internal-time covariance ``T -> T + t``.
    Requires ``delta`` and ``delta + t`` inside the window, and then
    holds exactly as a matrix identity, with no margin caveat.
    """
    if t < 0:
        raise ValueError("imprimitivity is checked for t >= 0")
    if isinstance(delta, (int, np.integer)):
        delta = (int(delta),)
    delta = sorted(int(n) for n in delta)
    shifted = [n + t for n in delta]
    lhs_proj = system.projector(shifted)
    rhs_proj = system.projector(delta)
    ut = np.linalg.matrix_power(system.U.matrix, t)
    lhs = ut.T @ lhs_proj.matrix @ ut
    return float(np.abs(lhs - rhs_proj.matrix).max())


# -- Walsh / grid realization --------------------------------------------


def _fwht(values: np.ndarray) -> np.ndarray:
    """Walsh-Hadamard transform in natural (bitmask) ordering.

    Output index s receives sum_c (-1)**popcount(s & c) input[c]; the
    transform is its own inverse up to division by the length.
    """
    a = np.array(values, dtype=float)
    n = a.shape[0]
    if n & (n - 1):
        raise ValueError("transform length must be a power of two")
    h = 1
    while h < n:
        a = a.reshape(-1, 2, h)
        x = a[:, 0, :].copy()
        y = a[:, 1, :].copy()
        a[:, 0, :] = x + y
        a[:, 1, :] = x - y
        a = a.reshape(n)
        h *= 2
    return a


def _require_baker(system: CascadeSystem):
    if system.kind != "baker":
        raise ValueError("grid realization is only available for baker systems")


def _grid_shape(system: CascadeSystem):
    # y carries digits for coordinates -m..0, x for coordinates 1..m
    return 1 << (system.m + 1), 1 << system.m


def _cell_coordinates(system: CascadeSystem):
    """Row/column of each cell bitmask on the dyadic grid.

    Bit j of a cell mask is the binary digit for coordinate i = j - m.
    Digits i <= 0 spell y (digit i contributing 2**(m+i)) and digits
    i >= 1 spell x most-significant-first (contributing 2**(m-i)).
    """
    m = system.m
    cells = np.arange(1 << (2 * m + 1))
    iy = cells & ((1 << (m + 1)) - 1)
    ix = np.zeros_like(cells)
    for i in range(1, m + 1):
        bit = cells >> (i + m) & 1
        ix |= bit << (m - i)
    return iy, ix


def walsh_to_grid(system: CascadeSystem, state: StateVector) -> GridDensity:
    """Evaluate a Walsh expansion pointwise on the dyadic cells.

    The transform is orthogonal up to the fixed cell-count
    normalization, so the grid/coefficient round trip is exact for
    dyadic data and accurate to round-off otherwise.
    """
    _require_baker(system)
    if state.fluct.basis_id != system.basis_id:
        raise BasisMismatchError("state does not belong to this baker system")
    full = np.zeros(1 << (2 * system.m + 1))
    full[0] = state.equilibrium
    full[system._masks] = state.fluct.coeffs
    pointwise = _fwht(full)
    ny, nx = _grid_shape(system)
    iy, ix = _cell_coordinates(system)
    grid = np.zeros((ny, nx))
    grid[iy, ix] = pointwise
    return GridDensity(grid)


def grid_to_walsh(system: CascadeSystem, grid: GridDensity) -> StateVector:
    """Walsh coefficients (and equilibrium mean) of a grid density."""
    _require_baker(system)
    ny, nx = _grid_shape(system)
    if grid.values.shape != (ny, nx):
        raise ValueError(f"grid shape {grid.values.shape} does not match {(ny, nx)}")
    iy, ix = _cell_coordinates(system)
    flat = grid.values[iy, ix]
    coeffs = _fwht(flat) / (ny * nx)
    return StateVector(float(coeffs[0]), HVector(coeffs[system._masks], system.basis_id))


# -- serialization --------------------------------------------------------


def system_to_json(system: CascadeSystem) -> str:
    """Serialize for fixture reuse: kind, window, labels, U and T matrices."""
    labels = [sorted(l) if isinstance(l, frozenset) else l for l in system.labels]
    doc = {
        "kind": system.kind,
        "window": {"lo": system.window.lo, "hi": system.window.hi},
        "m": system.m,
        "basis_labels": labels,
        "U": system.U.matrix.tolist(),
        "T": system.T.matrix.tolist(),
    }
    return json.dumps(doc, sort_keys=True)


def system_from_json(text: str) -> CascadeSystem:
    """Rebuild a serialized system and verify it against the document."""
    doc = json.loads(text)
    if doc["kind"] == "shift":
        system = build_shift_cascade(AgeWindow(doc["window"]["lo"], doc["window"]["hi"]))
    elif doc["kind"] == "baker":
        system = build_baker_cascade(doc["m"])
    else:
        raise ValueError(f"unknown system kind {doc['kind']!r}")
    labels = [sorted(l) if isinstance(l, frozenset) else l for l in system.labels]
    if labels != doc["basis_labels"]:
        raise ValueError("stored basis labels do not match the reconstruction")
    if not np.array_equal(system.U.matrix, np.array(doc["U"])):
        raise ValueError("stored step matrix does not match the reconstruction")
    if not np.array_equal(system.T.matrix, np.array(doc["T"])):
        raise ValueError("stored time operator does not match the reconstruction")
    return system
