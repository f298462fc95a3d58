"""Vector summaries of persistence diagrams.

The central summary is the weighted Betti function

    beta(t) = sum_i w(b_i, d_i) * 1[b_i <= t < d_i],

a piecewise-constant function of the scale t.  Its vectorizations are the
vector of averaged Bettis (exact cell averages of beta over a scale grid),
pointwise Betti samples, persistence landscapes, and persistence images.
All summaries return a SummaryVector carrying enough metadata to refuse
comparisons between incompatible vectorizations.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import ndtr

from .diagram import PersistenceDiagram
from .errors import ParseError, ValidationError

__all__ = [
    "WeightFunction",
    "unit_weight",
    "persistence_weight",
    "ScaleGrid",
    "ImageConfig",
    "SummaryVector",
    "StabilityGap",
    "betti_eval",
    "vab",
    "betti_samples",
    "landscape_vector",
    "persistence_image",
    "stability_gap",
    "save_vector",
    "load_vector",
]

VECTOR_KINDS = ("vab", "betti-samples", "landscape", "image")


@dataclass(frozen=True)
class WeightFunction:
    """Point weight w(birth, death) with declared sup and gradient bounds.

    ``evaluator`` must accept broadcastable arrays of births and deaths and
    return an array of weights.  ``sup_bound`` bounds |w| and ``grad_bound``
    bounds the Euclidean norm of the gradient of w on the domain of interest;
    both feed the stability bound of :func:`stability_gap`.
    """

    evaluator: Callable
    sup_bound: float
    grad_bound: float

    def __post_init__(self):
        for name in ("sup_bound", "grad_bound"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValidationError(f"{name} must be finite and nonnegative, got {v}")

    def __call__(self, births, deaths):
        return np.asarray(self.evaluator(np.asarray(births, dtype=np.float64),
                                         np.asarray(deaths, dtype=np.float64)),
                          dtype=np.float64)


unit_weight = WeightFunction(lambda b, d: np.ones_like(b), 1.0, 0.0)


def persistence_weight(max_persistence):
    """w(b, d) = d - b, vanishing on the diagonal.

    ``max_persistence`` caps the weight on the domain in use and becomes the
    declared sup bound; the gradient of d - b has Euclidean norm sqrt(2)
    everywhere.
    """
    if not (math.isfinite(max_persistence) and max_persistence >= 0):
        raise ValidationError("max_persistence must be finite and nonnegative")
    return WeightFunction(lambda b, d: d - b, float(max_persistence), math.sqrt(2.0))


class ScaleGrid:
    """Strictly increasing scale values t_1 < ... < t_n, n >= 2.

    ``uniform`` is True when successive spacings agree to within 1e-12, in
    which case ``dt`` holds the common spacing.
    """

    __slots__ = ("values", "uniform", "dt")

    def __init__(self, values):
        v = np.asarray(values, dtype=np.float64)
        if v.ndim != 1 or v.size < 2:
            raise ValidationError(f"a scale grid needs at least 2 values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValidationError("scale values must be finite")
        diffs = np.diff(v)
        if np.any(diffs <= 0):
            raise ValidationError("scale values must be strictly increasing")
        v = v.copy()
        v.setflags(write=False)
        uniform = bool(diffs.max() - diffs.min() <= 1e-12)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "uniform", uniform)
        object.__setattr__(self, "dt", float(diffs.mean()) if uniform else None)

    def __setattr__(self, name, value):
        raise AttributeError("ScaleGrid is immutable")

    @classmethod
    def linspace(cls, start, stop, n):
        """Uniform grid of n points from start to stop inclusive."""
        if n < 2:
            raise ValidationError(f"grid size must be at least 2, got {n}")
        if not stop > start:
            raise ValidationError(f"grid needs stop > start, got [{start}, {stop}]")
        return cls(np.linspace(start, stop, int(n)))

    def __len__(self):
        return self.values.size

    def __eq__(self, other):
        if not isinstance(other, ScaleGrid):
            return NotImplemented
        return bool(np.array_equal(self.values, other.values))

    __hash__ = None

    def __repr__(self):
        return (f"ScaleGrid(n={len(self)}, range=({self.values[0]}, {self.values[-1]}), "
                f"uniform={self.uniform})")


@dataclass(frozen=True)
class ImageConfig:
    """Grid and kernel bandwidth of a persistence image.

    ``birth_grid`` gives the cell boundaries along the birth axis (x) and
    ``persistence_grid`` along the persistence axis (y); an n-point boundary
    grid yields n - 1 cells.  ``sigma`` is the standard deviation of the
    isotropic Gaussian placed at each transformed point.
    """

    birth_grid: ScaleGrid
    persistence_grid: ScaleGrid
    sigma: float

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise ValidationError(f"sigma must be positive, got {self.sigma}")

    @property
    def n_cells(self):
        return (len(self.birth_grid) - 1) * (len(self.persistence_grid) - 1)


class SummaryVector:
    """A vectorized diagram summary plus the metadata that defines it."""

    __slots__ = ("values", "kind", "grid", "params")

    def __init__(self, values, kind, grid, params=None):
        if kind not in VECTOR_KINDS:
            raise ValidationError(f"kind must be one of {VECTOR_KINDS}, got {kind!r}")
        v = np.asarray(values, dtype=np.float64)
        if v.ndim != 1:
            raise ValidationError(f"values must be one-dimensional, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValidationError("summary values must be finite")
        if kind == "image":
            if not isinstance(grid, ImageConfig):
                raise ValidationError("image vectors require an ImageConfig grid")
            expected = grid.n_cells
        else:
            if not isinstance(grid, ScaleGrid):
                raise ValidationError(f"{kind} vectors require a ScaleGrid")
            expected = len(grid) - 1 if kind == "vab" else len(grid)
        if v.size != expected:
            raise ValidationError(f"{kind} vector must have length {expected}, got {v.size}")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "params", dict(params) if params else {})

    def __setattr__(self, name, value):
        raise AttributeError("SummaryVector is immutable")

    def __len__(self):
        return self.values.size

    def __repr__(self):
        return f"SummaryVector(kind={self.kind!r}, length={len(self)})"

    def compatible_with(self, other):
        return (self.kind == other.kind
                and self.grid == other.grid
                and self.params == other.params)


def _weights_and_intervals(dgm, w):
    b, d = dgm.births, dgm.deaths
    return w(b, d), b, d


def betti_eval(dgm, w, t):
    """Weighted Betti function at a single scale t.

    Points with infinite death count for every t at or past their birth.
    """
    weights, b, d = _weights_and_intervals(dgm, w)
    mask = (b <= t) & (t < d)
    return float(weights[mask].sum())


def vab(dgm, grid, w=unit_weight):
    """Vector of averaged Bettis: exact cell averages of the Betti function.

    Component i is (1/dt_i) * integral of beta over [t_i, t_{i+1}], computed
    by exact interval-overlap arithmetic; beta is piecewise constant so no
    quadrature is involved.  Length is one less than the grid size.
    """
    weights, b, d = _weights_and_intervals(dgm, w)
    t = grid.values
    if b.size == 0:
        return SummaryVector(np.zeros(t.size - 1), "vab", grid)
    lo = np.maximum(b[:, None], t[None, :-1])
    hi = np.minimum(d[:, None], t[None, 1:])
    overlap = np.clip(hi - lo, 0.0, None)
    vals = (weights[:, None] * overlap).sum(axis=0) / np.diff(t)
    return SummaryVector(vals, "vab", grid)


def betti_samples(dgm, grid, w=unit_weight):
    """Pointwise Betti function samples at the grid values; length = grid size."""
    weights, b, d = _weights_and_intervals(dgm, w)
    t = grid.values
    if b.size == 0:
        return SummaryVector(np.zeros(t.size), "betti-samples", grid)
    mask = (b[:, None] <= t[None, :]) & (t[None, :] < d[:, None])
    vals = (weights[:, None] * mask).sum(axis=0)
    return SummaryVector(vals, "betti-samples", grid)


def _require_finite(dgm, what):
    if not np.all(np.isfinite(dgm.deaths)):
        raise ValidationError(
            f"{what} is undefined for infinite death values; truncate or drop them first"
        )


def landscape_vector(dgm, k, grid):
    """k-th persistence landscape sampled on the grid.

    The tent of a point (b, d) is min(t - b, d - t) clipped at 0; component i
    is the k-th largest tent value at t_i (0 when fewer than k tents are up).
    """
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise ValidationError(f"landscape order k must be a positive integer, got {k!r}")
    _require_finite(dgm, "a landscape")
    t = grid.values
    b, d = dgm.births, dgm.deaths
    if b.size < k:
        return SummaryVector(np.zeros(t.size), "landscape", grid, {"k": int(k)})
    tents = np.clip(np.minimum(t[None, :] - b[:, None], d[:, None] - t[None, :]), 0.0, None)
    # k-th largest along the point axis
    part = np.partition(tents, b.size - k, axis=0)[b.size - k]
    return SummaryVector(part, "landscape", grid, {"k": int(k)})


def persistence_image(dgm, cfg, w=None):
    """Persistence image: cell averages of a Gaussian persistence surface.

    Each point (b, d) maps to (b, d - b) and carries an isotropic Gaussian of
    standard deviation cfg.sigma weighted by w(b, d); the cell value is the
    exact average of the surface over the cell (product of 1D Gaussian CDF
    differences divided by cell area).  Cells are flattened row-major with
    the birth axis fastest.  The default weight is d - b, which vanishes on
    the diagonal.
    """
    _require_finite(dgm, "a persistence image")
    bx = cfg.birth_grid.values
    py = cfg.persistence_grid.values
    nx, ny = bx.size - 1, py.size - 1
    b, d = dgm.births, dgm.deaths
    if b.size == 0:
        return SummaryVector(np.zeros(nx * ny), "image", cfg)
    if w is None:
        w = persistence_weight(dgm.max_persistence())
    weights = w(b, d)
    pers = d - b
    cdf_x = ndtr((bx[None, :] - b[:, None]) / cfg.sigma)
    cdf_y = ndtr((py[None, :] - pers[:, None]) / cfg.sigma)
    mass_x = np.diff(cdf_x, axis=1)
    mass_y = np.diff(cdf_y, axis=1)
    cells = np.einsum("i,iy,ix->yx", weights, mass_y, mass_x)
    cells /= np.outer(np.diff(py), np.diff(bx))
    return SummaryVector(cells.ravel(), "image", cfg)


@dataclass(frozen=True)
class StabilityGap:
    """Exact L1 distance between two Betti functions next to its upper bound."""

    lhs: float
    rhs: float


def _betti_values_at(dgm, w, ts):
    weights, b, d = _weights_and_intervals(dgm, w)
    if b.size == 0:
        return np.zeros(ts.size)
    mask = (b[:, None] <= ts[None, :]) & (ts[None, :] < d[:, None])
    return (weights[:, None] * mask).sum(axis=0)


def stability_gap(d1, d2, w=unit_weight, length_bound=None):
    """Exact ||beta1 - beta2||_L1 and its Wasserstein upper bound.

    The bound is sup|w| * d11 + L * sup|grad w| * d21, with L at least the
    largest persistence across both diagrams (that maximum by default).  The
    difference of two piecewise-constant Betti functions is integrated
    exactly by sweeping the merged breakpoints.
    """
    _require_finite(d1, "the stability bound")
    _require_finite(d2, "the stability bound")
    max_pers = max(d1.max_persistence(), d2.max_persistence())
    if length_bound is None:
        length_bound = max_pers
    elif length_bound < max_pers:
        raise ValidationError(
            f"length_bound {length_bound} is below the max persistence {max_pers}"
        )
    bps = np.unique(np.concatenate([d1.points.ravel(), d2.points.ravel()]))
    if bps.size < 2:
        lhs = 0.0
    else:
        mids = (bps[:-1] + bps[1:]) / 2.0
        delta = _betti_values_at(d1, w, mids) - _betti_values_at(d2, w, mids)
        lhs = float(np.abs(delta) @ np.diff(bps))
    from .distances import WassersteinParams, wasserstein

    rhs = w.sup_bound * wasserstein(d1, d2, WassersteinParams(p=1, q=1))
    if w.grad_bound > 0:
        rhs += length_bound * w.grad_bound * wasserstein(d1, d2, WassersteinParams(p=2, q=1))
    return StabilityGap(lhs=lhs, rhs=float(rhs))


def _grid_to_json(grid):
    return [float(x) for x in grid.values]


def _vector_metadata(vec):
    meta = {"kind": vec.kind}
    if vec.kind == "image":
        meta["birth_grid"] = _grid_to_json(vec.grid.birth_grid)
        meta["persistence_grid"] = _grid_to_json(vec.grid.persistence_grid)
        meta["sigma"] = float(vec.grid.sigma)
    else:
        meta["grid"] = _grid_to_json(vec.grid)
    if vec.params:
        meta["params"] = {k: vec.params[k] for k in sorted(vec.params)}
    return meta


def save_vector(vec, path_or_buf):
    """Write a summary vector as CSV: one metadata comment line, one value row."""
    meta = json.dumps(_vector_metadata(vec), sort_keys=True)
    out = f"# {meta}\n" + ",".join(repr(float(x)) for x in vec.values) + "\n"
    if hasattr(path_or_buf, "write"):
        path_or_buf.write(out)
    else:
        with open(path_or_buf, "w", encoding="utf-8") as fh:
            fh.write(out)


def load_vector(source):
    """Read a summary vector written by :func:`save_vector`."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(str(source), "r", encoding="utf-8") as fh:
            text = fh.read()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) != 2 or not lines[0].startswith("# "):
        raise ParseError("expected one '# {...}' metadata line and one value row")
    try:
        meta = json.loads(lines[0][2:])
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad metadata line: {exc}") from None
    try:
        values = [float(x) for x in lines[1].split(",")]
    except ValueError as exc:
        raise ParseError(str(exc), line=2) from None
    kind = meta.get("kind")
    if kind == "image":
        grid = ImageConfig(ScaleGrid(meta["birth_grid"]),
                           ScaleGrid(meta["persistence_grid"]),
                           meta["sigma"])
    else:
        grid = ScaleGrid(meta.get("grid", []))
    return SummaryVector(values, kind, grid, meta.get("params"))
