"""Distances between persistence diagrams and their vector summaries.

The reference metric is the exact L_p q-Wasserstein distance, computed as a
min-cost perfect matching after augmenting each diagram with the diagonal
projections of the other's points.  Cheaper alternatives are the sliced
Wasserstein distance and plain L_p distances between summary vectors.
``distance_matrix`` assembles pairwise distances for a whole dataset under a
shared configuration and records how long the assembly took.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .diagram import distance_to_diagonal
from .errors import ParseError, ValidationError
from .summaries import (
    ImageConfig,
    ScaleGrid,
    landscape_vector,
    persistence_image,
    unit_weight,
    vab,
)

__all__ = [
    "WassersteinParams",
    "DistanceMatrix",
    "wasserstein",
    "wasserstein_matching",
    "sliced_wasserstein",
    "lp_vector_distance",
    "distance_matrix",
    "save_distance_matrix",
    "load_distance_matrix",
    "DISTANCE_METHODS",
]

DISTANCE_METHODS = ("w", "vab", "pl", "pi", "sw")


@dataclass(frozen=True)
class WassersteinParams:
    """p selects the norm on the plane (1, 2 or inf); q >= 1 is the outer exponent."""

    p: float = 1
    q: float = 1

    def __post_init__(self):
        if self.p not in (1, 2, math.inf):
            raise ValidationError(f"p must be 1, 2 or inf, got {self.p!r}")
        if self.q == math.inf:
            raise ValidationError("q = inf (bottleneck) is not supported")
        if not (isinstance(self.q, (int, float, np.integer, np.floating)) and self.q >= 1):
            raise ValidationError(f"q must be a real number >= 1, got {self.q!r}")


def _planar_norms(a, b, p):
    """(len(a), len(b)) matrix of ||a_i - b_j||_p in the plane."""
    diff = np.abs(a[:, None, :] - b[None, :, :])
    if p == 1:
        return diff.sum(axis=-1)
    if p == 2:
        return np.sqrt((diff ** 2).sum(axis=-1))
    return diff.max(axis=-1)


def _split_infinite(dgm):
    mask = dgm.finite_mask
    return dgm.points[mask], np.sort(dgm.births[~mask])


def _check_same_dim(d1, d2):
    if d1.hom_dim != d2.hom_dim:
        raise ValidationError(
            f"cannot compare diagrams of dimensions {d1.hom_dim} and {d2.hom_dim}"
        )


def _assignment(f1, f2, params):
    """Optimal assignment on the diagonal-augmented cost matrix.

    Rows are d1 points then projection slots for d2's points; columns are d2
    points then projection slots for d1's points.  A point's cost against any
    projection slot of its own side is its distance to the diagonal, so slots
    are interchangeable.
    """
    n1, n2 = f1.shape[0], f2.shape[0]
    size = n1 + n2
    cost = np.zeros((size, size))
    if n1 and n2:
        cost[:n1, :n2] = _planar_norms(f1, f2, params.p) ** params.q
    if n1:
        cost[:n1, n2:] = distance_to_diagonal(f1[:, 0], f1[:, 1], params.p)[:, None] ** params.q
    if n2:
        cost[n1:, :n2] = distance_to_diagonal(f2[:, 0], f2[:, 1], params.p)[None, :] ** params.q
    rows, cols = linear_sum_assignment(cost)
    return cost, rows, cols


def wasserstein(d1, d2, params=WassersteinParams()):
    """Exact L_p q-Wasserstein distance between two diagrams.

    Points with infinite death must be equal in number across the diagrams
    (otherwise the distance is +inf); they are matched among themselves in
    sorted birth order at cost |b1 - b2|^q, the convention that keeps the
    distance finite whenever possible.
    """
    _check_same_dim(d1, d2)
    f1, inf1 = _split_infinite(d1)
    f2, inf2 = _split_infinite(d2)
    if inf1.size != inf2.size:
        return math.inf
    total = float(np.sum(np.abs(inf1 - inf2) ** params.q))
    if f1.shape[0] or f2.shape[0]:
        cost, rows, cols = _assignment(f1, f2, params)
        total += float(cost[rows, cols].sum())
    return total ** (1.0 / params.q)


def wasserstein_matching(d1, d2, params=WassersteinParams()):
    """Distance together with one optimal matching realizing it.

    Returns (distance, pairs) where each pair is (i, j): i indexes d1's
    points or is None for the diagonal, and likewise j for d2.  Zero-cost
    projection-to-projection assignments are omitted.
    """
    _check_same_dim(d1, d2)
    fin1 = np.nonzero(d1.finite_mask)[0]
    fin2 = np.nonzero(d2.finite_mask)[0]
    iinf1 = np.nonzero(~d1.finite_mask)[0]
    iinf2 = np.nonzero(~d2.finite_mask)[0]
    if iinf1.size != iinf2.size:
        raise ValidationError(
            "no finite-cost matching: unequal numbers of infinite-death points"
        )
    pairs = []
    total = 0.0
    order1 = iinf1[np.argsort(d1.births[iinf1], kind="stable")]
    order2 = iinf2[np.argsort(d2.births[iinf2], kind="stable")]
    for i, j in zip(order1, order2):
        total += abs(d1.births[i] - d2.births[j]) ** params.q
        pairs.append((int(i), int(j)))
    f1 = d1.points[fin1]
    f2 = d2.points[fin2]
    n1, n2 = f1.shape[0], f2.shape[0]
    if n1 or n2:
        cost, rows, cols = _assignment(f1, f2, params)
        total += float(cost[rows, cols].sum())
        for r, c in zip(rows, cols):
            if r < n1 and c < n2:
                pairs.append((int(fin1[r]), int(fin2[c])))
            elif r < n1:
                pairs.append((int(fin1[r]), None))
            elif c < n2:
                pairs.append((None, int(fin2[c])))
    return total ** (1.0 / params.q), pairs


def sliced_wasserstein(d1, d2, n_directions=10):
    """Sliced Wasserstein distance between finite-death diagrams.

    Each diagram is augmented with the diagonal projections of the other's
    points, both augmented sets are projected onto n_directions lines at
    angles uniformly spaced in [0, pi), and the exact 1D 1-Wasserstein
    distance (sorted absolute differences) is averaged over the directions.
    """
    _check_same_dim(d1, d2)
    if not isinstance(n_directions, (int, np.integer)) or n_directions < 1:
        raise ValidationError(f"n_directions must be a positive integer, got {n_directions!r}")
    for dgm in (d1, d2):
        if not np.all(np.isfinite(dgm.deaths)):
            raise ValidationError(
                "sliced Wasserstein is undefined for infinite death values"
            )

    def diag_proj(pts):
        mid = (pts[:, 0] + pts[:, 1]) / 2.0
        return np.column_stack([mid, mid])

    a = np.concatenate([d1.points, diag_proj(d2.points)])
    b = np.concatenate([d2.points, diag_proj(d1.points)])
    if a.shape[0] == 0:
        return 0.0
    thetas = np.arange(n_directions) * (math.pi / n_directions)
    dirs = np.column_stack([np.cos(thetas), np.sin(thetas)])
    pa = np.sort(a @ dirs.T, axis=0)
    pb = np.sort(b @ dirs.T, axis=0)
    return float(np.abs(pa - pb).sum(axis=0).mean())


def lp_vector_distance(v1, v2, p=1):
    """L_p distance between two summary vectors of identical kind and grid."""
    if not v1.compatible_with(v2):
        raise ValidationError(
            f"incompatible summary vectors: {v1!r} with params {v1.params} vs "
            f"{v2!r} with params {v2.params}"
        )
    if not p >= 1:
        raise ValidationError(f"p must be >= 1, got {p!r}")
    diff = np.abs(v1.values - v2.values)
    if p == math.inf:
        return float(diff.max()) if diff.size else 0.0
    return float((diff ** p).sum() ** (1.0 / p))


class DistanceMatrix:
    """Symmetric nonnegative pairwise distances plus the config that made them."""

    __slots__ = ("entries", "method", "params", "elapsed_seconds")

    def __init__(self, entries, method, params, elapsed_seconds=0.0):
        E = np.asarray(entries, dtype=np.float64)
        if E.ndim != 2 or E.shape[0] != E.shape[1]:
            raise ValidationError(f"entries must be a square matrix, got shape {E.shape}")
        if method not in DISTANCE_METHODS:
            raise ValidationError(f"method must be one of {DISTANCE_METHODS}, got {method!r}")
        if np.any(np.diag(E) != 0):
            raise ValidationError("distance matrix must have a zero diagonal")
        if not np.allclose(E, E.T, rtol=0.0, atol=1e-12):
            raise ValidationError("distance matrix must be symmetric")
        if E.size and np.min(E) < 0:
            raise ValidationError("distances must be nonnegative")
        E = E.copy()
        E.setflags(write=False)
        object.__setattr__(self, "entries", E)
        object.__setattr__(self, "method", method)
        object.__setattr__(self, "params", dict(params))
        object.__setattr__(self, "elapsed_seconds", float(elapsed_seconds))

    def __setattr__(self, name, value):
        raise AttributeError("DistanceMatrix is immutable")

    @property
    def n(self):
        return self.entries.shape[0]

    def __repr__(self):
        return f"DistanceMatrix(n={self.n}, method={self.method!r})"


def _shared_range(diagrams):
    """[0, T] with T the largest finite death across the dataset (1.0 if none)."""
    top = 0.0
    for dgm in diagrams:
        mask = dgm.finite_mask
        if mask.any():
            top = max(top, float(dgm.deaths[mask].max()))
    return top if top > 0 else 1.0


def distance_matrix(diagrams, method, *, p=1, q=1, n_directions=10, grid_size=100,
                    image_cells=20, sigma=None, k=1, threads=1):
    """Pairwise distances for a dataset of diagrams under one configuration.

    Vector methods share a grid spanning [0, T] with T the largest finite
    death in the dataset; vectors are computed once per diagram and compared
    with the L_p distance.  Landscape and image methods truncate infinite
    deaths to T (vab keeps them; w handles them natively; sw rejects them).
    The persistence image uses an isotropic Gaussian whose sigma defaults to
    0.5 * (max persistence) / image_cells.  Wall-clock time for the whole
    assembly, vectorization included, lands in ``elapsed_seconds``.
    """
    diagrams = list(diagrams)
    if not diagrams:
        raise ValidationError("need at least one diagram")
    hom = diagrams[0].hom_dim
    for dgm in diagrams[1:]:
        if dgm.hom_dim != hom:
            raise ValidationError("all diagrams must share one homological dimension")
    if method not in DISTANCE_METHODS:
        raise ValidationError(f"method must be one of {DISTANCE_METHODS}, got {method!r}")
    if not isinstance(threads, (int, np.integer)) or threads < 1:
        raise ValidationError(f"threads must be a positive integer, got {threads!r}")

    start = time.perf_counter()
    n = len(diagrams)
    if method == "w":
        wp = WassersteinParams(p=p, q=q)
        params = {"p": p, "q": q}

        def pair(i, j):
            return wasserstein(diagrams[i], diagrams[j], wp)

    elif method == "sw":
        params = {"n_directions": n_directions}

        def pair(i, j):
            return sliced_wasserstein(diagrams[i], diagrams[j], n_directions)

    else:
        top = _shared_range(diagrams)
        if method == "vab":
            grid = ScaleGrid.linspace(0.0, top, grid_size)
            vectors = [vab(dgm, grid, unit_weight) for dgm in diagrams]
            params = {"p": p, "grid_size": grid_size, "range": [0.0, top]}
        elif method == "pl":
            grid = ScaleGrid.linspace(0.0, top, grid_size)
            vectors = [landscape_vector(dgm.truncate_deaths(top), k, grid)
                       for dgm in diagrams]
            params = {"p": p, "k": k, "grid_size": grid_size, "range": [0.0, top]}
        else:
            truncated = [dgm.truncate_deaths(top) for dgm in diagrams]
            pmax = max((t.max_persistence() for t in truncated), default=0.0)
            if pmax <= 0:
                pmax = 1.0
            if sigma is None:
                sigma = 0.5 * pmax / image_cells
            cfg = ImageConfig(ScaleGrid.linspace(0.0, top, image_cells + 1),
                              ScaleGrid.linspace(0.0, pmax, image_cells + 1),
                              sigma)
            vectors = [persistence_image(t, cfg) for t in truncated]
            params = {"p": p, "image_cells": image_cells, "sigma": sigma,
                      "range": [0.0, top], "persistence_range": [0.0, pmax]}

        def pair(i, j):
            return lp_vector_distance(vectors[i], vectors[j], p)

    entries = np.zeros((n, n))
    jobs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    if threads > 1 and jobs:
        with ThreadPoolExecutor(max_workers=int(threads)) as pool:
            for (i, j), val in zip(jobs, pool.map(lambda ij: pair(*ij), jobs)):
                entries[i, j] = entries[j, i] = val
    else:
        for i, j in jobs:
            entries[i, j] = entries[j, i] = pair(i, j)
    elapsed = time.perf_counter() - start
    return DistanceMatrix(entries, method, params, elapsed_seconds=elapsed)


def save_distance_matrix(dm, path_or_buf):
    """Write a distance matrix as CSV with a method/params comment header.

    The header carries only the configuration, not the timing, so identical
    inputs produce identical files.
    """
    meta = json.dumps({"method": dm.method, "n": dm.n, "params": dm.params},
                      sort_keys=True)
    lines = [f"# {meta}"]
    lines += [",".join(repr(float(x)) for x in row) for row in dm.entries]
    out = "\n".join(lines) + "\n"
    if hasattr(path_or_buf, "write"):
        path_or_buf.write(out)
    else:
        with open(path_or_buf, "w", encoding="utf-8") as fh:
            fh.write(out)


def load_distance_matrix(source):
    """Read a distance matrix written by :func:`save_distance_matrix`."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(str(source), "r", encoding="utf-8") as fh:
            text = fh.read()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("# "):
        raise ParseError("expected a '# {...}' metadata line")
    try:
        meta = json.loads(lines[0][2:])
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad metadata line: {exc}") from None
    try:
        entries = [[float(x) for x in ln.split(",")] for ln in lines[1:]]
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    return DistanceMatrix(entries, meta["method"], meta.get("params", {}))
