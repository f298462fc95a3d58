"""Persistence diagrams: data model, CSV interchange, noise injection.

A diagram is a multiset of (birth, death) points for one homological
dimension.  Death values may be +inf (features alive at the end of the
filtration); births are always finite.  Points are stored as rows of a
read-only float64 array, so duplicates are preserved.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParseError, ValidationError

__all__ = [
    "PersistenceDiagram",
    "NoiseSpec",
    "load_diagrams",
    "save_diagrams",
    "perturb_diagram",
    "distance_to_diagonal",
]

CSV_HEADER = ("dimension", "birth", "death")


class PersistenceDiagram:
    """Multiset of (birth, death) points of one homological dimension.

    Parameters
    ----------
    hom_dim : int
        Homological dimension of the features (0 components, 1 loops, ...).
    points : array-like, shape (n, 2)
        Birth/death pairs; death may be ``inf``.  Births must be finite and
        never exceed deaths.
    """

    __slots__ = ("hom_dim", "points")

    def __init__(self, hom_dim, points):
        if not isinstance(hom_dim, (int, np.integer)) or hom_dim < 0:
            raise ValidationError(f"hom_dim must be a nonnegative integer, got {hom_dim!r}")
        pts = np.asarray(points, dtype=np.float64)
        if pts.size == 0:
            pts = pts.reshape(0, 2)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValidationError(f"points must have shape (n, 2), got {pts.shape}")
        births, deaths = pts[:, 0], pts[:, 1]
        if not np.all(np.isfinite(births)):
            raise ValidationError("birth values must be finite")
        if np.any(np.isnan(deaths)):
            raise ValidationError("death values must not be NaN")
        if np.any(births > deaths):
            bad = int(np.argmax(births > deaths))
            raise ValidationError(
                f"birth > death at point {bad}: ({births[bad]}, {deaths[bad]})"
            )
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "hom_dim", int(hom_dim))
        object.__setattr__(self, "points", pts)

    def __setattr__(self, name, value):
        raise AttributeError("PersistenceDiagram is immutable")

    def __len__(self):
        return self.points.shape[0]

    def __repr__(self):
        return f"PersistenceDiagram(hom_dim={self.hom_dim}, n_points={len(self)})"

    def __eq__(self, other):
        """Multiset equality: same dimension and same points up to reordering."""
        if not isinstance(other, PersistenceDiagram):
            return NotImplemented
        if self.hom_dim != other.hom_dim or len(self) != len(other):
            return False
        return bool(np.array_equal(_canonical(self.points), _canonical(other.points)))

    __hash__ = None

    @property
    def births(self):
        return self.points[:, 0]

    @property
    def deaths(self):
        return self.points[:, 1]

    @property
    def finite_mask(self):
        return np.isfinite(self.deaths)

    def finite_part(self):
        """Diagram restricted to points with finite death."""
        return PersistenceDiagram(self.hom_dim, self.points[self.finite_mask])

    def max_persistence(self):
        """Largest finite death - birth (0.0 for an empty/all-infinite diagram)."""
        mask = self.finite_mask
        if not mask.any():
            return 0.0
        p = self.deaths[mask] - self.births[mask]
        return float(p.max())

    def truncate_deaths(self, cutoff):
        """Replace infinite deaths by ``cutoff``; finite deaths are left alone."""
        pts = np.array(self.points)
        pts[~np.isfinite(pts[:, 1]), 1] = cutoff
        return PersistenceDiagram(self.hom_dim, pts)


def _canonical(points):
    if points.shape[0] == 0:
        return points
    order = np.lexsort((points[:, 1], points[:, 0]))
    return points[order]


@dataclass(frozen=True)
class NoiseSpec:
    """Additive Gaussian coordinate noise with a reproducible seed."""

    sigma: float
    seed: int = 0

    def __post_init__(self):
        if not (self.sigma >= 0):
            raise ValidationError(f"sigma must be nonnegative, got {self.sigma}")


def perturb_diagram(dgm, noise):
    """Add i.i.d. Gaussian noise to both coordinates of each finite point.

    A noisy point that falls below the diagonal (birth' > death') is replaced
    by (birth', birth'), so no output point violates birth <= death.  Points
    with infinite death are returned untouched.  Deterministic given
    ``noise.seed``.
    """
    if noise.sigma == 0:
        return dgm
    rng = np.random.default_rng(noise.seed)
    pts = np.array(dgm.points)
    mask = np.isfinite(pts[:, 1])
    pts[mask] += rng.normal(0.0, noise.sigma, size=(int(mask.sum()), 2))
    below = mask & (pts[:, 0] > pts[:, 1])
    pts[below, 1] = pts[below, 0]
    return PersistenceDiagram(dgm.hom_dim, pts)


def distance_to_diagonal(birth, death, p=2):
    """Distance from a finite point (or arrays of points) to the diagonal b = d.

    For the L_p norm this is (d - b) when p = 1, (d - b)/sqrt(2) when p = 2,
    and (d - b)/2 when p = inf.
    """
    birth = np.asarray(birth, dtype=np.float64)
    death = np.asarray(death, dtype=np.float64)
    if not np.all(np.isfinite(death)):
        raise ValidationError("distance_to_diagonal is undefined for infinite death values")
    gap = death - birth
    if p == 1:
        out = gap
    elif p == 2:
        out = gap / math.sqrt(2.0)
    elif p == math.inf:
        out = gap / 2.0
    else:
        raise ValidationError(f"norm selector must be 1, 2 or inf, got {p!r}")
    return out if out.ndim else float(out)


def _format(x):
    if math.isinf(x):
        return "inf"
    return repr(float(x))


def load_diagrams(source):
    """Read diagram CSV (header ``dimension,birth,death``) into diagrams.

    ``source`` may be a path, a text stream, or the CSV content itself.
    Returns a dict mapping each homological dimension present in the file to
    its PersistenceDiagram.  Row order is irrelevant; duplicate rows are kept.
    """
    if hasattr(source, "read"):
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode("utf-8")
    else:
        s = str(source)
        if "\n" in s:
            text = s
        else:
            with open(s, "r", encoding="utf-8") as fh:
                text = fh.read()
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty input, expected header dimension,birth,death", line=1)
    if tuple(h.strip() for h in header) != CSV_HEADER:
        raise ParseError(f"expected header {','.join(CSV_HEADER)}, got {','.join(header)}", line=1)
    by_dim = {}
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 3:
            raise ParseError(f"expected 3 fields, got {len(row)}", line=lineno)
        try:
            dim = int(row[0])
            birth = float(row[1])
            death = float(row[2])
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno) from None
        if dim < 0:
            raise ParseError(f"negative dimension {dim}", line=lineno)
        if not math.isfinite(birth):
            raise ValidationError(f"line {lineno}: birth must be finite, got {birth}")
        if birth > death:
            raise ValidationError(f"line {lineno}: birth {birth} exceeds death {death}")
        by_dim.setdefault(dim, []).append((birth, death))
    return {dim: PersistenceDiagram(dim, pts) for dim, pts in sorted(by_dim.items())}


def save_diagrams(diagrams, path_or_buf):
    """Write diagrams as diagram CSV with full round-trip float precision.

    ``diagrams`` is a PersistenceDiagram, an iterable of them, or a dict as
    returned by :func:`load_diagrams`.  Rows are written sorted by
    (dimension, birth, death) so output is canonical.
    """
    if isinstance(diagrams, PersistenceDiagram):
        diagrams = [diagrams]
    elif isinstance(diagrams, dict):
        diagrams = [diagrams[k] for k in sorted(diagrams)]
    rows = []
    for dgm in diagrams:
        for birth, death in _canonical(dgm.points):
            rows.append((dgm.hom_dim, birth, death))
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    lines = [",".join(CSV_HEADER)]
    lines += [f"{d},{_format(b)},{_format(dth)}" for d, b, dth in rows]
    out = "\n".join(lines) + "\n"
    if hasattr(path_or_buf, "write"):
        path_or_buf.write(out)
    else:
        with open(path_or_buf, "w", encoding="utf-8") as fh:
            fh.write(out)
