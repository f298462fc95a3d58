"""Persistent homology via boundary-matrix reduction over GF(2).

Simplices are totally ordered by (filtration value, dimension, vertex order),
so faces always precede cofaces.  Columns are reduced top dimension first
with clearing: once a column pairs with a pivot, the pivot's own column is
known to be zero and is skipped.  Pairs with equal birth and death values are
dropped; unpaired simplices yield features with infinite death.
"""

from __future__ import annotations

import numpy as np
from numba import njit
from numba.typed import List as TypedList

from .diagram import PersistenceDiagram
from .errors import ValidationError

__all__ = ["compute_persistence"]


@njit(cache=True)
def _symdiff(a, b):
    # merge of two sorted index arrays, keeping entries seen an odd number of times
    out = np.empty(a.size + b.size, np.int64)
    i = j = k = 0
    while i < a.size and j < b.size:
        if a[i] < b[j]:
            out[k] = a[i]
            i += 1
            k += 1
        elif a[i] > b[j]:
            out[k] = b[j]
            j += 1
            k += 1
        else:
            i += 1
            j += 1
    while i < a.size:
        out[k] = a[i]
        i += 1
        k += 1
    while j < b.size:
        out[k] = b[j]
        j += 1
        k += 1
    return out[:k].copy()


@njit(cache=True)
def _reduce(col_ptr, col_idx, dims, top_dim):
    n = col_ptr.size - 1
    cols = TypedList()
    for p in range(n):
        cols.append(col_idx[col_ptr[p]:col_ptr[p + 1]].copy())
    low_inv = np.full(n, -1, np.int64)
    cleared = np.zeros(n, np.bool_)
    negative = np.zeros(n, np.bool_)
    for d in range(top_dim, 0, -1):
        for p in range(n):
            if dims[p] != d or cleared[p]:
                continue
            col = cols[p]
            while col.size > 0:
                q = low_inv[col[col.size - 1]]
                if q < 0:
                    break
                col = _symdiff(col, cols[q])
            cols[p] = col
            if col.size > 0:
                low = col[col.size - 1]
                low_inv[low] = p
                cleared[low] = True
                negative[p] = True
    return low_inv, cleared, negative


def _global_order(filt):
    """Flatten all simplices into one filtration-compatible total order."""
    counts = filt.counts
    offsets = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
    n = int(offsets[-1])
    dims_flat = np.concatenate(
        [np.full(c, d, dtype=np.int64) for d, c in enumerate(counts)]
    )
    values_flat = np.concatenate([filt.values(d) for d in range(len(counts))])
    local_flat = np.concatenate([np.arange(c, dtype=np.int64) for c in counts])
    order = np.lexsort((local_flat, dims_flat, values_flat))
    gpos = np.empty(n, dtype=np.int64)
    gpos[order] = np.arange(n, dtype=np.int64)
    return offsets, order, gpos, dims_flat[order], values_flat[order]


def compute_persistence(filt, max_hom_dim=None):
    """Persistence diagrams of a filtration, one per homological dimension.

    Returns a list of PersistenceDiagram for dimensions 0..max_hom_dim
    (default: the filtration's top simplex dimension).  Zero-persistence
    pairs are dropped; classes alive at the end get death = inf.
    """
    top = filt.dimension
    if max_hom_dim is None:
        max_hom_dim = top
    if not isinstance(max_hom_dim, (int, np.integer)) or max_hom_dim < 0:
        raise ValidationError(f"max_hom_dim must be a nonnegative integer, got {max_hom_dim!r}")
    if max_hom_dim > top:
        raise ValidationError(
            f"max_hom_dim {max_hom_dim} exceeds the filtration dimension {top}"
        )
    offsets, order, gpos, dims_g, values_g = _global_order(filt)
    n = values_g.size

    col_counts = np.zeros(n, dtype=np.int64)
    for d in range(1, top + 1):
        col_counts[gpos[offsets[d]:offsets[d + 1]]] = d + 1
    col_ptr = np.concatenate([[0], np.cumsum(col_counts)]).astype(np.int64)
    col_idx = np.empty(int(col_ptr[-1]), dtype=np.int64)
    for d in range(1, top + 1):
        faces_local = filt.faces(d)
        faces_g = np.sort(gpos[offsets[d - 1] + faces_local], axis=1)
        starts = col_ptr[gpos[offsets[d]:offsets[d + 1]]]
        col_idx[starts[:, None] + np.arange(d + 1)] = faces_g

    low_inv, cleared, negative = _reduce(col_ptr, col_idx, dims_g, top)

    points = {d: [] for d in range(max_hom_dim + 1)}
    births = np.nonzero(low_inv >= 0)[0]
    for s in births:
        p = low_inv[s]
        hdim = int(dims_g[s])
        if hdim <= max_hom_dim and values_g[s] < values_g[p]:
            points[hdim].append((values_g[s], values_g[p]))
    essential = np.nonzero(~cleared & ~negative)[0]
    for s in essential:
        hdim = int(dims_g[s])
        if hdim <= max_hom_dim:
            points[hdim].append((values_g[s], np.inf))
    out = []
    for d in range(max_hom_dim + 1):
        pts = np.asarray(sorted(points[d]), dtype=np.float64).reshape(-1, 2)
        out.append(PersistenceDiagram(d, pts))
    return out
