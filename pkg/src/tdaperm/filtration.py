"""Filtered simplicial complexes and their standard constructions.

A :class:`Filtration` stores simplices grouped by dimension together with
filtration values that are nondecreasing from face to coface.  Two builders
are provided: Vietoris-Rips complexes on point clouds (simplex value = largest
pairwise distance among its vertices) and lower-star complexes on
vertex-weighted graphs (simplex value = largest vertex value).
"""

from __future__ import annotations

import json
import math

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import ParseError, ResourceCapError, ValidationError

__all__ = [
    "Filtration",
    "Graph",
    "build_rips",
    "build_lower_star",
    "enclosing_radius",
    "load_points",
    "save_points",
    "load_graph",
    "save_graph",
    "DEFAULT_SIMPLEX_CAP",
]

# Hard ceiling on complex size; constructions refuse to build anything larger.
DEFAULT_SIMPLEX_CAP = 2_000_000


def _pack_rows(rows, base):
    """Encode each row of sorted vertex ids as a single int64 key.

    Keys compare the same way as the rows do lexicographically, so a sorted
    key array supports binary search for face lookups.
    """
    width = rows.shape[1]
    if width * math.log2(max(base, 2)) > 62:
        raise ValidationError("vertex id range too large to index simplices")
    key = rows[:, 0].astype(np.int64)
    for c in range(1, width):
        key = key * base + rows[:, c]
    return key


class Filtration:
    """Simplices grouped by dimension with monotone filtration values.

    Construction validates the complex: vertex ids are nonnegative, simplices
    within a dimension are distinct, every face of every simplex is present,
    and no simplex has a smaller value than one of its faces.  Simplices are
    stored sorted lexicographically by vertex tuple within each dimension.
    """

    def __init__(self, simplices_by_dim, values_by_dim):
        if len(simplices_by_dim) != len(values_by_dim):
            raise ValidationError("simplices_by_dim and values_by_dim lengths differ")
        sims, vals = [], []
        for d, (S, V) in enumerate(zip(simplices_by_dim, values_by_dim)):
            S = np.ascontiguousarray(S, dtype=np.int64)
            V = np.ascontiguousarray(V, dtype=np.float64)
            if S.size == 0:
                S = S.reshape(0, d + 1)
            if S.ndim != 2 or S.shape[1] != d + 1:
                raise ValidationError(
                    f"dimension {d} simplices must have shape (n, {d + 1}), got {S.shape}"
                )
            if V.shape != (S.shape[0],):
                raise ValidationError(f"dimension {d} has {S.shape[0]} simplices "
                                      f"but {V.shape[0]} values")
            if not np.all(np.isfinite(V)):
                raise ValidationError(f"dimension {d} has non-finite filtration values")
            if S.shape[0] and S.min() < 0:
                raise ValidationError("vertex ids must be nonnegative")
            S = np.sort(S, axis=1)
            if d >= 1 and np.any(S[:, :-1] == S[:, 1:]):
                raise ValidationError(f"dimension {d} contains a repeated vertex")
            order = np.lexsort(tuple(S[:, c] for c in range(d, -1, -1)))
            S, V = S[order], V[order]
            if S.shape[0] > 1 and np.any(np.all(S[:-1] == S[1:], axis=1)):
                raise ValidationError(f"dimension {d} contains duplicate simplices")
            sims.append(S)
            vals.append(V)
        while len(sims) > 1 and sims[-1].shape[0] == 0:
            sims.pop()
            vals.pop()
        if not sims or sims[0].shape[0] == 0:
            raise ValidationError("a filtration needs at least one vertex")
        self._simplices = sims
        self._values = vals
        self._faces = [None]
        self._check_faces()

    def _check_faces(self):
        base = int(max(S.max() for S in self._simplices if S.size)) + 1
        for d in range(1, len(self._simplices)):
            S, V = self._simplices[d], self._values[d]
            prev_keys = _pack_rows(self._simplices[d - 1], base)
            face_idx = np.empty((S.shape[0], d + 1), dtype=np.int64)
            for j in range(d + 1):
                faces = np.delete(S, j, axis=1)
                fkeys = _pack_rows(faces, base)
                pos = np.searchsorted(prev_keys, fkeys)
                bad = (pos >= prev_keys.size) | (prev_keys[np.minimum(pos, prev_keys.size - 1)] != fkeys)
                if np.any(bad):
                    i = int(np.argmax(bad))
                    raise ValidationError(
                        f"simplex {tuple(S[i])} is missing face {tuple(faces[i])}"
                    )
                worse = self._values[d - 1][pos] > V
                if np.any(worse):
                    i = int(np.argmax(worse))
                    raise ValidationError(
                        f"simplex {tuple(S[i])} has value {V[i]} below its face "
                        f"{tuple(faces[i])} at {self._values[d - 1][pos[i]]}"
                    )
                face_idx[:, j] = pos
            self._faces.append(face_idx)

    @classmethod
    def from_simplices(cls, simplices, values):
        """Build from parallel sequences of vertex tuples and values."""
        simplices = [tuple(s) for s in simplices]
        values = list(values)
        if len(simplices) != len(values):
            raise ValidationError("simplices and values lengths differ")
        if not simplices:
            raise ValidationError("a filtration needs at least one vertex")
        top = max(len(s) for s in simplices) - 1
        sims = [[] for _ in range(top + 1)]
        vals = [[] for _ in range(top + 1)]
        for s, v in zip(simplices, values):
            if not s:
                raise ValidationError("empty simplex")
            sims[len(s) - 1].append(s)
            vals[len(s) - 1].append(v)
        arrays = [np.asarray(s, dtype=np.int64).reshape(len(s), d + 1)
                  for d, s in enumerate(sims)]
        return cls(arrays, [np.asarray(v, dtype=np.float64) for v in vals])

    @property
    def dimension(self):
        """Largest simplex dimension present."""
        return len(self._simplices) - 1

    @property
    def counts(self):
        """Number of simplices in each dimension, low to high."""
        return tuple(S.shape[0] for S in self._simplices)

    @property
    def total(self):
        return sum(self.counts)

    def simplices(self, dim):
        """Vertex id array of shape (n_dim, dim + 1), rows sorted."""
        return self._simplices[dim]

    def values(self, dim):
        return self._values[dim]

    def faces(self, dim):
        """For dim >= 1: (n_dim, dim + 1) local indices of each facet in dim - 1."""
        if dim < 1:
            raise ValidationError("vertices have no faces")
        return self._faces[dim]

    def __repr__(self):
        return f"Filtration(counts={self.counts})"


def enclosing_radius(points):
    """min over points of the max distance to any other point.

    Beyond this scale the Vietoris-Rips complex is a cone, so no homology in
    positive dimensions survives; it is the natural default threshold.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.shape[0] < 2:
        return 0.0
    dm = squareform(pdist(pts))
    return float(dm.max(axis=1).min())


def _cap_check(total, cap):
    if total > cap:
        raise ResourceCapError(f"complex would exceed the simplex cap of {cap}")


def build_rips(points, max_dim=1, threshold=None, simplex_cap=DEFAULT_SIMPLEX_CAP):
    """Vietoris-Rips filtration of a point cloud.

    A simplex on vertices within pairwise distance ``threshold`` enters at the
    largest pairwise distance among its vertices; vertices enter at 0.  When
    ``threshold`` is None the enclosing radius of the cloud is used.  Simplex
    dimension is capped at ``max_dim`` (at most 3) and the total number of
    simplices at ``simplex_cap``.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValidationError(f"points must be a nonempty 2d array, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise ValidationError("points must be finite")
    if max_dim not in (0, 1, 2, 3):
        raise ValidationError(f"max_dim must be between 0 and 3, got {max_dim}")
    n = pts.shape[0]
    dm = squareform(pdist(pts)) if n > 1 else np.zeros((1, 1))
    if threshold is None:
        threshold = float(dm.max(axis=1).min()) if n > 1 else 0.0
    threshold = float(threshold)
    if not (math.isfinite(threshold) and threshold >= 0):
        raise ValidationError(f"threshold must be finite and nonnegative, got {threshold}")

    total = n
    _cap_check(total, simplex_cap)
    sims = [np.arange(n, dtype=np.int64)[:, None]]
    vals = [np.zeros(n)]

    adj = dm <= threshold
    np.fill_diagonal(adj, False)
    ei, ej = np.nonzero(np.triu(adj, 1))
    total += ei.size
    _cap_check(total, simplex_cap)
    if max_dim >= 1:
        sims.append(np.column_stack([ei, ej]).astype(np.int64))
        vals.append(dm[ei, ej])

    if max_dim >= 2 and ei.size:
        tri_rows, tri_vals = [], []
        for i, j, dij in zip(ei, ej, dm[ei, ej]):
            cand = np.nonzero(adj[i] & adj[j])[0]
            cand = cand[cand > j]
            if cand.size == 0:
                continue
            total += cand.size
            _cap_check(total, simplex_cap)
            block = np.empty((cand.size, 3), dtype=np.int64)
            block[:, 0], block[:, 1], block[:, 2] = i, j, cand
            tri_rows.append(block)
            tri_vals.append(np.maximum(dij, np.maximum(dm[i, cand], dm[j, cand])))
        if tri_rows:
            tris = np.concatenate(tri_rows)
            tvals = np.concatenate(tri_vals)
            sims.append(tris)
            vals.append(tvals)

            if max_dim >= 3:
                tet_rows, tet_vals = [], []
                for (i, j, k), tv in zip(tris, tvals):
                    cand = np.nonzero(adj[i] & adj[j] & adj[k])[0]
                    cand = cand[cand > k]
                    if cand.size == 0:
                        continue
                    total += cand.size
                    _cap_check(total, simplex_cap)
                    block = np.empty((cand.size, 4), dtype=np.int64)
                    block[:, 0], block[:, 1], block[:, 2], block[:, 3] = i, j, k, cand
                    tet_rows.append(block)
                    dmax = np.maximum(dm[i, cand], np.maximum(dm[j, cand], dm[k, cand]))
                    tet_vals.append(np.maximum(tv, dmax))
                if tet_rows:
                    sims.append(np.concatenate(tet_rows))
                    vals.append(np.concatenate(tet_vals))
    return Filtration(sims, vals)


class Graph:
    """Undirected graph with one real value per node.

    Edges are stored canonically: endpoints sorted within each edge, edges
    sorted lexicographically, no self loops, no duplicates.
    """

    __slots__ = ("node_count", "edges", "node_values")

    def __init__(self, node_count, edges, node_values):
        if not isinstance(node_count, (int, np.integer)) or node_count < 1:
            raise ValidationError(f"node_count must be a positive integer, got {node_count!r}")
        E = np.asarray(edges, dtype=np.int64)
        if E.size == 0:
            E = E.reshape(0, 2)
        if E.ndim != 2 or E.shape[1] != 2:
            raise ValidationError(f"edges must have shape (m, 2), got {E.shape}")
        if E.size and (E.min() < 0 or E.max() >= node_count):
            raise ValidationError("edge endpoint out of range")
        if np.any(E[:, 0] == E[:, 1]):
            raise ValidationError("self loops are not allowed")
        E = np.sort(E, axis=1)
        E = E[np.lexsort((E[:, 1], E[:, 0]))]
        if E.shape[0] > 1 and np.any(np.all(E[:-1] == E[1:], axis=1)):
            raise ValidationError("duplicate edges are not allowed")
        V = np.asarray(node_values, dtype=np.float64)
        if V.shape != (node_count,):
            raise ValidationError(f"expected {node_count} node values, got shape {V.shape}")
        if not np.all(np.isfinite(V)):
            raise ValidationError("node values must be finite")
        E.setflags(write=False)
        V.setflags(write=False)
        object.__setattr__(self, "node_count", int(node_count))
        object.__setattr__(self, "edges", E)
        object.__setattr__(self, "node_values", V)

    def __setattr__(self, name, value):
        raise AttributeError("Graph is immutable")

    def __repr__(self):
        return f"Graph(node_count={self.node_count}, n_edges={self.edges.shape[0]})"


def build_lower_star(graph, fill_triangles=False, simplex_cap=DEFAULT_SIMPLEX_CAP):
    """Lower-star filtration of a vertex-weighted graph.

    Every simplex enters at the largest value among its vertices.  With
    ``fill_triangles`` each 3-clique of the graph is added as a 2-simplex.
    """
    n = graph.node_count
    f = graph.node_values
    E = graph.edges
    total = n + E.shape[0]
    _cap_check(total, simplex_cap)
    sims = [np.arange(n, dtype=np.int64)[:, None], E]
    vals = [f.copy(), np.maximum(f[E[:, 0]], f[E[:, 1]]) if E.size else np.empty(0)]
    if E.size == 0:
        sims, vals = sims[:1], vals[:1]
    if fill_triangles and E.size:
        adj = np.zeros((n, n), dtype=bool)
        adj[E[:, 0], E[:, 1]] = True
        adj[E[:, 1], E[:, 0]] = True
        tri_rows, tri_vals = [], []
        for i, j in E:
            cand = np.nonzero(adj[i] & adj[j])[0]
            cand = cand[cand > j]
            if cand.size == 0:
                continue
            total += cand.size
            _cap_check(total, simplex_cap)
            block = np.empty((cand.size, 3), dtype=np.int64)
            block[:, 0], block[:, 1], block[:, 2] = i, j, cand
            tri_rows.append(block)
            tri_vals.append(np.maximum(np.maximum(f[i], f[j]), f[cand]))
        if tri_rows:
            sims.append(np.concatenate(tri_rows))
            vals.append(np.concatenate(tri_vals))
    return Filtration(sims, vals)


def _read_text(source):
    if hasattr(source, "read"):
        text = source.read()
        return text.decode("utf-8") if isinstance(text, bytes) else text
    with open(str(source), "r", encoding="utf-8") as fh:
        return fh.read()


def load_points(source):
    """Read a point cloud CSV: one point per row, numeric fields, no header."""
    text = _read_text(source)
    rows = []
    width = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split(",")
        if width is None:
            width = len(fields)
        elif len(fields) != width:
            raise ParseError(f"expected {width} fields, got {len(fields)}", line=lineno)
        try:
            rows.append([float(x) for x in fields])
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno) from None
    if not rows:
        raise ParseError("no points found", line=1)
    pts = np.asarray(rows, dtype=np.float64)
    if not np.all(np.isfinite(pts)):
        raise ValidationError("points must be finite")
    return pts


def save_points(points, path_or_buf):
    """Write a point cloud CSV with full round-trip float precision."""
    pts = np.asarray(points, dtype=np.float64)
    out = "\n".join(",".join(repr(float(x)) for x in row) for row in pts) + "\n"
    if hasattr(path_or_buf, "write"):
        path_or_buf.write(out)
    else:
        with open(path_or_buf, "w", encoding="utf-8") as fh:
            fh.write(out)


def load_graph(source):
    """Read a graph JSON object {"n": ..., "edges": [[i, j], ...], "values": [...]}."""
    text = _read_text(source)
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise ParseError("graph JSON must be an object")
    missing = {"n", "edges", "values"} - set(obj)
    if missing:
        raise ParseError(f"graph JSON is missing keys: {sorted(missing)}")
    extra = set(obj) - {"n", "edges", "values"}
    if extra:
        raise ParseError(f"graph JSON has unknown keys: {sorted(extra)}")
    return Graph(obj["n"], obj["edges"], obj["values"])


def save_graph(graph, path_or_buf):
    """Write a graph as JSON with keys n, edges, values."""
    obj = {
        "n": graph.node_count,
        "edges": [[int(i), int(j)] for i, j in graph.edges],
        "values": [float(v) for v in graph.node_values],
    }
    out = json.dumps(obj, sort_keys=True)
    if hasattr(path_or_buf, "write"):
        path_or_buf.write(out)
    else:
        with open(path_or_buf, "w", encoding="utf-8") as fh:
            fh.write(out)
