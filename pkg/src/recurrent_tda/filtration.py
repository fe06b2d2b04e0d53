"""Filtered flag complexes (dimension <= 2) built from pairwise scales.

Edges enter the filtration at the critical intersection scale of their two
ellipsoids; every 3-clique of the edge graph becomes a triangle at the
maximum of its edge scales.  Simplices are kept in columnar arrays sorted
by ``(scale, dimension, vertex tuple)`` so that downstream reduction sees a
deterministic, face-closed order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from recurrent_tda.geometry import (
    DEFAULT_SEARCH_TOL,
    Ellipsoid,
    pairwise_scale_matrix,
)


@dataclass(frozen=True)
class FilteredSimplex:
    """A vertex, edge or triangle together with its filtration scale."""

    vertices: tuple
    scale: float

    def __post_init__(self):
        verts = tuple(int(v) for v in self.vertices)
        if not 1 <= len(verts) <= 3:
            raise ValueError(f"simplex must have 1-3 vertices, got {verts}")
        if any(b <= a for a, b in zip(verts, verts[1:])):
            raise ValueError(f"vertices must be strictly increasing, got {verts}")
        if min(verts) < 0:
            raise ValueError(f"vertex indices must be non-negative, got {verts}")
        if not (np.isfinite(self.scale) and self.scale >= 0):
            raise ValueError(f"scale must be finite and non-negative, got {self.scale}")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "scale", float(self.scale))

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1


class FilteredComplex:
    """Columnar store of filtered simplices.

    ``verts`` is (m, 3) with -1 padding for missing vertices, ``scales`` is
    (m,), ``dims`` is (m,); rows are sorted by (scale, dim, vertex tuple).
    """

    __slots__ = ("n_vertices", "verts", "scales", "dims")

    def __init__(self, n_vertices: int, verts: np.ndarray, scales: np.ndarray):
        verts = np.ascontiguousarray(verts, dtype=np.int64)
        scales = np.ascontiguousarray(scales, dtype=np.float64)
        if verts.ndim != 2 or verts.shape[1] != 3 or verts.shape[0] != scales.shape[0]:
            raise ValueError("verts must be (m, 3) aligned with scales")
        if scales.size and (not np.all(np.isfinite(scales)) or scales.min() < 0):
            raise ValueError("scales must be finite and non-negative")
        dims = (verts >= 0).sum(axis=1).astype(np.int8) - 1
        order = np.lexsort((verts[:, 2], verts[:, 1], verts[:, 0], dims, scales))
        self.n_vertices = int(n_vertices)
        self.verts = verts[order]
        self.scales = scales[order]
        self.dims = dims[order]
        for arr in (self.verts, self.scales, self.dims):
            arr.flags.writeable = False

    @classmethod
    def from_simplices(
        cls, simplices: Iterable[FilteredSimplex], n_vertices: int
    ) -> "FilteredComplex":
        simplices = list(simplices)
        verts = np.full((len(simplices), 3), -1, dtype=np.int64)
        scales = np.empty(len(simplices))
        for row, s in enumerate(simplices):
            verts[row, : len(s.vertices)] = s.vertices
            scales[row] = s.scale
        return cls(n_vertices, verts, scales)

    def __len__(self) -> int:
        return self.verts.shape[0]

    def __iter__(self) -> Iterator[FilteredSimplex]:
        for row in range(len(self)):
            yield FilteredSimplex(
                tuple(v for v in self.verts[row] if v >= 0), float(self.scales[row])
            )

    def rows_of_dim(self, dim: int) -> np.ndarray:
        """Row indices of all simplices of one dimension, filtration order."""
        return np.nonzero(self.dims == dim)[0]

    def max_scale(self) -> float:
        return float(self.scales.max()) if len(self) else 0.0

    def validate(self) -> None:
        """Check vertex coverage, index ranges and face closure.

        Intended for tests and small complexes; face closure is an
        O(m log m) lookup sweep.
        """
        if np.any((self.verts >= self.n_vertices) | ((self.verts < 0) & (self.verts != -1))):
            raise ValueError("vertex index out of range")
        vert_rows = self.rows_of_dim(0)
        if len(vert_rows) != self.n_vertices:
            raise ValueError("complex must contain every vertex exactly once")
        if np.any(self.scales[vert_rows] != 0.0):
            raise ValueError("vertices must enter at scale 0")
        edge_keys, edge_scales = self._face_table(1)
        for dim in (1, 2):
            rows = self.rows_of_dim(dim)
            if not len(rows):
                continue
            v = self.verts[rows]
            if np.any(v[:, : dim + 1].min(axis=1) < 0) or np.any(
                np.diff(v[:, : dim + 1], axis=1) <= 0
            ):
                raise ValueError("simplex vertices must be strictly increasing")
            if dim == 2:
                if not len(edge_keys):
                    raise ValueError("triangle has a missing edge face")
                for a, b in ((0, 1), (0, 2), (1, 2)):
                    keys = v[:, a] * self.n_vertices + v[:, b]
                    pos = np.searchsorted(edge_keys, keys)
                    pos_clipped = np.minimum(pos, len(edge_keys) - 1)
                    if not np.all(edge_keys[pos_clipped] == keys):
                        raise ValueError("triangle has a missing edge face")
                    if np.any(edge_scales[pos_clipped] > self.scales[rows]):
                        raise ValueError("face enters the filtration after its coface")

    def _face_table(self, dim: int):
        rows = self.rows_of_dim(dim)
        keys = self.verts[rows, 0] * self.n_vertices + self.verts[rows, 1]
        order = np.argsort(keys)
        return keys[order], self.scales[rows][order]


def pairwise_scales(
    ellipsoids: Sequence[Ellipsoid],
    alpha_max: float,
    search_tol: float = DEFAULT_SEARCH_TOL,
) -> list:
    """Critical scales of all ellipsoid pairs not exceeding ``alpha_max``.

    Returns ``(i, j, alpha)`` tuples with i < j, ordered by (i, j).
    """
    if len(ellipsoids) < 2:
        raise ValueError("need at least 2 ellipsoids")
    if not alpha_max > 0:
        raise ValueError(f"alpha_max must be positive, got {alpha_max}")
    dims = {e.dim for e in ellipsoids}
    if len(dims) != 1:
        raise ValueError("ellipsoids must share a dimension")
    centers = np.stack([e.center for e in ellipsoids])
    shapes = np.stack([e.shape for e in ellipsoids])
    matrix = pairwise_scale_matrix(centers, shapes, search_tol)
    iu, jv = np.triu_indices(len(ellipsoids), k=1)
    keep = matrix[iu, jv] <= alpha_max
    return [
        (int(i), int(j), float(matrix[i, j]))
        for i, j in zip(iu[keep], jv[keep])
    ]


def cone_scale(scale_matrix: np.ndarray) -> float:
    """Smallest scale at which some vertex is linked to every other vertex.

    Above this scale the flag complex is a cone, hence contractible, so
    every finite persistence pair lives at or below it.  Truncating the
    filtration here leaves the persistence diagram unchanged.
    """
    masked = scale_matrix + np.diag(np.full(len(scale_matrix), -np.inf))
    return float(masked.max(axis=1).min())


def build_complex(
    edges: Sequence, n_vertices: int, expand_dim: int = 2
) -> FilteredComplex:
    """Flag complex of an edge list: vertices at 0, edges at their scale,
    and (for ``expand_dim=2``) every 3-clique at the max of its edge scales.
    """
    if expand_dim not in (1, 2):
        raise ValueError(f"expand_dim must be 1 or 2, got {expand_dim}")
    if n_vertices < 1:
        raise ValueError("n_vertices must be positive")
    if isinstance(edges, np.ndarray):
        if edges.ndim != 2 or (edges.size and edges.shape[1] != 3):
            raise ValueError("edge array must have shape (n_edges, 3)")
        eu = edges[:, 0].astype(np.int64)
        ev = edges[:, 1].astype(np.int64)
        ea = edges[:, 2].astype(np.float64)
    else:
        edges = list(edges)
        eu = np.array([e[0] for e in edges], dtype=np.int64)
        ev = np.array([e[1] for e in edges], dtype=np.int64)
        ea = np.array([e[2] for e in edges], dtype=np.float64)
    if len(eu):
        if eu.min() < 0 or max(eu.max(), ev.max()) >= n_vertices:
            raise ValueError("edge vertex index out of range")
        if np.any(eu == ev):
            raise ValueError("edges must join two distinct vertices")
        if not np.all(np.isfinite(ea)) or ea.min() < 0:
            raise ValueError("edge scales must be finite and non-negative")
        eu, ev = np.minimum(eu, ev), np.maximum(eu, ev)
        keys = eu * n_vertices + ev
        if len(np.unique(keys)) != len(keys):
            raise ValueError("duplicate edges are not allowed")

    chunks_v = [np.column_stack([np.arange(n_vertices), np.full(n_vertices, -1), np.full(n_vertices, -1)])]
    chunks_s = [np.zeros(n_vertices)]
    if len(eu):
        chunks_v.append(np.column_stack([eu, ev, np.full(len(eu), -1)]))
        chunks_s.append(ea)
        if expand_dim == 2:
            tv, ts = _expand_triangles(eu, ev, ea, n_vertices)
            if len(tv):
                chunks_v.append(tv)
                chunks_s.append(ts)
    return FilteredComplex(
        n_vertices, np.concatenate(chunks_v), np.concatenate(chunks_s)
    )


def _expand_triangles(eu, ev, ea, n_vertices):
    """3-cliques of the edge graph; each found once via its (min, mid) edge."""
    adj = np.zeros((n_vertices, n_vertices), dtype=bool)
    adj[eu, ev] = True
    adj[ev, eu] = True
    scale = np.zeros((n_vertices, n_vertices))
    scale[eu, ev] = ea
    scale[ev, eu] = ea
    first = []
    second = []
    third = []
    tri_scale = []
    for e in range(len(eu)):
        i, j = int(eu[e]), int(ev[e])
        common = adj[i, j + 1 :] & adj[j, j + 1 :]
        ks = np.nonzero(common)[0]
        if ks.size:
            ks = ks + j + 1
            first.append(np.full(ks.size, i, dtype=np.int64))
            second.append(np.full(ks.size, j, dtype=np.int64))
            third.append(ks)
            tri_scale.append(np.maximum(ea[e], np.maximum(scale[i, ks], scale[j, ks])))
    if not first:
        return np.empty((0, 3), dtype=np.int64), np.empty(0)
    verts = np.column_stack(
        [np.concatenate(first), np.concatenate(second), np.concatenate(third)]
    )
    return verts, np.concatenate(tri_scale)


def write_complex_csv(complex_: FilteredComplex, path_or_buffer) -> None:
    """Write ``dim,v0,v1,v2,scale`` rows; absent vertices stay empty."""
    lines = ["dim,v0,v1,v2,scale"]
    for dim, verts, scale in zip(complex_.dims, complex_.verts, complex_.scales):
        cells = [str(int(v)) if v >= 0 else "" for v in verts]
        lines.append(f"{int(dim)},{cells[0]},{cells[1]},{cells[2]},{repr(float(scale))}")
    text = "\n".join(lines) + "\n"
    if isinstance(path_or_buffer, (str, bytes)) or hasattr(path_or_buffer, "__fspath__"):
        with open(path_or_buffer, "w") as fh:
            fh.write(text)
    else:
        path_or_buffer.write(text)
