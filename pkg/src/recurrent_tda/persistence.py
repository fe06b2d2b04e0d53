"""Persistence diagrams of filtered complexes (H0 and H1).

H0 pairing comes from a union-find sweep over the edges; H1 pairing from
the standard left-to-right reduction of the triangle boundary block over
the two-element field (edges already paired downward are cleared, which is
exactly what the union-find sweep provides).  Pairs with zero lifespan are
dropped.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from recurrent_tda._reduction import (
    build_cofacet_lists,
    count_flag_triangles,
    fill_flag_triangles,
    merging_edges,
    reduce_edge_cocolumns,
    reduce_triangle_columns,
)
from recurrent_tda.filtration import FilteredComplex

#: Relative lifespan below which a pair is considered zero-persistence.
ZERO_PERSISTENCE_RTOL = 1e-12


class NoRecurrentLoopError(ValueError):
    """No finite feature of the requested dimension exists in a diagram."""


@dataclass(frozen=True, order=True)
class PersistencePair:
    """One homology class: dimension, birth scale and death scale."""

    dim: int
    birth: float
    death: float

    def __post_init__(self):
        if self.dim not in (0, 1):
            raise ValueError(f"dim must be 0 or 1, got {self.dim}")
        if self.birth < 0 or math.isnan(self.birth):
            raise ValueError(f"birth must be non-negative, got {self.birth}")
        if math.isnan(self.death) or self.death < self.birth:
            raise ValueError(f"death must be >= birth, got {self.death} < {self.birth}")

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.death)

    @property
    def persistence(self) -> float:
        return self.death - self.birth


@dataclass(frozen=True)
class PersistenceDiagram:
    """All persistence pairs of a filtration, sorted by (dim, birth, death)."""

    pairs: tuple
    n_vertices: int

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(sorted(self.pairs)))

    def in_dim(self, dim: int) -> tuple:
        return tuple(p for p in self.pairs if p.dim == dim)

    def finite_in_dim(self, dim: int) -> tuple:
        return tuple(p for p in self.pairs if p.dim == dim and p.is_finite)


def _zero_persistence(birth: float, death: float) -> bool:
    return death - birth <= ZERO_PERSISTENCE_RTOL * max(abs(birth), abs(death))


def compute_diagram(complex_: FilteredComplex) -> PersistenceDiagram:
    """Persistence diagram of a filtered complex of dimension <= 2.

    Vertices are H0 births; unpaired positive edges are H1 births.  A
    complex with a missing face or a face entering after its coface is
    rejected.
    """
    n = complex_.n_vertices
    vert_rows = complex_.rows_of_dim(0)
    if len(vert_rows) != n or (len(vert_rows) and complex_.scales[vert_rows].max() > 0):
        raise ValueError("malformed complex: every vertex must be present at scale 0")

    edge_rows = complex_.rows_of_dim(1)
    edge_u = complex_.verts[edge_rows, 0]
    edge_v = complex_.verts[edge_rows, 1]
    edge_scale = complex_.scales[edge_rows]
    n_edges = len(edge_rows)

    pairs = []
    merging = merging_edges(n, edge_u, edge_v) if n_edges else np.zeros(0, dtype=bool)
    for scale in edge_scale[merging]:
        if not _zero_persistence(0.0, scale):
            pairs.append(PersistencePair(0, 0.0, float(scale)))
    n_components = n - int(merging.sum())
    pairs.extend(PersistencePair(0, 0.0, math.inf) for _ in range(n_components))

    tri_rows = complex_.rows_of_dim(2)
    paired = np.zeros(n_edges, dtype=bool)
    if len(tri_rows):
        tri_verts = complex_.verts[tri_rows]
        tri_scale = complex_.scales[tri_rows]
        face_rows = _edge_row_lookup(edge_u, edge_v,n, tri_verts, tri_scale, edge_scale)
        pair_edge = reduce_triangle_columns(face_rows, n_edges)
        hit = pair_edge >= 0
        paired[pair_edge[hit]] = True
        for e_row, death in zip(pair_edge[hit], tri_scale[hit]):
            birth = float(edge_scale[e_row])
            if not _zero_persistence(birth, float(death)):
                pairs.append(PersistencePair(1, birth, float(death)))
    for scale in edge_scale[~merging & ~paired]:
        pairs.append(PersistencePair(1, float(scale), math.inf))

    return PersistenceDiagram(tuple(pairs), n)


def _edge_row_lookup(edge_u, edge_v, n, tri_verts, tri_scale, edge_scale):
    """Map each triangle's three edges to edge filtration rows (ascending)."""
    keys = edge_u * n + edge_v
    order = np.argsort(keys)
    sorted_keys = keys[order]
    rows = np.empty((tri_verts.shape[0], 3), dtype=np.int64)
    for col, (a, b) in enumerate(((0, 1), (0, 2), (1, 2))):
        face_keys = tri_verts[:, a] * n + tri_verts[:, b]
        pos = np.searchsorted(sorted_keys, face_keys)
        pos_clipped = np.minimum(pos, max(len(sorted_keys) - 1, 0))
        if not len(sorted_keys) or not np.all(sorted_keys[pos_clipped] == face_keys):
            raise ValueError("malformed complex: triangle has a missing edge face")
        rows[:, col] = order[pos_clipped]
    if np.any(edge_scale[rows] > tri_scale[:, None]):
        raise ValueError("malformed complex: face enters the filtration after its coface")
    rows.sort(axis=1)
    return rows


def flag_diagram(edges: np.ndarray, n: int, expand_dim: int = 2) -> PersistenceDiagram:
    """Persistence diagram of the flag complex over an (m, 3) edge array.

    Equivalent to ``compute_diagram(build_complex(edges, n, expand_dim))``
    but skips materializing the complex: triangles are enumerated straight
    into edge-row triples for the reduction.  Preferred for large clouds.
    """
    if expand_dim not in (1, 2):
        raise ValueError(f"expand_dim must be 1 or 2, got {expand_dim}")
    edges = np.asarray(edges, dtype=np.float64).reshape(-1, 3)
    edge_u = np.minimum(edges[:, 0], edges[:, 1]).astype(np.int64)
    edge_v = np.maximum(edges[:, 0], edges[:, 1]).astype(np.int64)
    edge_scale = edges[:, 2].copy()
    if len(edge_u):
        if edge_u.min() < 0 or edge_v.max() >= n:
            raise ValueError("edge vertex index out of range")
        if np.any(edge_u == edge_v):
            raise ValueError("edges must join two distinct vertices")
    # edge filtration order: scale, then lexicographic vertices
    order = np.lexsort((edge_v, edge_u, edge_scale))
    edge_u, edge_v, edge_scale = edge_u[order], edge_v[order], edge_scale[order]
    n_edges = len(edge_u)
    if n_edges and len(np.unique(edge_u * n + edge_v)) != n_edges:
        raise ValueError("duplicate edges are not allowed")

    pairs = []
    merging = merging_edges(n, edge_u, edge_v) if n_edges else np.zeros(0, dtype=bool)
    for scale in edge_scale[merging]:
        if not _zero_persistence(0.0, scale):
            pairs.append(PersistencePair(0, 0.0, float(scale)))
    pairs.extend(
        PersistencePair(0, 0.0, math.inf) for _ in range(n - int(merging.sum()))
    )

    paired = np.zeros(n_edges, dtype=bool)
    if expand_dim == 2 and n_edges:
        adjacency = np.zeros((n, n), dtype=np.bool_)
        adjacency[edge_u, edge_v] = True
        adjacency[edge_v, edge_u] = True
        edge_row = np.full((n, n), -1, dtype=np.int64)
        rows = np.arange(n_edges, dtype=np.int64)
        edge_row[edge_u, edge_v] = rows
        edge_row[edge_v, edge_u] = rows
        n_triangles = count_flag_triangles(edge_u, edge_v, adjacency)
        if n_triangles:
            tri_rows, tri_scale, tri_key = fill_flag_triangles(
                edge_u, edge_v, edge_scale, adjacency, edge_row, n_triangles
            )
            tri_order = np.lexsort((tri_key, tri_scale))
            tri_rows = tri_rows[tri_order]
            tri_scale = tri_scale[tri_order]
            del tri_key, tri_order
            cof_offsets, cof_data = build_cofacet_lists(tri_rows, n_edges)
            del tri_rows
            pair_tri = reduce_edge_cocolumns(
                cof_offsets, cof_data, merging, n_edges, n_triangles
            )
            hit = np.nonzero(pair_tri >= 0)[0]
            paired[hit] = True
            for e_row in hit:
                birth = float(edge_scale[e_row])
                death = float(tri_scale[pair_tri[e_row]])
                if not _zero_persistence(birth, death):
                    pairs.append(PersistencePair(1, birth, death))
    for scale in edge_scale[~merging & ~paired]:
        pairs.append(PersistencePair(1, float(scale), math.inf))
    return PersistenceDiagram(tuple(pairs), n)


def most_persistent_feature(diagram: PersistenceDiagram, dim: int) -> PersistencePair:
    """Finite pair of the given dimension with the longest lifespan.

    Ties break toward the larger death, then the larger birth.  Raises
    :class:`NoRecurrentLoopError` when the dimension has no finite pair.
    """
    candidates = diagram.finite_in_dim(dim)
    if not candidates:
        if dim == 1:
            raise NoRecurrentLoopError("no recurrent loop detected")
        raise NoRecurrentLoopError(f"no finite pairs in dimension {dim}")
    top = max(p.persistence for p in candidates)
    # lifespans within rounding error of the maximum count as tied
    tied = [
        p
        for p in candidates
        if top - p.persistence <= ZERO_PERSISTENCE_RTOL * max(abs(top), abs(p.persistence))
    ]
    return max(tied, key=lambda p: (p.death, p.birth))


def write_diagram_csv(diagram: PersistenceDiagram, path_or_buffer) -> None:
    """Write ``dim,birth,death`` rows; infinite deaths as the token ``inf``."""
    text = diagram_to_text(diagram)
    if isinstance(path_or_buffer, (str, bytes)) or hasattr(path_or_buffer, "__fspath__"):
        with open(path_or_buffer, "w") as fh:
            fh.write(text)
    else:
        path_or_buffer.write(text)


def diagram_to_text(diagram: PersistenceDiagram) -> str:
    lines = ["dim,birth,death"]
    for p in diagram.pairs:
        death = "inf" if not p.is_finite else repr(p.death)
        lines.append(f"{p.dim},{repr(p.birth)},{death}")
    return "\n".join(lines) + "\n"


def read_diagram_csv(path_or_buffer, n_vertices: int = 0) -> PersistenceDiagram:
    """Read a diagram written by :func:`write_diagram_csv`."""
    if isinstance(path_or_buffer, (str, bytes)) or hasattr(path_or_buffer, "__fspath__"):
        with open(path_or_buffer) as fh:
            text = fh.read()
    else:
        text = path_or_buffer.read()
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines or lines[0] != "dim,birth,death":
        raise ValueError("expected diagram CSV header 'dim,birth,death'")
    pairs = []
    for line in lines[1:]:
        dim, birth, death = line.split(",")
        pairs.append(PersistencePair(int(dim), float(birth), float(death)))
    return PersistenceDiagram(tuple(pairs), n_vertices)
