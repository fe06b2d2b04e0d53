"""Numba kernels for persistence pairing over the two-element field."""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def merging_edges(n_vertices, edge_u, edge_v):
    """Union-find sweep over edges in filtration order.

    Returns a boolean mask, True where an edge joins two components (a
    negative edge killing an H0 class).
    """
    parent = np.arange(n_vertices, dtype=np.int64)
    out = np.zeros(edge_u.shape[0], dtype=np.bool_)
    for e in range(edge_u.shape[0]):
        ru = edge_u[e]
        while parent[ru] != ru:
            parent[ru] = parent[parent[ru]]
            ru = parent[ru]
        rv = edge_v[e]
        while parent[rv] != rv:
            parent[rv] = parent[parent[rv]]
            rv = parent[rv]
        if ru != rv:
            if ru < rv:
                parent[rv] = ru
            else:
                parent[ru] = rv
            out[e] = True
    return out


@njit(cache=True)
def count_flag_triangles(edge_u, edge_v, adjacency):
    """Number of 3-cliques, counting each via its (min, mid) edge."""
    n = adjacency.shape[0]
    total = 0
    for e in range(edge_u.shape[0]):
        u = edge_u[e]
        v = edge_v[e]
        for k in range(v + 1, n):
            if adjacency[u, k] and adjacency[v, k]:
                total += 1
    return total


@njit(cache=True)
def fill_flag_triangles(edge_u, edge_v, edge_scale, adjacency, edge_row, n_triangles):
    """Enumerate 3-cliques as ascending edge-row triples with scale and key.

    ``edge_row[u, v]`` maps a vertex pair to its row in the edge filtration
    order; rows are scale-sorted, so the largest row of a triangle carries
    its scale (the max edge scale).  The key encodes the vertex triple
    (i, j, k) lexicographically for deterministic tie-breaking.
    """
    n = adjacency.shape[0]
    rows = np.empty((n_triangles, 3), dtype=np.int64)
    scales = np.empty(n_triangles, dtype=np.float64)
    keys = np.empty(n_triangles, dtype=np.int64)
    t = 0
    for e in range(edge_u.shape[0]):
        u = edge_u[e]
        v = edge_v[e]
        for k in range(v + 1, n):
            if adjacency[u, k] and adjacency[v, k]:
                r0 = e
                r1 = edge_row[u, k]
                r2 = edge_row[v, k]
                # ascending insertion sort of the three rows
                if r0 > r1:
                    r0, r1 = r1, r0
                if r1 > r2:
                    r1, r2 = r2, r1
                if r0 > r1:
                    r0, r1 = r1, r0
                rows[t, 0] = r0
                rows[t, 1] = r1
                rows[t, 2] = r2
                s = edge_scale[rows[t, 2]]
                scales[t] = s
                keys[t] = (u * n + v) * n + k
                t += 1
    return rows, scales, keys


@njit(cache=True)
def build_cofacet_lists(tri_rows, n_edges):
    """Group triangle indices by each of their three edge rows (CSR layout).

    Triangles must be in filtration order; within each edge's segment the
    triangle indices then come out ascending.
    """
    n_triangles = tri_rows.shape[0]
    counts = np.zeros(n_edges + 1, dtype=np.int64)
    for t in range(n_triangles):
        counts[tri_rows[t, 0] + 1] += 1
        counts[tri_rows[t, 1] + 1] += 1
        counts[tri_rows[t, 2] + 1] += 1
    offsets = np.empty(n_edges + 1, dtype=np.int64)
    acc = 0
    for e in range(n_edges + 1):
        acc += counts[e]
        offsets[e] = acc
    data = np.empty(3 * n_triangles, dtype=np.int32)
    cursor = offsets[:-1].copy()
    for t in range(n_triangles):
        for c in range(3):
            e = tri_rows[t, c]
            data[cursor[e]] = t
            cursor[e] += 1
    return offsets, data


@njit(cache=True)
def reduce_edge_cocolumns(cof_offsets, cof_data, merging, n_edges, n_triangles):
    """Reduction of the anti-transposed boundary block (persistent cohomology).

    Columns are edges in reverse filtration order, rows their cofacet
    triangles; the pivot is the earliest triangle.  By duality the pairs
    equal those of the left-to-right homology reduction.  Columns of
    merging (negative) edges are cleared: they are the ones that would
    reduce to zero, they never own a pivot, and skipping them cannot
    change any other column.  Returns the paired triangle per edge (-1
    for none).
    """
    pair_tri = np.full(n_edges, -1, dtype=np.int64)
    owner = np.full(n_triangles, -1, dtype=np.int64)
    col_start = np.full(n_edges, -1, dtype=np.int64)
    col_len = np.zeros(n_edges, dtype=np.int64)
    cap = 4 * n_edges + 64
    pool = np.empty(cap, dtype=np.int32)
    pos = 0
    work = np.empty(n_triangles + 4, dtype=np.int32)
    tmp = np.empty(n_triangles + 4, dtype=np.int32)
    for e in range(n_edges - 1, -1, -1):
        if merging[e]:
            continue
        lo = cof_offsets[e]
        wlen = cof_offsets[e + 1] - lo
        for i in range(wlen):
            work[i] = cof_data[lo + i]
        while wlen > 0:
            low = work[0]
            own = owner[low]
            if own < 0:
                while pos + wlen > cap:
                    cap *= 2
                    grown = np.empty(cap, dtype=np.int32)
                    grown[:pos] = pool[:pos]
                    pool = grown
                owner[low] = e
                col_start[e] = pos
                col_len[e] = wlen
                pool[pos : pos + wlen] = work[:wlen]
                pos += wlen
                pair_tri[e] = low
                break
            s0 = col_start[own]
            l0 = col_len[own]
            i = 0
            j = 0
            k = 0
            while i < wlen and j < l0:
                a = work[i]
                b = pool[s0 + j]
                if a == b:
                    i += 1
                    j += 1
                elif a < b:
                    tmp[k] = a
                    k += 1
                    i += 1
                else:
                    tmp[k] = b
                    k += 1
                    j += 1
            while i < wlen:
                tmp[k] = work[i]
                k += 1
                i += 1
            while j < l0:
                tmp[k] = pool[s0 + j]
                k += 1
                j += 1
            swap = work
            work = tmp
            tmp = swap
            wlen = k
    return pair_tri


@njit(cache=True)
def reduce_triangle_columns(tri_rows, n_edges):
    """Left-to-right column reduction of the triangle boundary block.

    ``tri_rows`` holds, per triangle in filtration order, the ascending row
    indices of its three edges in the edge filtration order.  Columns are
    added over the two-element field until their lowest row is unclaimed;
    the claimed row is the paired (birth) edge.  Returns the paired edge
    row per triangle, -1 where the column reduced to zero.
    """
    n_triangles = tri_rows.shape[0]
    pair_edge = np.full(n_triangles, -1, dtype=np.int64)
    col_start = np.full(n_edges, -1, dtype=np.int64)
    col_len = np.zeros(n_edges, dtype=np.int64)
    cap = 4 * n_edges + 64
    pool = np.empty(cap, dtype=np.int64)
    pos = 0
    work = np.empty(n_edges + 4, dtype=np.int64)
    tmp = np.empty(n_edges + 4, dtype=np.int64)
    for t in range(n_triangles):
        work[0] = tri_rows[t, 0]
        work[1] = tri_rows[t, 1]
        work[2] = tri_rows[t, 2]
        wlen = 3
        while wlen > 0:
            low = work[wlen - 1]
            if col_start[low] < 0:
                while pos + wlen > cap:
                    cap *= 2
                    grown = np.empty(cap, dtype=np.int64)
                    grown[:pos] = pool[:pos]
                    pool = grown
                col_start[low] = pos
                col_len[low] = wlen
                pool[pos : pos + wlen] = work[:wlen]
                pos += wlen
                pair_edge[t] = low
                break
            # symmetric difference with the column owning this pivot
            s0 = col_start[low]
            l0 = col_len[low]
            i = 0
            j = 0
            k = 0
            while i < wlen and j < l0:
                a = work[i]
                b = pool[s0 + j]
                if a == b:
                    i += 1
                    j += 1
                elif a < b:
                    tmp[k] = a
                    k += 1
                    i += 1
                else:
                    tmp[k] = b
                    k += 1
                    j += 1
            while i < wlen:
                tmp[k] = work[i]
                k += 1
                i += 1
            while j < l0:
                tmp[k] = pool[s0 + j]
                k += 1
                j += 1
            swap = work
            work = tmp
            tmp = swap
            wlen = k
    return pair_edge
