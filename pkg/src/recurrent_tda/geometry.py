"""Gradient-aligned ellipsoids and their critical intersection scales.

Each signal sample gets an ellipsoid elongated along the locally estimated
flow direction.  Two ellipsoids scaled by a common factor ``alpha`` (shape
matrices by ``alpha**2``) first touch at the critical scale

    alpha* = sqrt(max over s in (0,1) of s*(1-s) * v' inv(E_s) v),

where ``v`` is the center difference and ``E_s = s*S1 + (1-s)*S2``.  The
inner maximand is concave in ``s``, so golden-section search finds it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from recurrent_tda.frames import SignalFrame
from recurrent_tda.validation import (
    as_float_vector,
    check_points,
    check_shape_matrix,
)

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

#: Default tolerance of the golden-section search on the s-interval.
DEFAULT_SEARCH_TOL = 1e-6


@dataclass(frozen=True)
class GradientConfig:
    """Window length and degeneracy threshold for gradient estimation."""

    window: int = 3
    degenerate_tolerance: float = 1e-8

    def __post_init__(self):
        if not isinstance(self.window, (int, np.integer)) or self.window < 1:
            raise ValueError(f"window must be a positive integer, got {self.window!r}")
        if not self.degenerate_tolerance > 0:
            raise ValueError("degenerate_tolerance must be positive")


@dataclass(frozen=True)
class Ellipsoid:
    """An ellipsoid ``{x : (x - center)' inv(shape) (x - center) <= 1}``.

    ``shape`` is symmetric positive definite; its eigenvalues are the
    squared semi-axis lengths.
    """

    center: np.ndarray = field(repr=False)
    shape: np.ndarray = field(repr=False)

    def __post_init__(self):
        center = as_float_vector(self.center, "center")
        shape = check_shape_matrix(self.shape, "shape")
        if shape.shape[0] != center.shape[0]:
            raise ValueError(
                f"center has dimension {center.shape[0]} but shape is {shape.shape}"
            )
        center.flags.writeable = False
        shape.flags.writeable = False
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "shape", shape)

    @property
    def dim(self) -> int:
        return self.center.shape[0]


def gradient_field(values: np.ndarray, window: int = 3) -> np.ndarray:
    """Forward-minus-backward window means, one gradient row per sample.

    Interior samples use full windows of ``window`` samples on each side.
    Near the start the backward window is dropped (forward mean minus the
    point); near the end the forward window is dropped.  Windows are
    clipped to the available samples.
    """
    values = check_points(values, "values")
    n = values.shape[0]
    w = int(window)
    if w < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    sums = np.vstack([np.zeros((1, values.shape[1])), np.cumsum(values, axis=0)])

    def window_mean(lo, hi):  # mean of rows [lo, hi), caller guarantees hi > lo
        return (sums[hi] - sums[lo]) / (hi - lo)

    grads = np.empty_like(values)
    for i in range(n):
        fwd_lo, fwd_hi = i + 1, min(i + 1 + w, n)
        bwd_lo, bwd_hi = max(i - w, 0), i
        if i < w and fwd_hi > fwd_lo:
            grads[i] = window_mean(fwd_lo, fwd_hi) - values[i]
        elif i >= n - w and bwd_hi > bwd_lo:
            grads[i] = values[i] - window_mean(bwd_lo, bwd_hi)
        else:
            grads[i] = window_mean(fwd_lo, fwd_hi) - window_mean(bwd_lo, bwd_hi)
    return grads


def estimate_gradients(frame: SignalFrame, cfg: GradientConfig = GradientConfig()) -> np.ndarray:
    """Per-sample flow directions of a signal's state-space trajectory."""
    return gradient_field(frame.values, cfg.window)


def shape_from_gradient(g: np.ndarray, rho: float, tol: float) -> np.ndarray:
    """Shape matrix with semi-axis ``rho`` along ``g`` and 1 across it.

    ``tol`` is an absolute threshold on ``norm(g)``: below it there is no
    preferred direction and the identity (isotropic) shape is returned.
    Callers typically pass a relative tolerance scaled by the point-cloud
    diameter.
    """
    g = as_float_vector(g, "gradient")
    if not rho >= 1.0:
        raise ValueError(f"rho must be >= 1, got {rho}")
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    d = g.shape[0]
    norm = float(np.linalg.norm(g))
    # rho == 1 collapses to the isotropic shape; return it exactly.
    if norm <= tol or rho == 1.0:
        return np.eye(d)
    u = g / norm
    return (rho * rho) * np.outer(u, u) + (np.eye(d) - np.outer(u, u))


def ellipsoid_field(
    values: np.ndarray,
    rho: float,
    window: int = 3,
    degenerate_tolerance: float = 1e-8,
) -> np.ndarray:
    """Stack of per-sample shape matrices aligned with the local flow.

    The degeneracy threshold is ``degenerate_tolerance`` times the cloud
    diameter, so a vanishing gradient falls back to the isotropic shape.
    Returns an (n, d, d) array.
    """
    values = check_points(values, "values")
    n, d = values.shape
    if rho == 1.0:
        return np.broadcast_to(np.eye(d), (n, d, d)).copy()
    grads = gradient_field(values, window)
    diameter = _cloud_diameter(values)
    tol = degenerate_tolerance * diameter
    norms = np.linalg.norm(grads, axis=1)
    shapes = np.broadcast_to(np.eye(d), (n, d, d)).copy()
    live = norms > tol
    if np.any(live):
        u = grads[live] / norms[live, None]
        outer = u[:, :, None] * u[:, None, :]
        shapes[live] = (rho * rho) * outer + (np.eye(d) - outer)
    return shapes


def _cloud_diameter(values: np.ndarray) -> float:
    diff = values[:, None, :] - values[None, :, :]
    return float(np.sqrt((diff * diff).sum(-1).max()))


def _mixture_quadform(s, diff, shape_i, shape_j):
    """v' inv(s*S1 + (1-s)*S2) v, batched over leading axis."""
    mix = s[:, None, None] * shape_i + (1.0 - s)[:, None, None] * shape_j
    if diff.shape[1] == 2:
        det = mix[:, 0, 0] * mix[:, 1, 1] - mix[:, 0, 1] * mix[:, 1, 0]
        return (
            diff[:, 0] * diff[:, 0] * mix[:, 1, 1]
            - 2.0 * diff[:, 0] * diff[:, 1] * mix[:, 0, 1]
            + diff[:, 1] * diff[:, 1] * mix[:, 0, 0]
        ) / det
    solved = np.linalg.solve(mix, diff[:, :, None])[:, :, 0]
    return np.einsum("md,md->m", diff, solved)


def _overlap_gain(s, diff, shape_i, shape_j):
    """s*(1-s) * v' inv(E_s) v; alpha* is the square root of its maximum."""
    return s * (1.0 - s) * _mixture_quadform(s, diff, shape_i, shape_j)


def _batched_intersection_scales(diff, shape_i, shape_j, search_tol) -> np.ndarray:
    """Golden-section maximization of the overlap gain, one pair per row."""
    m = diff.shape[0]
    a = np.zeros(m)
    b = np.ones(m)
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc = _overlap_gain(c, diff, shape_i, shape_j)
    fd = _overlap_gain(d, diff, shape_i, shape_j)
    steps = max(0, math.ceil(math.log(search_tol) / math.log(_INV_PHI)))
    for _ in range(steps):
        keep_left = fc > fd
        b = np.where(keep_left, d, b)
        a = np.where(keep_left, a, c)
        width = b - a
        new_c = np.where(keep_left, b - _INV_PHI * width, d)
        new_d = np.where(keep_left, c, a + _INV_PHI * width)
        probe = np.where(keep_left, new_c, new_d)
        fe = _overlap_gain(probe, diff, shape_i, shape_j)
        fc, fd = np.where(keep_left, fe, fd), np.where(keep_left, fc, fe)
        c, d = new_c, new_d
    return np.sqrt(np.maximum(np.maximum(fc, fd), 0.0))


def overlap_kernel(e1: Ellipsoid, e2: Ellipsoid, s: float) -> float:
    """Intersection kernel K(s) = 1 - s*(1-s) * v' inv(E_s) v.

    K is convex on (0, 1); the two ellipsoids overlap exactly when its
    minimum over the interval is non-negative.
    """
    if not 0.0 < s < 1.0:
        raise ValueError(f"s must lie strictly inside (0, 1), got {s}")
    if e1.dim != e2.dim:
        raise ValueError("ellipsoids must share a dimension")
    diff = (e2.center - e1.center)[None, :]
    try:
        quad = _mixture_quadform(np.array([s]), diff, e1.shape[None], e2.shape[None])
    except np.linalg.LinAlgError as exc:  # unreachable for SPD inputs
        raise RuntimeError("internal error: singular shape mixture") from exc
    return float(1.0 - s * (1.0 - s) * quad[0])


def intersection_scale(
    e1: Ellipsoid, e2: Ellipsoid, search_tol: float = DEFAULT_SEARCH_TOL
) -> float:
    """Smallest alpha >= 0 at which the alpha-scaled ellipsoids intersect.

    Scaling multiplies semi-axes by alpha, i.e. shape matrices by alpha**2.
    Identical centers give exactly 0.  Symmetric in its arguments up to
    ``search_tol``.
    """
    if not search_tol > 0:
        raise ValueError(f"search_tol must be positive, got {search_tol}")
    if e1.dim != e2.dim:
        raise ValueError("ellipsoids must share a dimension")
    diff = (e2.center - e1.center)[None, :]
    if not diff.any():
        return 0.0
    return float(
        _batched_intersection_scales(diff, e1.shape[None], e2.shape[None], search_tol)[0]
    )


def pairwise_scale_matrix(
    values: np.ndarray,
    shapes: np.ndarray,
    search_tol: float = DEFAULT_SEARCH_TOL,
) -> np.ndarray:
    """Symmetric (n, n) matrix of critical intersection scales, zero diagonal.

    ``values`` are the ellipsoid centers, ``shapes`` the (n, d, d) stack of
    shape matrices.  All pairs are maximized in one vectorized sweep.
    """
    values = check_points(values, "values")
    n = values.shape[0]
    if shapes.shape != (n,) + (values.shape[1],) * 2:
        raise ValueError(f"shapes has shape {shapes.shape}, expected {(n, values.shape[1], values.shape[1])}")
    iu, jv = np.triu_indices(n, k=1)
    diff = values[jv] - values[iu]
    scales = np.zeros(len(iu))
    moving = np.any(diff != 0.0, axis=1)
    if np.any(moving):
        scales[moving] = _batched_intersection_scales(
            diff[moving], shapes[iu[moving]], shapes[jv[moving]], search_tol
        )
    matrix = np.zeros((n, n))
    matrix[iu, jv] = scales
    matrix[jv, iu] = scales
    return matrix
