"""Numerical building blocks shared by the reliability models.

All probabilities of interest here live within 1e-15 of one, so complements
are carried explicitly and never formed by subtraction.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

# 7-point Gauss / 15-point Kronrod nodes on [-1, 1] (positive half, centre last).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD_W = np.concatenate([_WGK[:-1], _WGK[::-1]])
# Gauss nodes are the odd-indexed Kronrod nodes (1, 3, 5) plus the centre.
_GAUSS_W = np.zeros(15)
_GAUSS_W[[1, 3, 5]] = _WG[:3]
_GAUSS_W[[13, 11, 9]] = _WG[:3]
_GAUSS_W[7] = _WG[3]


class QuadratureError(RuntimeError):
    """Adaptive refinement ran out of budget before meeting the tolerance."""

    def __init__(self, message: str, worst_interval: tuple[float, float], estimate: float, error: float):
        super().__init__(
            f"{message}; worst interval [{worst_interval[0]:.6g}, {worst_interval[1]:.6g}], "
            f"estimate {estimate:.12g} +/- {error:.3g}"
        )
        self.worst_interval = worst_interval
        self.estimate = estimate
        self.error = error


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    evaluations: int


def _gk15(f, a: float, b: float) -> tuple[float, float]:
    centre = 0.5 * (a + b)
    half = 0.5 * (b - a)
    fx = np.asarray(f(centre + half * _NODES), dtype=float)
    if fx.shape != _NODES.shape:
        fx = np.broadcast_to(fx, _NODES.shape)
    kronrod = half * float(_KRONROD_W @ fx)
    gauss = half * float(_GAUSS_W @ fx)
    return kronrod, abs(kronrod - gauss)


def adaptive_integrate(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    rel_tol: float = 1e-9,
    abs_tol: float = 0.0,
    points: Sequence[float] | None = None,
    max_intervals: int = 4000,
) -> QuadratureResult:
    """Globally adaptive 15-point Gauss-Kronrod integration of ``f`` over [a, b].

    ``f`` is called with an array of abscissae and must return an array of the
    same shape. The interval with the largest error estimate is bisected until
    the summed estimates fall below ``max(abs_tol, rel_tol * |value|)``.

    ``points`` seeds the initial partition; use it to put breakpoints where the
    integrand changes scale, since a feature narrower than the first panel's
    node spacing is invisible to any fixed rule.
    """
    if not (math.isfinite(a) and math.isfinite(b)) or not a < b:
        raise ValueError(f"need finite a < b, got a={a}, b={b}")
    if not rel_tol > 0 and not abs_tol > 0:
        raise ValueError("at least one of rel_tol, abs_tol must be positive")

    edges = [a]
    if points is not None:
        edges.extend(sorted(float(p) for p in points if a < p < b))
    edges.append(b)

    heap: list[tuple[float, float, float, float]] = []
    total = 0.0
    total_err = 0.0
    evaluations = 0
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi <= lo:
            continue
        val, err = _gk15(f, lo, hi)
        evaluations += 15
        total += val
        total_err += err
        heapq.heappush(heap, (-err, lo, hi, val))

    while total_err > max(abs_tol, rel_tol * abs(total)):
        if not math.isfinite(total):
            raise QuadratureError("integrand produced a non-finite value", (heap[0][1], heap[0][2]), total, total_err)
        if len(heap) >= max_intervals:
            neg_err, lo, hi, _ = heap[0]
            raise QuadratureError("interval budget exhausted", (lo, hi), total, total_err)
        neg_err, lo, hi, val = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            raise QuadratureError("interval cannot be bisected further", (lo, hi), total, total_err)
        left_val, left_err = _gk15(f, lo, mid)
        right_val, right_err = _gk15(f, mid, hi)
        evaluations += 30
        total += left_val + right_val - val
        total_err += left_err + right_err + neg_err
        heapq.heappush(heap, (-left_err, lo, mid, left_val))
        heapq.heappush(heap, (-right_err, mid, hi, right_val))

    # Re-sum to shed the drift of the running updates.
    value = math.fsum(item[3] for item in heap)
    err = math.fsum(-item[0] for item in heap)
    return QuadratureResult(value=value, abs_error_estimate=err, evaluations=evaluations)


def stable_quadratic_roots(total: float, product: float) -> tuple[float, float]:
    """Roots of ``s**2 - total*s + product`` as ``(larger, smaller)``.

    The larger root comes from the sign-safe formula; the smaller one from the
    product identity, so it keeps full relative precision even when the two
    differ by fifteen orders of magnitude.
    """
    if not total > 0:
        raise ValueError(f"sum of roots must be positive, got {total}")
    if product < 0:
        raise ValueError(f"product of roots must be non-negative, got {product}")
    disc = total * total - 4.0 * product
    if disc < 0:
        # Tolerate rounding at the double-root boundary only.
        if disc > -16 * np.finfo(float).eps * total * total:
            disc = 0.0
        else:
            raise ValueError(f"complex roots: sum={total}, product={product}")
    larger = 0.5 * (total + math.sqrt(disc))
    smaller = product / larger
    return larger, smaller


def safe_complement(log_r):
    """``1 - exp(log_r)`` without cancellation, for ``log_r <= 0``."""
    return -np.expm1(log_r)


def log_from_complement(f):
    """``log(1 - f)`` for a failure probability ``f`` in [0, 1]."""
    return np.log1p(-np.asarray(f, dtype=float))


_SERIES_TERMS = 24
_INV_FACT = np.array([1.0 / math.factorial(k + 2) for k in range(_SERIES_TERMS)])


def sweep_kernel(x):
    """``(x - 1 + exp(-x)) / x**2``, accurate for all ``x >= 0``.

    Equals 1/2 at zero, ``exp(-1)`` at one, and ~1/x for large x. For ``x <= 1``
    it is evaluated from its alternating Taylor series
    ``sum_k (-x)**k / (k + 2)!`` to avoid the catastrophic cancellation of the
    direct form.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x <= 1.0
    if np.any(small):
        xs = x[small]
        # Horner on the reversed coefficient list.
        acc = np.zeros_like(xs)
        for coeff in _INV_FACT[::-1]:
            acc = acc * (-xs) + coeff
        out[small] = acc
    big = ~small
    if np.any(big):
        xb = x[big]
        out[big] = (xb + np.expm1(-xb)) / (xb * xb)
    return out if out.ndim else float(out)
