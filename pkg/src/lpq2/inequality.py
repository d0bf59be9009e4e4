"""Margin evaluation for the scalar inequalities behind the classification.

Every checker returns a Margin with the two display sides evaluated in
their 1/p-power form, so "margin >= 0" is literally the inequality. The
matched-pair solver recovers the codomain vector whose second-order growth
matches a given domain vector, and the substitution frame exposes the
algebraic identities used in the proven parameter band.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .core import LpVector, as_exponent

Q2_DEGENERATE = 1e-6  # below this distance from 2 the matching equation degenerates


@dataclass
class Margin:
    """One evaluated inequality instance: margin = rhs - lhs."""

    lhs: float
    rhs: float
    margin: float
    params: dict[str, Any] = field(default_factory=dict)


def _mk_margin(lhs: float, rhs: float, **params) -> Margin:
    return Margin(lhs=lhs, rhs=rhs, margin=rhs - lhs, params=params)


def _alpha(p: float, q: float, sign: int = 1) -> float:
    return float(sign) * math.sqrt((p - 1.0) / (q - 1.0))


def power_mean_margin(p, q, r: float, sign: int = 1) -> Margin:
    """Symmetric two-point power-mean comparison with curvature-matched
    scaling: nonnegative for 1 < p <= q, zero only at r = 0 or p = q."""
    pv, qv = as_exponent(p).value, as_exponent(q).value
    if pv > qv:
        raise ValueError(f"requires p <= q, got p={pv}, q={qv}")
    a = _alpha(pv, qv, sign)
    lhs = (0.5 * (abs(1.0 + a * r) ** qv + abs(1.0 - a * r) ** qv)) ** (1.0 / qv)
    rhs = (0.5 * (abs(1.0 + r) ** pv + abs(1.0 - r) ** pv)) ** (1.0 / pv)
    return _mk_margin(lhs, rhs, p=pv, q=qv, r=r, alpha=a)


def weighted_mean_margin(
    p, q, x: LpVector, y: LpVector, sign: int, r: float
) -> Margin:
    """Weighted two-point comparison deciding whether the small-r limit
    operator through (x, y) is a contraction: it is one exactly when this
    margin is nonnegative for every r."""
    pv, qv = as_exponent(p).value, as_exponent(q).value
    if min(x.x1, x.x2, y.x1, y.x2) <= 0.0:
        raise ValueError("weighted_mean_margin needs strictly positive coordinates")
    a = _alpha(pv, qv, sign)
    b1, b2 = y.x1 ** qv, y.x2 ** qv
    a1, a2 = x.x1 ** pv, x.x2 ** pv
    lhs = (
        b1 * abs(1.0 + a * (y.x2 / y.x1) ** (qv / 2.0) * r) ** qv
        + b2 * abs(1.0 - a * (y.x1 / y.x2) ** (qv / 2.0) * r) ** qv
    ) ** (1.0 / qv)
    rhs = (
        a1 * abs(1.0 + (x.x2 / x.x1) ** (pv / 2.0) * r) ** pv
        + a2 * abs(1.0 - (x.x1 / x.x2) ** (pv / 2.0) * r) ** pv
    ) ** (1.0 / pv)
    return _mk_margin(lhs, rhs, p=pv, q=qv, r=r, sign=sign)


def solve_matched_pair(p, q, x: LpVector) -> LpVector:
    """Codomain unit vector whose coordinate product satisfies the
    second-order matching equation against x, canonical branch y1 >= y2 > 0.

    Raises when the product falls outside (0, 1/4] or the codomain exponent
    sits on the degenerate value 2.
    """
    pe, qe = as_exponent(p), as_exponent(q)
    pv, qv = pe.value, qe.value
    if abs(x.norm() - 1.0) > 1e-10:
        raise ValueError("solve_matched_pair requires a unit x")
    if x.x1 <= 0.0 or x.x2 <= 0.0:
        raise ValueError("solve_matched_pair requires x1*x2 > 0")
    a1 = x.x1 ** pv
    prod_x = (x.x1 * x.x2) ** pv
    if abs(qv - 2.0) < Q2_DEGENERATE:
        # The matching coefficient vanishes quadratically at 2; carry the
        # coordinate-mass product across directly (exact in the equal-exponent
        # limit, and free of the 0/0 that the raw equation develops).
        m = prod_x
    else:
        # K is the rescaled domain-side value; the stable form uses
        # 1/prod - 4 = (2*a1 - 1)^2 / prod to avoid cancellation near the
        # balanced point.
        k = (
            (qv - 1.0)
            * (pv - 2.0) ** 2
            * (2.0 * a1 - 1.0) ** 2
            / ((qv - 2.0) ** 2 * (pv - 1.0) * prod_x)
        )
        m = 1.0 / (4.0 + k)
    if not 0.0 < m <= 0.25 + 1e-15:
        raise ValueError(f"matched coordinate product {m} outside (0, 1/4]")
    disc = max(0.0, 1.0 - 4.0 * m)
    beta = 0.5 * (1.0 + math.sqrt(disc))
    return LpVector(beta ** (1.0 / qv), (1.0 - beta) ** (1.0 / qv), qe)


def matching_residual(p, q, x: LpVector, y: LpVector) -> float:
    """Residual of the second-order matching equation at (x, y)."""
    pv, qv = as_exponent(p).value, as_exponent(q).value
    lhs = (qv - 2.0) ** 2 / (qv - 1.0) * (1.0 / (y.x1 * y.x2) ** qv - 4.0)
    rhs = (pv - 2.0) ** 2 / (pv - 1.0) * (1.0 / (x.x1 * x.x2) ** pv - 4.0)
    return lhs - rhs


def band_margin(p, q, x1p: float, r: float) -> Margin:
    """Proven-band margin: for 1 < p < q < 2 and dominant mass in
    [1/2, 1/q], builds the matched pair and evaluates the weighted
    comparison in ratio form; nonnegative with equality only at r = 0."""
    pv, qv = as_exponent(p).value, as_exponent(q).value
    if not (pv < qv < 2.0):
        raise ValueError(f"requires 1 < p < q < 2, got p={pv}, q={qv}")
    if not (0.5 - 1e-12 <= x1p <= 1.0 / qv + 1e-12):
        raise ValueError(f"dominant mass {x1p} outside [1/2, 1/q]")
    x = LpVector.from_mass(x1p, pv)
    y = solve_matched_pair(pv, qv, x)
    u = (1.0 - x1p) / x1p
    b1 = y.x1 ** qv
    v = (1.0 - b1) / b1
    a = _alpha(pv, qv, 1)
    su, sv = math.sqrt(u), math.sqrt(v)
    lhs = (
        (abs(1.0 + a * sv * r) ** qv + v * abs(1.0 - a / sv * r) ** qv)
        / (1.0 + v)
    ) ** (1.0 / qv)
    rhs = (
        (abs(1.0 + su * r) ** pv + u * abs(1.0 - r / su) ** pv) / (1.0 + u)
    ) ** (1.0 / pv)
    return _mk_margin(lhs, rhs, p=pv, q=qv, x1p=x1p, r=r, u=u, v=v)


def threshold_mean_margin(p, q, t: float) -> Margin:
    """Two-point comparison at the band's right endpoint, in the rescaled
    variable: nonnegative for 1 < p < q <= 2, zero only at t = 0."""
    pv, qv = as_exponent(p).value, as_exponent(q).value
    if not (pv < qv <= 2.0 + 1e-15):
        raise ValueError(f"requires 1 < p < q <= 2, got p={pv}, q={qv}")
    lhs = (
        (1.0 / pv) * abs(1.0 + (pv - 1.0) * t) ** qv
        + ((pv - 1.0) / pv) * abs(1.0 - t) ** qv
    ) ** (1.0 / qv)
    rhs = (
        (1.0 / qv) * abs(1.0 + (qv - 1.0) * t) ** pv
        + ((qv - 1.0) / qv) * abs(1.0 - t) ** pv
    ) ** (1.0 / pv)
    return _mk_margin(lhs, rhs, p=pv, q=qv, t=t)


def mass_interval(p, q) -> tuple[float, float]:
    """Admissible range of the dominant coordinate mass for matched pairs.

    In the regions with p < q (both under or both over 2) the range runs
    up from 1/2; in the mirrored regions it runs from the same threshold up
    toward 1.
    """
    from .classify import OPEN_B, OPEN_C, OPEN_E, OPEN_F, region_of

    pv, qv = as_exponent(p).value, as_exponent(q).value
    region = region_of(pv, qv)
    if region not in (OPEN_B, OPEN_C, OPEN_E, OPEN_F):
        raise ValueError(f"mass_interval is defined on the open regions, not {region}")
    num = (qv - 2.0) * (pv * qv - pv - qv + 2.0)
    den = qv * (pv * qv - pv - qv)
    if den == 0.0 or num / den < 0.0:
        raise ValueError("interval formula has no real value for these exponents")
    thresh = 0.5 * (1.0 + math.sqrt(num / den))
    if region in (OPEN_B, OPEN_C):
        return (0.5, thresh)
    return (thresh, 1.0)


@dataclass
class SubstitutionFrame:
    """Mass-coordinate frame for the proven-band algebra.

    u and v are the mass ratios of the two vectors, c the cross-scale, and
    A, B, D the combination coefficients; they satisfy
    A + D + B = v (1 + u)^2  and  A + u^2 D - u B = -c^2 (1 + u)^2.
    """

    a1: float
    a2: float
    b1: float
    b2: float
    u: float
    v: float
    alpha: float
    c: float
    A: float
    B: float
    D: float


def substitution_frame(p, q, x: LpVector, y: LpVector, sign: int = 1) -> SubstitutionFrame:
    """Build the frame for a matched pair; validates the square-root form of
    the matching equation to 1e-10 and rejects inconsistent inputs."""
    pv, qv = as_exponent(p).value, as_exponent(q).value
    if min(x.x1, x.x2, y.x1, y.x2) <= 0.0:
        raise ValueError("substitution_frame needs strictly positive coordinates")
    a1, a2 = x.x1 ** pv, x.x2 ** pv
    b1, b2 = y.x1 ** qv, y.x2 ** qv
    u, v = a2 / a1, b2 / b1
    alpha = _alpha(pv, qv, sign)
    # Square-root form of the matching equation, sign-free.
    lhs = (2.0 - qv) * abs(alpha) * (1.0 - v) / math.sqrt(v)
    rhs = (2.0 - pv) * (1.0 - u) / math.sqrt(u)
    if abs(lhs - rhs) > 1e-10 * max(1.0, abs(rhs)):
        raise ValueError(
            f"pair does not satisfy the matching equation (residual {lhs - rhs:.3e})"
        )
    c = alpha * math.sqrt(u) * math.sqrt(v)
    A = (u * v + c) * (u - c)
    B = (u * v + c) * (1.0 + c) + (v - c) * (u - c)
    D = (1.0 + c) * (v - c)
    return SubstitutionFrame(
        a1=a1, a2=a2, b1=b1, b2=b2, u=u, v=v, alpha=alpha, c=c, A=A, B=B, D=D
    )


def sweep_margins(kind: str, p, q, rs, **kw) -> np.ndarray:
    """Vector of margins for a named inequality over a parameter grid."""
    rs = np.asarray(rs, dtype=float)
    if kind == "lemma1":
        return np.array([power_mean_margin(p, q, float(r)).margin for r in rs])
    if kind == "corollary":
        return np.array([threshold_mean_margin(p, q, float(r)).margin for r in rs])
    if kind == "lemma3":
        x1p = kw["x1p"]
        return np.array([band_margin(p, q, x1p, float(r)).margin for r in rs])
    if kind == "e18":
        x, y, sign = kw["x"], kw["y"], kw.get("sign", 1)
        return np.array(
            [weighted_mean_margin(p, q, x, y, sign, float(r)).margin for r in rs]
        )
    raise ValueError(f"unknown inequality kind {kind!r}")


def default_r_grid(r_max: float = 100.0, n: int = 2001, tails: bool = True) -> np.ndarray:
    """Uniform grid on [-r_max, r_max] plus log-spaced tails out to 1e6."""
    grid = np.linspace(-r_max, r_max, n)
    if tails:
        t = np.logspace(math.log10(r_max), 6.0, 60)[1:]
        grid = np.concatenate([-t[::-1], grid, t])
    return grid
