"""Induced operator norm of 2x2 matrices acting from lp_2 to lq_2.

The unit sphere of the domain is parametrized as
v(theta) = (sgn(cos)|cos|^(2/p), sgn(sin)|sin|^(2/p)), theta in [0, pi),
which is exactly unit for every theta. A dense scan brackets the local
maxima of ||T v(theta)||_q and golden-section refines each bracket; the
parametrization makes the scan exact on the sphere, so no renormalization
happens inside the optimizer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .core import Exponent, LpVector, as_exponent, lp_norm, sign

DEFAULT_SCAN = 4096
DEFAULT_TOL_ATTAIN = 1e-9
DEFAULT_DEDUPE = 1e-7
INDEPENDENT_DET_TOL = 1e-8

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Operator2x2:
    """A 2x2 real matrix tagged with domain and codomain exponents."""

    a11: float
    a12: float
    a21: float
    a22: float
    domain: Exponent
    codomain: Exponent

    def __post_init__(self):
        for v in (self.a11, self.a12, self.a21, self.a22):
            if not math.isfinite(v):
                raise ValueError("operator entries must be finite")
        if not isinstance(self.domain, Exponent):
            object.__setattr__(self, "domain", Exponent(float(self.domain)))
        if not isinstance(self.codomain, Exponent):
            object.__setattr__(self, "codomain", Exponent(float(self.codomain)))

    @classmethod
    def from_rows(cls, rows, domain, codomain) -> "Operator2x2":
        (a, b), (c, d) = rows
        return cls(a, b, c, d, as_exponent(domain), as_exponent(codomain))

    def entries(self) -> tuple[float, float, float, float]:
        return (self.a11, self.a12, self.a21, self.a22)

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.a11, self.a12], [self.a21, self.a22]])

    def frobenius(self) -> float:
        return math.sqrt(self.a11 ** 2 + self.a12 ** 2 + self.a21 ** 2 + self.a22 ** 2)

    def _same_spaces(self, other: "Operator2x2") -> None:
        if (
            self.domain.value != other.domain.value
            or self.codomain.value != other.codomain.value
        ):
            raise ValueError("operators act between different spaces")

    def __add__(self, other: "Operator2x2") -> "Operator2x2":
        self._same_spaces(other)
        return Operator2x2(
            self.a11 + other.a11,
            self.a12 + other.a12,
            self.a21 + other.a21,
            self.a22 + other.a22,
            self.domain,
            self.codomain,
        )

    def __sub__(self, other: "Operator2x2") -> "Operator2x2":
        self._same_spaces(other)
        return Operator2x2(
            self.a11 - other.a11,
            self.a12 - other.a12,
            self.a21 - other.a21,
            self.a22 - other.a22,
            self.domain,
            self.codomain,
        )

    def scaled(self, c: float) -> "Operator2x2":
        return Operator2x2(
            c * self.a11, c * self.a12, c * self.a21, c * self.a22,
            self.domain, self.codomain,
        )

    def max_entry_diff(self, other: "Operator2x2") -> float:
        return max(abs(a - b) for a, b in zip(self.entries(), other.entries()))


@dataclass
class NormCertificate:
    """Operator norm plus the unit directions that attain it.

    Maximizers are sign-canonical (first nonzero coordinate positive) and
    deduplicated within a small angular distance; independent_pair is set
    when two of them are linearly independent.
    """

    norm: float
    maximizers: list[LpVector] = field(default_factory=list)
    independent_pair: bool = False


def apply(T: Operator2x2, v: LpVector) -> LpVector:
    """Matrix-vector product, tagged with the codomain exponent."""
    if v.exponent.value != T.domain.value:
        raise ValueError(
            f"vector lives in l^{v.exponent.value:g} but operator domain is "
            f"l^{T.domain.value:g}"
        )
    return LpVector(
        T.a11 * v.x1 + T.a12 * v.x2,
        T.a21 * v.x1 + T.a22 * v.x2,
        T.codomain,
    )


def adjoint(T: Operator2x2) -> Operator2x2:
    """Transpose acting between the conjugate spaces."""
    return Operator2x2(
        T.a11, T.a21, T.a12, T.a22,
        T.codomain.conjugate, T.domain.conjugate,
    )


def sphere_point(theta: float, p: Exponent) -> tuple[float, float]:
    """Unit vector of lp at angle theta under the 2/p-power parametrization."""
    e = 2.0 / p.value
    c, s = math.cos(theta), math.sin(theta)
    return (sign(c) * abs(c) ** e, sign(s) * abs(s) ** e)


@lru_cache(maxsize=8)
def _theta_grid(n: int) -> np.ndarray:
    """Uniform grid on [0, pi) augmented with log-spaced offsets near the axes.

    For large p the sphere arc near an axis collapses into a microscopic
    theta range, so uniform sampling alone can miss a peak hiding there.
    """
    base = np.linspace(0.0, math.pi, n, endpoint=False)
    offs = np.concatenate([10.0 ** np.arange(-15.0, -2.9, 0.5), [0.0]])
    anchors = [0.0, math.pi / 2.0, math.pi]
    extra = np.concatenate([a + offs for a in anchors] + [a - offs for a in anchors])
    grid = np.concatenate([base, extra])
    grid = grid[(grid >= 0.0) & (grid < math.pi)]
    return np.unique(grid)


def _scan_values(T: Operator2x2, thetas: np.ndarray) -> np.ndarray:
    ep = 2.0 / T.domain.value
    q = T.codomain.value
    c = np.cos(thetas)
    s = np.sin(thetas)
    v1 = np.sign(c) * np.abs(c) ** ep
    v2 = np.sign(s) * np.abs(s) ** ep
    w1 = np.abs(T.a11 * v1 + T.a12 * v2)
    w2 = np.abs(T.a21 * v1 + T.a22 * v2)
    m = np.maximum(w1, w2)
    lo = np.minimum(w1, w2)
    ratio = np.where(m > 0.0, lo / np.where(m > 0.0, m, 1.0), 0.0)
    return m * (1.0 + ratio ** q) ** (1.0 / q)


def _value_at(T: Operator2x2, theta: float) -> float:
    ep = 2.0 / T.domain.value
    c, s = math.cos(theta), math.sin(theta)
    v1 = sign(c) * abs(c) ** ep
    v2 = sign(s) * abs(s) ** ep
    w1 = T.a11 * v1 + T.a12 * v2
    w2 = T.a21 * v1 + T.a22 * v2
    return lp_norm(w1, w2, T.codomain)


def _golden_max(f, a: float, b: float, tol: float) -> tuple[float, float]:
    """Golden-section maximum of f on [a, b]; derivative-free on purpose,
    the objective is not twice differentiable at axis crossings."""
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    best_x, best_f = (c, fc) if fc >= fd else (d, fd)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
            if fc > best_f:
                best_x, best_f = c, fc
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
            if fd > best_f:
                best_x, best_f = d, fd
    return best_x, best_f


def _canonical_maximizer(theta: float, p: Exponent) -> LpVector:
    v1, v2 = sphere_point(theta, p)
    if v1 < 0.0 or (v1 == 0.0 and v2 < 0.0):
        v1, v2 = -v1, -v2
    return LpVector(v1, v2, p)


def _angular_dist(a: float, b: float) -> float:
    """Distance on [0, pi) with v and -v identified."""
    d = abs(a - b) % math.pi
    return min(d, math.pi - d)


def _theta_at(thetas: np.ndarray, i: int, n: int) -> float:
    """Grid angle at a cyclic index, unwrapped by multiples of pi."""
    return float(thetas[i % n]) + math.pi * (i // n)


def norm_value(T: Operator2x2, scan: int = 1024) -> float:
    """Operator norm only, without maximizer bookkeeping (fast path)."""
    thetas = _theta_grid(scan)
    vals = _scan_values(T, thetas)
    gmax = float(vals.max())
    if gmax == 0.0:
        return 0.0
    if gmax - float(vals.min()) <= 1e-11 * gmax:
        return gmax
    n = len(thetas)
    best = gmax
    thresh = gmax - 1e-4 * gmax
    idx = np.nonzero(vals >= thresh)[0]
    for i0, i1 in _contiguous_runs(idx, n):
        lo = _theta_at(thetas, i0 - 1, n)
        hi = _theta_at(thetas, i1 + 1, n)
        if hi <= lo:
            continue
        _, fv = _golden_max(lambda t: _value_at(T, t), lo, hi, 1e-8)
        if fv > best:
            best = fv
    return best


def _contiguous_runs(idx: np.ndarray, n: int) -> list[tuple[int, int]]:
    """Group sorted indices into runs, merging across the cyclic seam."""
    if len(idx) == 0:
        return []
    runs = []
    start = prev = int(idx[0])
    for i in idx[1:]:
        i = int(i)
        if i == prev + 1:
            prev = i
        else:
            runs.append((start, prev))
            start = prev = i
    runs.append((start, prev))
    if len(runs) > 1 and runs[0][0] == 0 and runs[-1][1] == n - 1:
        s, e = runs.pop()
        runs[0] = (s - n, runs[0][1])
    return runs


def op_norm(
    T: Operator2x2,
    scan: int = DEFAULT_SCAN,
    tol_attain: float = DEFAULT_TOL_ATTAIN,
    refine_tol: float = 1e-13,
    dedupe: float = DEFAULT_DEDUPE,
) -> NormCertificate:
    """Norm certificate: the induced norm and every attaining direction found.

    Directions within `dedupe` radians are merged; values within
    `tol_attain` of the maximum count as attaining.
    """
    thetas = _theta_grid(scan)
    vals = _scan_values(T, thetas)
    gmax = float(vals.max())
    if gmax == 0.0:
        return NormCertificate(0.0, [], False)
    gmin = float(vals.min())
    if gmax - gmin <= 1e-11 * gmax:
        # Constant on the sphere: every direction attains.
        m1 = _canonical_maximizer(0.0, T.domain)
        m2 = _canonical_maximizer(math.pi / 2.0, T.domain)
        return NormCertificate(gmax, [m1, m2], True)

    n = len(thetas)
    thresh = gmax - max(1e-5 * gmax, 10.0 * tol_attain)
    idx = np.nonzero(vals >= thresh)[0]
    candidates: list[tuple[float, float]] = []
    f = lambda t: _value_at(T, t)
    for i0, i1 in _contiguous_runs(idx, n):
        # Refine each grid-local maximum inside the run (a run can straddle
        # two peaks separated by a shallow dip).
        local = []
        for i in range(i0, i1 + 1):
            v = vals[i % n]
            vl = vals[(i - 1) % n]
            vr = vals[(i + 1) % n]
            if v >= vl and v >= vr:
                local.append(i)
        if not local:
            local = [max(range(i0, i1 + 1), key=lambda i: vals[i % n])]
        for i in local:
            lo = _theta_at(thetas, i - 1, n)
            hi = _theta_at(thetas, i + 1, n)
            if hi <= lo:
                continue
            th, fv = _golden_max(f, lo, hi, refine_tol)
            candidates.append((th % math.pi, fv))

    if not candidates:
        candidates = [(float(thetas[int(np.argmax(vals))]), gmax)]
    norm = max(fv for _, fv in candidates)
    keep: list[tuple[float, float]] = []
    for th, fv in sorted(candidates):
        if norm - fv > tol_attain:
            continue
        merged = False
        for k, (th0, fv0) in enumerate(keep):
            if _angular_dist(th, th0) <= dedupe:
                if fv > fv0:
                    keep[k] = (th, fv)
                merged = True
                break
        if not merged:
            keep.append((th, fv))
    maximizers = [_canonical_maximizer(th, T.domain) for th, _ in sorted(keep)]
    independent = False
    for i in range(len(maximizers)):
        for j in range(i + 1, len(maximizers)):
            a, b = maximizers[i], maximizers[j]
            if abs(a.x1 * b.x2 - a.x2 * b.x1) > INDEPENDENT_DET_TOL:
                independent = True
    return NormCertificate(norm, maximizers, independent)


def is_contraction(T: Operator2x2, tol: float = 1e-9) -> bool:
    """True when the induced norm does not exceed 1 + tol.

    A few ulps of slack absorb the roundoff of the sphere parametrization,
    so tol = 0 still accepts exact isometries.
    """
    if tol < 0.0:
        raise ValueError("tolerance must be nonnegative")
    return norm_value(T) <= (1.0 + tol) * (1.0 + 8e-16)
