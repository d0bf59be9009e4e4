"""Finite-difference derivatives for validating the closed-form Taylor
coefficients, independent of the analytic formulas they check.

Fourth-order central stencils with one Richardson halving step; the step
sizes balance truncation against the roundoff floor of fourth derivatives
in doubles.
"""

from __future__ import annotations

from typing import Callable

# Fourth-order central stencils on offsets -3..3 (unused offsets zero).
_STENCILS = {
    1: ((-2, -1, 1, 2), (1.0 / 12.0, -2.0 / 3.0, 2.0 / 3.0, -1.0 / 12.0)),
    2: ((-2, -1, 0, 1, 2), (-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0)),
    3: (
        (-3, -2, -1, 1, 2, 3),
        (1.0 / 8.0, -1.0, 13.0 / 8.0, -13.0 / 8.0, 1.0, -1.0 / 8.0),
    ),
    4: (
        (-3, -2, -1, 0, 1, 2, 3),
        (-1.0 / 6.0, 2.0, -13.0 / 2.0, 28.0 / 3.0, -13.0 / 2.0, 2.0, -1.0 / 6.0),
    ),
}

DEFAULT_STEPS = {1: 1e-4, 2: 1e-3, 3: 5e-3, 4: 2e-2}


def central_derivative(
    f: Callable[[float], float], order: int, h: float | None = None
) -> float:
    """Derivative of the given order of f at 0, fourth-order stencil with one
    Richardson halving step (kills the leading h^4 error term)."""
    if order not in _STENCILS:
        raise ValueError(f"order must be 1..4, got {order}")
    if h is None:
        h = DEFAULT_STEPS[order]
    offs, coefs = _STENCILS[order]

    def stencil(step: float) -> float:
        return sum(c * f(o * step) for o, c in zip(offs, coefs)) / step ** order

    d1 = stencil(h)
    d2 = stencil(h / 2.0)
    return (16.0 * d2 - d1) / 15.0


def taylor_by_differences(f: Callable[[float], float]) -> tuple[float, ...]:
    """Taylor coefficients c0..c4 of f at 0 by finite differences."""
    facts = (1.0, 1.0, 2.0, 6.0, 24.0)
    out = [f(0.0)]
    for k in range(1, 5):
        out.append(central_derivative(f, k) / facts[k])
    return tuple(out)
