"""Scalar bracketing/bisection and golden-section search."""

import math

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0


class BracketError(RuntimeError):
    """Raised when doubling fails to straddle the target value."""


def solve_increasing(f, target, x_start=1e-4, rel_tol=1e-6, max_doublings=80):
    """Solve f(x) = target for a nondecreasing f on [0, inf).

    Brackets the root by doubling from `x_start`, then bisects until the
    bracket width is below `rel_tol` relative to the upper edge.
    Assumes f(0) <= target; no derivative needed.
    """
    lo = 0.0
    hi = float(x_start)
    n = 0
    while f(hi) < target:
        lo = hi
        hi *= 2.0
        n += 1
        if n > max_doublings:
            raise BracketError(
                f"no bracket below x={hi:.3g}: f appears to saturate under target={target:.6g}"
            )
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if f(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def golden_min(f, a, b, tol):
    """Golden-section search for the minimum of a unimodal f on [a, b].

    Returns the midpoint of the final interval of width <= tol.
    """
    a, b = min(a, b), max(a, b)
    h = b - a
    if h <= tol:
        return 0.5 * (a + b)
    n = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))
    c = a + INV_PHI2 * h
    d = a + INV_PHI * h
    yc = f(c)
    yd = f(d)
    for _ in range(n - 1):
        if yc < yd:
            b, d, yd = d, c, yc
            h *= INV_PHI
            c = a + INV_PHI2 * h
            yc = f(c)
        else:
            a, c, yc = c, d, yd
            h *= INV_PHI
            d = a + INV_PHI * h
            yd = f(d)
    return 0.5 * (a + d) if yc < yd else 0.5 * (c + b)
