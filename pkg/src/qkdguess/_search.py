"""1-D search primitives: golden-section maximization and sign-change bisection."""

from __future__ import annotations

from typing import Callable

from .errors import NoCrossing

_INV_GOLDEN = (5.0 ** 0.5 - 1.0) / 2.0


def golden_section_max(f: Callable[[float], float], a: float, b: float,
                       tol: float = 1e-10, max_iter: int = 200) -> tuple[float, float]:
    """Maximize a unimodal f on [a, b]; returns (x_best, f(x_best))."""
    if b < a:
        a, b = b, a
    c = b - _INV_GOLDEN * (b - a)
    d = a + _INV_GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INV_GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_GOLDEN * (b - a)
            fd = f(d)
    x = (a + b) / 2.0
    return x, f(x)


def bisect_sign_change(f: Callable[[float], float], lo: float, hi: float,
                       xtol: float = 1e-9, max_iter: int = 200) -> float:
    """Root of f on [lo, hi] given f(lo) > 0 > f(hi); bisection to width xtol."""
    flo, fhi = f(lo), f(hi)
    if flo <= 0.0 or fhi >= 0.0:
        raise NoCrossing(
            f"no sign change on [{lo}, {hi}]: f(lo)={flo:.6g}, f(hi)={fhi:.6g}"
        )
    for _ in range(max_iter):
        if hi - lo <= xtol:
            break
        mid = (lo + hi) / 2.0
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2.0
