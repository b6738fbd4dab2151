"""Bracketed bisection and golden-section search.

Both solvers guarantee a bracket before iterating: the bisection expands its
upper end geometrically until the sign changes, the golden-section maximizer
expects a bracket from the caller (see bounds.purity_bound for the expansion
loop).  Tolerances follow the package-wide solver contract: relative 1e-12,
iteration cap 200 unless stated otherwise.
"""

from dataclasses import dataclass

__all__ = ["SolverError", "RootResult", "GoldenResult", "bisect_root", "golden_max"]

_GOLDEN = (5.0**0.5 - 1.0) / 2.0  # 1/phi


class SolverError(RuntimeError):
    """A root finder or optimizer failed to converge; message carries diagnostics."""


@dataclass(frozen=True)
class RootResult:
    x: float
    residual: float
    iterations: int


@dataclass(frozen=True)
class GoldenResult:
    x: float
    fx: float
    spread: float
    iterations: int


def bisect_root(f, lo, hi, rtol=1e-12, max_iter=200, expand=True):
    """Find x in [lo, hi] with f(x) = 0 for f decreasing through zero.

    If ``expand`` is set and f(hi) is still positive, the upper end is
    doubled (up to 200 times) until the bracket is valid.
    """
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return RootResult(lo, 0.0, 0)
    if flo < 0.0:
        raise SolverError(f"no bracket: f({lo}) = {flo} < 0 at lower end")
    expansions = 0
    while fhi > 0.0:
        if not expand or expansions >= 200:
            raise SolverError(
                f"bracket expansion failed: f({hi}) = {fhi} > 0 after "
                f"{expansions} doublings"
            )
        lo, flo = hi, fhi
        hi *= 2.0
        fhi = f(hi)
        expansions += 1
    iters = expansions
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:  # exhausted float resolution
            break
        fmid = f(mid)
        iters += 1
        if fmid > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= rtol * max(abs(lo), abs(hi)):
            break
    x = 0.5 * (lo + hi)
    return RootResult(x, abs(f(x)), iters)


def golden_max(f, a, b, value_rtol=1e-9, max_iter=300):
    """Maximize a unimodal f on [a, b] by golden-section search.

    Stops when the interval no longer moves the value by more than
    ``value_rtol`` relative (with a tiny absolute floor), or when float
    resolution in x is exhausted.
    """
    c = b - (b - a) * _GOLDEN
    d = a + (b - a) * _GOLDEN
    fc, fd = f(c), f(d)
    iters = 0
    for _ in range(max_iter):
        iters += 1
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - (b - a) * _GOLDEN
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + (b - a) * _GOLDEN
            fd = f(d)
        spread = abs(fc - fd)
        scale = max(abs(fc), abs(fd), 1e-300)
        if spread <= max(1e-13, value_rtol * scale) and (b - a) <= max(
            1e-10, 1e-7 * max(abs(a), abs(b))
        ):
            break
        if c >= d:  # interval collapsed to float resolution
            break
    if fc >= fd:
        return GoldenResult(c, fc, abs(fc - fd), iters)
    return GoldenResult(d, fd, abs(fc - fd), iters)
