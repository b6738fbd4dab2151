"""Uncertainty bound of a state given its full eigenspectrum.

Sorted eigenvalues are packed greedily into Fock levels (largest weights
into the cheapest levels); the bound is then the level-energy average
(1/n) sum_k (2k + n) xi_k.  Greedy packing is optimal: any other unitary
mixing of sorted weights onto nondecreasing level energies can only raise
the average (see oracle.lemma_trial for the Monte-Carlo check).
"""

import math
from dataclasses import dataclass

import numpy as np

from uncbound.purity import GroupedSpectrum, Spectrum
from uncbound.special_fn import check_dimension

__all__ = ["BoundResult", "bound_from_grouped", "bound_from_spectrum", "group_spectrum"]

_FLOOR_TOL = 1e-12
_VOLUME_RTOL = 1e-12


@dataclass(frozen=True)
class BoundResult:
    """A normalized uncertainty bound plus solver diagnostics.

    per_dim_product is (Delta X)(Delta P) in units of hbar/2 per dimension
    and never drops below the pure-state floor of 1; volume is its n-th
    power.  aux carries the solver's auxiliary parameter (cutoff M,
    interpolation root L, or thermal beta) when one exists.
    """

    per_dim_product: float
    volume: float
    n: int
    method: str
    aux: float | None = None
    residual: float = 0.0
    iterations: int = 0

    def __post_init__(self):
        object.__setattr__(self, "n", check_dimension(self.n))
        if not self.per_dim_product >= 1.0 - _FLOOR_TOL:
            raise ValueError(
                f"bound {self.per_dim_product!r} is below the pure-state floor"
            )
        if math.isfinite(self.volume):
            expected = self.per_dim_product**self.n
            if abs(self.volume - expected) > _VOLUME_RTOL * expected:
                raise ValueError(
                    f"volume {self.volume!r} inconsistent with "
                    f"per_dim_product**n = {expected!r}"
                )

    @classmethod
    def from_per_dim(cls, per_dim, n, method, aux=None, residual=0.0, iterations=0):
        per_dim = float(per_dim)
        return cls(
            per_dim_product=per_dim,
            volume=per_dim ** int(n),
            n=int(n),
            method=method,
            aux=None if aux is None else float(aux),
            residual=float(residual),
            iterations=int(iterations),
        )


def group_spectrum(s: Spectrum, n) -> GroupedSpectrum:
    """Pack sorted eigenvalues greedily into Fock levels of dimension n.

    Level k receives the next degeneracy(k, n) eigenvalues; xi_k is their
    sum.  Trailing all-zero levels are dropped.
    """
    n = check_dimension(n)
    rho = s.eigenvalues
    if n == 1:
        weights = rho
    else:
        sums = []
        consumed = 0
        k = 0
        block = 1  # degeneracy(k, n), updated by the recurrence below
        while consumed < rho.size:
            take = min(block, rho.size - consumed)
            sums.append(float(rho[consumed : consumed + take].sum()))
            consumed += take
            k += 1
            block = block * (k + n - 1) // k
        weights = np.array(sums)
    nonzero = np.nonzero(weights)[0]
    last = nonzero[-1] if nonzero.size else 0
    return GroupedSpectrum(n=n, weights=weights[: last + 1])


def bound_from_grouped(g: GroupedSpectrum) -> BoundResult:
    """Minimal per-dimension uncertainty product of a grouped spectrum."""
    levels = np.arange(len(g), dtype=float)
    per_dim = 1.0 + (2.0 / g.n) * float(np.dot(levels, g.weights))
    return BoundResult.from_per_dim(per_dim, g.n, method="grouped-sum")


def bound_from_spectrum(s: Spectrum, n) -> BoundResult:
    """Minimal per-dimension uncertainty product of a raw spectrum."""
    result = bound_from_grouped(group_spectrum(s, n))
    return BoundResult.from_per_dim(
        result.per_dim_product, result.n, method="spectrum-sum"
    )
