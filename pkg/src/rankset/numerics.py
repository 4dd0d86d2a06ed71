"""Distribution functions, binomial tails and root finding.

The normal and chi-square(1) functions go through ``math.erfc``; the t
distribution and the normal quantile use :mod:`scipy.special`. Binomial
tails are plain sums, which stay exact when ``q`` is a
:class:`fractions.Fraction`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Union

import numpy as np
from scipy import optimize, special

from .errors import DataError, InfeasibleError, NumericalError

Number = Union[float, Fraction]

_SQRT2 = math.sqrt(2.0)
_MASK64 = (1 << 64) - 1


def normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / _SQRT2)


def normal_sf(x: float) -> float:
    return 0.5 * math.erfc(x / _SQRT2)


def normal_quantile(p: float) -> float:
    if not 0.0 < p < 1.0:
        raise DataError(f"probability must be in (0, 1), got {p}")
    return float(special.ndtri(p))


def t_cdf(x: float, df: float) -> float:
    if not df > 0:
        raise DataError(f"degrees of freedom must be positive, got {df}")
    return float(special.stdtr(df, x))


def t_sf(x: float, df: float) -> float:
    return t_cdf(-x, df)


def t_quantile(p: float, df: float) -> float:
    if not df > 0:
        raise DataError(f"degrees of freedom must be positive, got {df}")
    if not 0.0 < p < 1.0:
        raise DataError(f"probability must be in (0, 1), got {p}")
    return float(special.stdtrit(df, p))


def chisq1_sf(x: float) -> float:
    """Survival function of chi-square with one degree of freedom."""
    if x < 0:
        raise DataError(f"chi-square argument must be non-negative, got {x}")
    if math.isinf(x):
        return 0.0
    return math.erfc(math.sqrt(x / 2.0))


def chisq1_quantile(p: float) -> float:
    return normal_quantile(0.5 + p / 2.0) ** 2


def binomial_tail(H: int, k: int, q: Number) -> Number:
    """``P(Bin(H, q) >= k)``.

    Exact when ``q`` is a Fraction.
    """
    if H < 0 or not 0 <= k <= H:
        raise DataError(f"invalid binomial tail arguments H={H}, k={k}")
    if not 0 <= q <= 1:
        raise DataError(f"probability must be in [0, 1], got {q}")
    if k == 0:
        return Fraction(1) if isinstance(q, Fraction) else 1.0
    total = sum(math.comb(H, l) * q**l * (1 - q) ** (H - l) for l in range(k, H + 1))
    if isinstance(total, Fraction):
        return total
    return min(1.0, max(0.0, float(total)))


def beta_half_cdf(h: int, H: int, exact: bool = False) -> Number:
    """CDF at 1/2 of Beta(h, H-h+1), i.e. P(h-th of H uniform order stats <= 1/2).

    Computed as the binomial tail ``P(Bin(H, 1/2) >= h)``.
    """
    if not 1 <= h <= H:
        raise DataError(f"rank {h} out of range for set size {H}")
    value = binomial_tail(H, h, Fraction(1, 2))
    return value if exact else float(value)


def eta_squared(H: int, exact: bool = False) -> Number:
    """Variance factor of the balanced RSS sign statistic."""
    betas = [beta_half_cdf(h, H, exact=True) for h in range(1, H + 1)]
    half = Fraction(1, 2)
    value = 1 - Fraction(4, H) * sum((b - half) ** 2 for b in betas)
    return value if exact else float(value)


@dataclass(frozen=True)
class RootBracket:
    lo: float
    hi: float
    tol: float = 1e-10
    max_iter: int = 200

    def __post_init__(self):
        if not self.lo < self.hi:
            raise DataError(f"bracket requires lo < hi, got [{self.lo}, {self.hi}]")
        if not self.tol > 0:
            raise DataError("tolerance must be positive")


def find_root(f: Callable[[float], float], bracket: RootBracket) -> float:
    """Root of ``f`` inside ``bracket`` by Brent's method (bisection-safeguarded)."""
    flo, fhi = f(bracket.lo), f(bracket.hi)
    if flo == 0:
        return bracket.lo
    if fhi == 0:
        return bracket.hi
    if not (np.isfinite(flo) and np.isfinite(fhi)) or np.sign(flo) == np.sign(fhi):
        raise InfeasibleError(
            f"no sign change in bracket [{bracket.lo}, {bracket.hi}]: f = ({flo}, {fhi})"
        )
    try:
        return optimize.brentq(
            f,
            bracket.lo,
            bracket.hi,
            xtol=bracket.tol / 2,
            rtol=max(bracket.tol / 2, 4 * np.finfo(float).eps),
            maxiter=bracket.max_iter,
        )
    except RuntimeError as exc:
        raise NumericalError(f"max_iter exceeded in root search: {exc}") from exc


def seeded_rng(seed: int) -> np.random.Generator:
    """PCG64 generator; normals use numpy's ziggurat transform.

    The raw bit stream is fixed by the seed. numpy does not promise that
    derived draws (normals, integers) stay identical across releases, so
    byte-identical reruns assume the same numpy version.
    """
    return np.random.Generator(np.random.PCG64(int(seed) & _MASK64))


def spawn_rng(seed: int, *keys: int) -> np.random.Generator:
    """Independent generator derived from ``(seed, *keys)``."""
    entropy = [int(k) & _MASK64 for k in (seed, *keys)]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))
