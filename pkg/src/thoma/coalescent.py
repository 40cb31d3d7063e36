"""Death-process coefficient families of the block-counting coalescent.

The chain on {0, 1, 2, ...} dies from k to k-1 at rate k*(k-1+theta)/2.
``d_mn`` gives the finite-start transition probabilities by the alternating
closed form, ``d_n`` the infinite-start limits by an adaptively truncated
series, and ``death_chain_expm_oracle`` an independent matrix-exponential
reference used to validate both.

Closed-form coefficients are assembled in exact rational arithmetic; only the
exponential factors are floating point.  If cancellation still overwhelms
double precision, the computation is flagged and (in "auto" mode) redone with
mpmath arbitrary precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

T_MIN = 0.02
_INSTABILITY_RATIO = 1e12


class InstabilityError(ArithmeticError):
    """An alternating sum lost too much precision to be trusted."""


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def lam(m: int, theta) -> float:
    """Death rate out of state m: m*(m-1+theta)/2."""
    if m < 0:
        raise ValueError("m must be >= 0")
    return m * (m - 1 + theta) / 2


def rising(x, k: int):
    val = x ** 0
    for i in range(k):
        val = val * (x + i)
    return val


def falling(x, k: int):
    val = x ** 0
    for i in range(k):
        val = val * (x - i)
    return val


@lru_cache(maxsize=None)
def _dmn_coefficients(m: int, n: int, theta: Fraction) -> tuple:
    """Exact k-sum coefficients of d_mn, indexed k = n..m.

    coeff[k - n] = (-1)^(k-n) (2k+theta-1)(n+theta)_(k-1) m_[k]
                   / (n! (k-n)! (theta+m)_(k)).
    """
    nfact = math.factorial(n)
    out = []
    ris_n = Fraction(1)       # (n+theta)_(k-1), built incrementally
    ris_m = rising(theta + m, n)
    fall_m = falling(Fraction(m), n)
    for i in range(n - 1):
        ris_n *= n + theta + i
    for k in range(n, m + 1):
        num = (2 * k + theta - 1) * ris_n * fall_m
        den = nfact * math.factorial(k - n) * ris_m
        out.append((-1) ** (k - n) * num / den)
        ris_n *= n + theta + (k - 1)
        ris_m *= theta + m + k
        fall_m *= m - k
    return tuple(out)


def d_mn(t: float, m: int, n: int, theta, mode: str = "auto") -> float:
    """Probability the chain started at m sits at n >= 1 after time t.

    The n = 0 mass is the complement (see ``d_m_row``).  ``mode`` is one of
    "auto" (double precision, transparent mpmath retry on the instability
    flag), "double" (flag raises), "extended" (mpmath directly).
    """
    if not 1 <= n <= m:
        raise ValueError(f"need 1 <= n <= m, got n={n}, m={m}")
    if t < 0:
        raise ValueError("t must be >= 0")
    th = _frac(theta)
    coeffs = _dmn_coefficients(m, n, th)
    if mode == "extended":
        return _dmn_extended(t, m, n, th)
    total = 0.0
    comp = 0.0  # Neumaier compensation
    largest = 0.0
    for k in range(n, m + 1):
        term = float(coeffs[k - n]) * math.exp(-lam(k, float(th)) * t)
        largest = max(largest, abs(term))
        fresh = total + term
        if abs(total) >= abs(term):
            comp += (total - fresh) + term
        else:
            comp += (term - fresh) + total
        total = fresh
    total += comp
    if largest > _INSTABILITY_RATIO * max(abs(total), 1e-300):
        if mode == "auto":
            return _dmn_extended(t, m, n, th)
        raise InstabilityError(
            f"d_mn(t={t}, m={m}, n={n}): term magnitude {largest:.3e} "
            f"vs result {total:.3e}")
    return total


def _dmn_extended(t: float, m: int, n: int, th: Fraction) -> float:
    import mpmath

    coeffs = _dmn_coefficients(m, n, th)
    with mpmath.workdps(60):
        total = mpmath.mpf(0)
        for k in range(n, m + 1):
            coef = coeffs[k - n]
            rate = Fraction(k * (k - 1)) / 2 + Fraction(k) * th / 2
            total += (mpmath.mpf(coef.numerator) / coef.denominator
                      * mpmath.e ** (-mpmath.mpf(rate.numerator)
                                     / rate.denominator * t))
        return float(total)


def d_m_row(t: float, m: int, theta, mode: str = "auto") -> np.ndarray:
    """The whole row [d_m0, ..., d_mm]; d_m0 is defined as the complement."""
    vals = np.zeros(m + 1)
    for n in range(1, m + 1):
        vals[n] = d_mn(t, m, n, theta, mode=mode)
    vals[0] = 1.0 - vals[1:].sum()
    return vals


def d_n(t: float, n: int, theta, tol: float = 1e-14, mode: str = "auto") -> float:
    """Infinite-start coefficient: the m -> infinity limit of d_mn.

    Series over m >= max(n,1) with the decaying exponential envelope; stops
    once a geometric bound on the tail drops below tol times the partial sum.
    The values are probabilities: absolute accuracy is machine epsilon times
    the largest term.  For t at or below T_MIN the double route is not
    trusted and raises unless mode="extended" (mpmath, 60 digits).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if t <= T_MIN and mode != "extended":
        raise InstabilityError(
            f"d_n series not trusted for t <= {T_MIN}; use mode='extended'")
    if n == 0:
        return d_0(t, theta, tol=tol, mode=mode)
    th = _frac(theta)
    thf = float(th)

    def coef(m: int) -> Fraction:
        return ((-1) ** (m - n) * (2 * m - 1 + th) * math.comb(m, n)
                * rising(n + th, m - 1) / Fraction(math.factorial(m)))

    if mode == "extended":
        return _limit_series_extended(t, th, coef, start=n, tol=tol)

    total = 0.0
    comp = 0.0
    m = n
    while True:
        term = float(coef(m)) * math.exp(-lam(m, thf) * t)
        fresh = total + term
        if abs(total) >= abs(term):
            comp += (total - fresh) + term
        else:
            comp += (term - fresh) + total
        total = fresh
        # Tail bound: the coefficient ratio is O(m), the exponential ratio
        # is exp(-(2m+theta)t); once their product is below 1/2 a geometric
        # bound applies.
        ratio = (2 * m + 3 + thf) * math.exp(-(2 * m + thf) * t)
        if ratio < 0.5 and m > n:
            tail = abs(term) * ratio / (1 - ratio)
            if tail <= tol * max(abs(total + comp), 1e-30):
                break
        m += 1
        if m > n + 600:
            raise InstabilityError(f"d_n(t={t}, n={n}) failed to converge")
    return total + comp


def d_0(t: float, theta, tol: float = 1e-14, mode: str = "auto") -> float:
    """Mass absorbed at 0: one minus the alternating m-series."""
    if t <= T_MIN and mode != "extended":
        raise InstabilityError(
            f"d_0 series not trusted for t <= {T_MIN}; use mode='extended'")
    th = _frac(theta)
    thf = float(th)

    def coef(m: int) -> Fraction:
        return ((-1) ** m * (2 * m - 1 + th) * rising(th, m - 1)
                / Fraction(math.factorial(m)))

    if mode == "extended":
        return 1.0 + _limit_series_extended(t, th, coef, start=1, tol=tol)

    total = 0.0
    m = 1
    while True:
        term = float(coef(m)) * math.exp(-lam(m, thf) * t)
        total += term
        ratio = (2 * m + 3 + thf) * math.exp(-(2 * m + thf) * t)
        if ratio < 0.5 and m > 1:
            tail = abs(term) * ratio / (1 - ratio)
            if tail <= tol * max(abs(total), 1e-30):
                break
        m += 1
        if m > 600:
            raise InstabilityError(f"d_0(t={t}) failed to converge")
    return 1.0 + total


def _limit_series_extended(t: float, th: Fraction, coef, start: int,
                           tol: float) -> float:
    import mpmath

    with mpmath.workdps(60):
        total = mpmath.mpf(0)
        tm = mpmath.mpf(t)
        thm = mpmath.mpf(th.numerator) / th.denominator
        m = max(start, 1)
        while True:
            c = coef(m)
            rate = m * (m - 1 + thm) / 2
            term = (mpmath.mpf(c.numerator) / c.denominator
                    * mpmath.e ** (-rate * tm))
            total += term
            ratio = (2 * m + 3 + float(th)) * math.exp(-(2 * m + float(th)) * t)
            if ratio < 0.5 and m > start and abs(term) <= tol * (abs(total) + 1e-30):
                break
            m += 1
            if m > start + 5000:
                raise InstabilityError(f"extended series failed to converge at t={t}")
        return float(total)


def d_tilde_1(t: float, theta, **kw) -> float:
    """The collapsed bottom coefficient d_0 + d_1."""
    return d_0(t, theta, **kw) + d_n(t, 1, theta, **kw)


def death_chain_expm_oracle(m: int, theta, t: float) -> np.ndarray:
    """Row m of expm(t*Q) for the pure-death generator on {0..m}.

    Scaling-and-squaring Pade matrix exponential; the independent reference
    for the closed-form coefficients.
    """
    if m > 60:
        raise ValueError("oracle supported for m <= 60")
    from scipy.linalg import expm

    thf = float(theta)
    q = np.zeros((m + 1, m + 1))
    for k in range(1, m + 1):
        rate = lam(k, thf)
        q[k, k] = -rate
        q[k, k - 1] = rate
    return expm(q * t)[m]


def tail_mass(t: float, theta) -> float:
    """Probability of sitting at level >= 2: 1 - d_0 - d_1."""
    return 1.0 - d_0(t, theta) - d_n(t, 1, theta)


def tail_bound_check(t: float, theta) -> tuple:
    """Both sides of the quoted level >= 2 tail inequality and whether it holds.

    lhs = 1 - d_0 - d_1, rhs = (theta+1)(theta+2)/2 * exp(-(theta+1)t).

    Beware: the quoted constant is NOT actually an upper bound once t is
    moderate; the exact large-t prefactor of the tail is (theta+2)(theta+3)/2
    (see ``tail_bound_check_sharp``), so this check fails wherever the tail
    has settled into its leading exponential.  Kept as stated so the
    discrepancy is visible data.
    """
    thf = float(theta)
    lhs = tail_mass(t, theta)
    rhs = (thf + 1) * (thf + 2) / 2 * math.exp(-(thf + 1) * t)
    return lhs, rhs, lhs <= rhs + 1e-10


def tail_bound_check_sharp(t: float, theta) -> tuple:
    """Provable tail inequality 1 - d_0 - d_1 <= (theta+2)(theta+3)/2 e^{-(theta+1)t}.

    The level >= 2 occupancy equals P(sum of Exp(rate_k), k >= 2, exceeds t).
    A Chernoff bound at the bottom rate lam_2 = theta+1 gives the prefactor
    prod_{k>=3} rate_k/(rate_k - rate_2), which telescopes to
    (theta+2)(theta+3)/2; the same constant is the exact t -> infinity
    prefactor, so the bound is tight.
    """
    thf = float(theta)
    lhs = tail_mass(t, theta)
    rhs = (thf + 2) * (thf + 3) / 2 * math.exp(-(thf + 1) * t)
    return lhs, rhs, lhs <= rhs + 1e-10


@dataclass
class CoeffTable:
    """A validated coefficient row with optional oracle deviation.

    ``m`` is the start level, or None for the infinite-start limit family.
    """

    theta: float
    t: float
    m: int | None
    values: np.ndarray
    oracle_error: float | None = None
    extras: dict = field(default_factory=dict)

    def validate(self, eps: float = 1e-10) -> "CoeffTable":
        vals = self.values
        if vals.min() < -eps or vals.max() > 1 + eps:
            raise ValueError(f"coefficients escape [0,1]: {vals.min()}, {vals.max()}")
        if self.m is not None and abs(vals.sum() - 1.0) > eps:
            raise ValueError(f"row sums to {vals.sum()}")
        return self


def coeff_table(m: int, theta, t: float, with_oracle: bool = True,
                mode: str = "auto") -> CoeffTable:
    """Closed-form row for a finite start, validated against the oracle."""
    vals = d_m_row(t, m, theta, mode=mode)
    err = None
    if with_oracle:
        err = float(np.max(np.abs(vals - death_chain_expm_oracle(m, theta, t))))
    return CoeffTable(float(theta), t, m, vals, err).validate()


def coeff_table_limit(theta, t: float, n_max: int, mode: str = "auto") -> CoeffTable:
    """Infinite-start coefficients d_0..d_{n_max} (no row-sum constraint)."""
    vals = np.array([d_0(t, theta, mode=mode)]
                    + [d_n(t, n, theta, mode=mode) for n in range(1, n_max + 1)])
    return CoeffTable(float(theta), t, None, vals).validate()
