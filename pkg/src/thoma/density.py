"""Level kernels and the two series forms of the transition density.

The density can be summed two ways: a spectral series (eigenvalue
exponentials times alternating kernel combinations) and a mixture series
(death-process coefficients times the kernels directly).  The two are exact
rearrangements of each other, so at matched truncations they must agree up to
the reported tails; that comparison is the headline consistency check.

Kernel values are computed through the sampling weights j_eval and the exact
level masses, so with rational points everything below the final float
conversion is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import coalescent
from .partition import Partition, enumerate_partitions, scaled_frobenius
from .symfunc import ThomaPoint, j_eval
from .zmeasure import ZParams, level_masses

KERNEL_DEGREE_CAP = 8


class KernelMassError(ValueError):
    """A level mass in a kernel denominator vanished."""


def kernel_K(n: int, sigma: ThomaPoint, omega: ThomaPoint, params: ZParams,
             cap: int | None = None):
    """Level-n kernel: sum over |eta| = n of j(sigma) j(omega) / mass(eta).

    Identically 1 for n = 0 and n = 1; symmetric in (sigma, omega); exact
    for rational points.
    """
    cap = KERNEL_DEGREE_CAP if cap is None else cap
    if n > cap:
        raise ValueError(f"kernel level {n} above cap {cap}")
    if n <= 1:
        return Fraction(1)
    th = params.vartheta
    masses, _ = level_masses(n, params)
    total = 0
    for eta in enumerate_partitions(n):
        mass = masses[eta]
        if not mass:
            raise KernelMassError(f"vanishing mass at {eta!r}")
        total = total + j_eval(eta, sigma, th) * j_eval(eta, omega, th) / mass
    return total


@lru_cache(maxsize=None)
def g_m_coefficients(m: int, theta: Fraction) -> tuple:
    """Exact kernel coefficients of the degree-m spectral component.

    coef[n] = (-1)^(m-n) C(m,n) (theta+2m-1)(theta+n)_(m-1) / m!; they sum
    to zero for m >= 2 (constant kernels contribute nothing).
    """
    out = []
    for n in range(m + 1):
        val = (Fraction((-1) ** (m - n) * math.comb(m, n), math.factorial(m))
               * (theta + 2 * m - 1) * coalescent.rising(theta + n, m - 1))
        out.append(val)
    return tuple(out)


def g_m(m: int, sigma: ThomaPoint, omega: ThomaPoint, params: ZParams,
        kernels: list | None = None) -> float:
    """The alternating kernel combination at degree m (compensated sum)."""
    if m < 2:
        raise ValueError("defined for m >= 2")
    coefs = g_m_coefficients(m, Fraction(params.theta))
    if kernels is None:
        kernels = [kernel_K(n, sigma, omega, params, cap=m) for n in range(m + 1)]
    total = 0.0
    comp = 0.0
    for n in range(m + 1):
        term = float(coefs[n]) * float(kernels[n])
        fresh = total + term
        if abs(total) >= abs(term):
            comp += (total - fresh) + term
        else:
            comp += (term - fresh) + total
        total = fresh
    return total + comp


@dataclass
class DensityEval:
    """Both truncated series with their tail estimates."""

    t: float
    sigma: ThomaPoint
    omega: ThomaPoint
    truncation: int
    value_mixture: float
    value_spectral: float
    tail_mixture: float
    tail_spectral: float
    kernels: list

    @property
    def tail_estimate(self) -> float:
        return self.tail_mixture + self.tail_spectral


def _spectral_tail_estimate(t: float, theta: float, gvals: dict,
                            m_top: int) -> float:
    """Majorizing-fit extrapolation of |G_m| growth times the eigen-envelope.

    Fits log|G_m| = log c + d m log m on the computed degrees, inflates c so
    every observed point sits below the fit, then sums the fitted envelope
    against exp(-lam_m t) beyond the truncation.
    """
    pts = [(m, abs(g)) for m, g in gvals.items() if abs(g) > 0]
    if len(pts) >= 2:
        xs = np.array([m * math.log(m) for m, _ in pts])
        ys = np.array([math.log(g) for _, g in pts])
        d_fit, logc = np.polyfit(xs, ys, 1)
        logc += max(0.0, float(np.max(ys - (d_fit * xs + logc))))
    else:
        d_fit, logc = 1.0, math.log(max((g for _, g in pts), default=1.0) + 1.0)
    tail = 0.0
    for m in range(m_top + 1, m_top + 400):
        term = math.exp(logc + d_fit * m * math.log(m)
                        - coalescent.lam(m, theta) * t)
        tail += term
        if term < 1e-18 * max(tail, 1.0):
            break
    return tail


def density_eval(t: float, sigma: ThomaPoint, omega: ThomaPoint,
                 truncation: int, params: ZParams) -> DensityEval:
    """Evaluate both density series at a common kernel truncation.

    The mixture tail multiplies the provable coefficient tail bound (sharp
    constant) by the largest observed kernel magnitude; the spectral tail
    extrapolates the fitted growth of the computed components.  Both tails
    are reported, never silently dropped.
    """
    if truncation < 2:
        raise ValueError("truncation must be >= 2")
    theta = float(params.theta)
    kernels = [float(kernel_K(n, sigma, omega, params, cap=truncation))
               for n in range(truncation + 1)]

    mixture = coalescent.d_0(t, theta) + coalescent.d_n(t, 1, theta)
    coef_partial = mixture
    for n in range(2, truncation + 1):
        dn = coalescent.d_n(t, n, theta)
        coef_partial += dn
        mixture += dn * kernels[n]
    k_max = max(1.0, max(abs(k) for k in kernels))
    _, sharp_bound, _ = coalescent.tail_bound_check_sharp(t, theta)
    coef_tail = min(max(0.0, 1.0 - coef_partial) + 1e-12, sharp_bound)
    tail_mix = coef_tail * k_max

    spectral = 1.0
    gvals = {}
    for m in range(2, truncation + 1):
        gm = g_m(m, sigma, omega, params, kernels=kernels[:m + 1])
        gvals[m] = gm
        spectral += math.exp(-coalescent.lam(m, theta) * t) * gm
    tail_spec = _spectral_tail_estimate(t, theta, gvals, truncation)

    return DensityEval(t, sigma, omega, truncation, mixture, spectral,
                       tail_mix, tail_spec, kernels)


def q_mixture(t: float, sigma: ThomaPoint, omega: ThomaPoint, truncation: int,
              params: ZParams) -> float:
    return density_eval(t, sigma, omega, truncation, params).value_mixture


def q_spectral(t: float, sigma: ThomaPoint, omega: ThomaPoint, truncation: int,
               params: ZParams) -> float:
    return density_eval(t, sigma, omega, truncation, params).value_spectral


def ergodic_bound(t: float, theta) -> tuple:
    """The quoted variation-distance bound and the coefficient-tail proxy.

    Returns (bound, proxy) with bound = (theta+1)(theta+2)/2 e^{-(theta+1)t}
    and proxy = sum of the level >= 2 coefficients.  The quoted constant is
    not a true upper bound for the proxy at moderate t (see
    ``ergodic_bound_sharp``).
    """
    thf = float(theta)
    bound = (thf + 1) * (thf + 2) / 2 * math.exp(-(thf + 1) * t)
    return bound, coalescent.tail_mass(t, theta)


def ergodic_bound_sharp(t: float, theta) -> tuple:
    """Provable version with the tight constant (theta+2)(theta+3)/2."""
    thf = float(theta)
    bound = (thf + 2) * (thf + 3) / 2 * math.exp(-(thf + 1) * t)
    return bound, coalescent.tail_mass(t, theta)


@dataclass
class ProbeResult:
    zeta: Partition
    m: int
    approx: object
    target: object

    @property
    def gap(self) -> float:
        return abs(float(self.approx) - float(self.target))


def weak_convergence_probe(zeta: Partition, m: int, params: ZParams) -> ProbeResult:
    """Integrate the level-|zeta| sampling weight against the level-m empirical
    measure at scaled Frobenius points, and compare with the stationary value.

    Exact rational arithmetic throughout; the gap trends to zero as m grows.
    """
    if params.vartheta != 1:
        raise ValueError("probe implemented at vartheta = 1")
    masses, _ = level_masses(m, params)
    total = 0
    for eta in enumerate_partitions(m):
        point = scaled_frobenius(eta)
        total = total + masses[eta] * j_eval(zeta, point, 1)
    target = level_masses(zeta.size, params)[0][zeta]
    return ProbeResult(zeta, m, total, target)


def sample_thoma_points(count: int, seed: int) -> list:
    """Deterministic list of finite-support rational Thoma points."""
    rng = np.random.Generator(np.random.Philox(seed))
    points = []
    for _ in range(count):
        na = int(rng.integers(1, 4))
        nb = int(rng.integers(0, 3))
        raw = [int(rng.integers(1, 9)) for _ in range(na + nb)]
        denom = sum(raw) + int(rng.integers(0, 13))
        alpha = tuple(sorted((Fraction(r, denom) for r in raw[:na]), reverse=True))
        beta = tuple(sorted((Fraction(r, denom) for r in raw[na:]), reverse=True))
        points.append(ThomaPoint(alpha, beta))
    return points
