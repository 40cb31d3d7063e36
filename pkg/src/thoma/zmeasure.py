"""The two-parameter-with-Jack partition structure and its up-down chain.

Level-n masses follow the product formula over diagram boxes; the dimensions
come from the graph-module recursion.  With rational inputs everything is
exact, so normalization and coherence can be checked with zero tolerance.

The up chain is derived from harmonicity of mass/dim (the partition-structure
property): p_up(eta, zeta) = weight(eta,zeta) * M(zeta) * dim(eta) /
(M(eta) * dim(zeta)).  Its normalization is asserted, so a wrong derivation
cannot pass silently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .graph import GraphKind, dim, down_prob, edge_weight
from .partition import Partition, covers, enumerate_partitions


class ParameterError(ValueError):
    """Invalid Z-measure parameters (wrong case, nonpositive theta, ...)."""


def _as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10 ** 12)
    return None


def _lattice_spacing(vartheta: Fraction) -> Fraction:
    """Gap between consecutive points of Z + vartheta*Z for rational vartheta."""
    p, q = vartheta.numerator, vartheta.denominator
    return Fraction(math.gcd(p, q), q)


def _real_in_excluded_set(z: Fraction, vartheta: Fraction) -> bool:
    """Whether z = a + vartheta*b for some integers a <= 0, b >= 0."""
    p, q = vartheta.numerator, vartheta.denominator
    # z - (p/q) b integer with b >= 0; solvable iff a linear congruence is.
    zn, zd = z.numerator, z.denominator
    d = zd * q // math.gcd(zd, q)
    lhs = p * (d // q)          # coefficient of b mod d
    rhs = zn * (d // zd) % d
    g = math.gcd(lhs, d)
    if rhs % g:
        return False
    # Some admissible b always reaches a <= 0 since vartheta > 0.
    return True


@dataclass(frozen=True)
class ZParams:
    """Parameter triple (z, z', vartheta) with theta = z*z'/vartheta.

    Principal case: z' is the complex conjugate of z and z avoids the real
    degenerate lattice set.  Complementary case: z, z' are real and lie in
    the same open interval between consecutive points of Z + vartheta*Z.
    Exact rationals are kept whenever the inputs allow, so that masses and
    generator coefficients stay exact.
    """

    z: object
    zprime: object
    vartheta: Fraction
    case: str

    def __post_init__(self):
        if self.case not in ("principal", "complementary"):
            raise ParameterError(f"unknown case {self.case!r}")
        theta = self.theta
        if not (theta > 0):
            raise ParameterError(f"theta = {theta} must be positive")

    # -- constructors --------------------------------------------------------

    @classmethod
    def complementary(cls, z, zprime, vartheta) -> "ZParams":
        vartheta = Fraction(vartheta)
        if vartheta <= 0:
            raise ParameterError("vartheta must be positive")
        zf, zpf = _as_fraction(z), _as_fraction(zprime)
        if zf is None or zpf is None:
            raise ParameterError("complementary case needs real (rational) z, z'")
        sp = _lattice_spacing(vartheta)
        if zf % sp == 0 or zpf % sp == 0:
            raise ParameterError("z, z' must avoid the lattice Z + vartheta*Z")
        if (zf / sp).__floor__() != (zpf / sp).__floor__():
            raise ParameterError(
                "z and z' must lie in the same open interval between "
                "consecutive lattice points")
        return cls(zf, zpf, vartheta, "complementary")

    @classmethod
    def principal(cls, z: complex, vartheta) -> "ZParams":
        vartheta = Fraction(vartheta)
        if vartheta <= 0:
            raise ParameterError("vartheta must be positive")
        z = complex(z)
        if z.imag == 0:
            zf = _as_fraction(z.real)
            if zf is None or _real_in_excluded_set(zf, vartheta):
                raise ParameterError(
                    "real principal z must avoid Z_{<=0} + vartheta*Z_{>=0}")
        return cls(z, z.conjugate(), vartheta, "principal")

    @classmethod
    def create(cls, z, zprime, vartheta) -> "ZParams":
        """Infer the case: conjugate pair -> principal, real pair -> complementary."""
        if isinstance(z, complex) or isinstance(zprime, complex):
            zc, zpc = complex(z), complex(zprime)
            if zc.imag or zpc.imag:
                if abs(zpc - zc.conjugate()) > 1e-12 * max(1.0, abs(zc)):
                    raise ParameterError("non-real parameters must be conjugate")
                return cls.principal(zc, vartheta)
            z, zprime = zc.real, zpc.real
        return cls.complementary(z, zprime, vartheta)

    # -- exact derived quantities --------------------------------------------

    @property
    def _exact_parts(self):
        """(re, im) of z as Fractions if available, else None."""
        if self.case == "complementary":
            return self.z, Fraction(0)
        re = _as_fraction(self.z.real)
        im = _as_fraction(self.z.imag)
        if re is None or im is None:
            return None
        return re, im

    @property
    def zsum(self):
        """z + z' (always real)."""
        if self.case == "complementary":
            return self.z + self.zprime
        parts = self._exact_parts
        if parts is not None:
            return 2 * parts[0]
        return (self.z + self.zprime).real

    @property
    def zprod(self):
        """z * z' (always real and positive in both admissible cases)."""
        if self.case == "complementary":
            return self.z * self.zprime
        parts = self._exact_parts
        if parts is not None:
            return parts[0] ** 2 + parts[1] ** 2
        return (self.z * self.zprime).real

    @property
    def theta(self):
        return self.zprod / self.vartheta

    def pochhammer_pair(self, eta: Partition):
        """The product over boxes of (z + c)(z' + c), c the vartheta-content.

        Real and exact: the principal case pairs conjugate factors, the
        complementary case multiplies two real products.
        """
        th = self.vartheta
        if self.case == "complementary":
            return (z_pochhammer(self.z, eta, th)
                    * z_pochhammer(self.zprime, eta, th))
        parts = self._exact_parts
        if parts is not None:
            re, im = parts
            val = Fraction(1)
            for i, j in eta.boxes():
                c = (j - 1) - (i - 1) * th
                val *= (re + c) ** 2 + im ** 2
            return val
        val = z_pochhammer(self.z, eta, th) * z_pochhammer(self.zprime, eta, th)
        if abs(val.imag) > 1e-12 * max(1.0, abs(val)):
            raise ArithmeticError(f"imaginary residue too large: {val}")
        return val.real


def z_pochhammer(z, eta: Partition, vartheta):
    """Product over boxes (i,j) of eta of (z + (j-1) - (i-1)*vartheta)."""
    val = z ** 0 if not isinstance(z, complex) else complex(1)
    one = 1
    for i, j in eta.boxes():
        val = val * (z + (j - 1) * one - (i - 1) * vartheta)
    return val


def rising(x, k: int):
    """Rising factorial x(x+1)...(x+k-1), empty product 1."""
    val = Fraction(1) if isinstance(x, (Fraction, int)) else 1.0
    for i in range(k):
        val = val * (x + i)
    return val


def m_n(eta: Partition, params: ZParams):
    """Raw level mass of eta under the partition structure.

    dim(eta) * (z)(z') pochhammer pair / (theta rising * H'(eta)); exact
    rational whenever the parameters are.
    """
    n = eta.size
    if n < 1:
        raise ParameterError("level masses are defined for |eta| >= 1")
    from .graph import hook_products

    kind = GraphKind.jack(params.vartheta)
    num = dim(kind, eta) * params.pochhammer_pair(eta)
    den = rising(params.theta, n) * hook_products(eta, params.vartheta).Hprime
    return num / den


@dataclass
class PartitionDistribution:
    """Masses of one level; exact rationals when the inputs are rational."""

    level: int
    masses: dict

    def __post_init__(self):
        for eta, mass in self.masses.items():
            if mass < 0 and not (isinstance(mass, float) and mass > -1e-12):
                raise ValueError(f"negative mass {mass} at {eta!r}")
        total = self.total
        if isinstance(total, Fraction):
            if total != 1:
                raise ValueError(f"level {self.level} masses sum to {total}")
        elif abs(total - 1) > 1e-12:
            raise ValueError(f"level {self.level} masses sum to {total}")

    @property
    def total(self):
        return sum(self.masses.values())


@lru_cache(maxsize=None)
def level_masses(n: int, params: ZParams) -> tuple:
    """Raw masses for every partition of n, plus their total (cached)."""
    masses = {eta: m_n(eta, params) for eta in enumerate_partitions(n)}
    return masses, sum(masses.values())


def level_table(n: int, params: ZParams, normalized: bool = False) -> dict:
    """Masses of level n; pass normalized=True to divide by the level total."""
    masses, total = level_masses(n, params)
    if normalized:
        return {eta: m / total for eta, m in masses.items()}
    return dict(masses)


def level_distribution(n: int, params: ZParams) -> PartitionDistribution:
    return PartitionDistribution(n, level_table(n, params, normalized=True))


def up_prob(eta: Partition, params: ZParams) -> dict:
    """Up-chain law out of eta; masses must sum to exactly 1 (asserted)."""
    kind = GraphKind.jack(params.vartheta)
    n = eta.size
    if n >= 1:
        mass_eta = level_masses(n, params)[0][eta]
    else:
        mass_eta = Fraction(1)
    if not mass_eta:
        raise ParameterError(f"zero mass at {eta!r}")
    upper, _ = level_masses(n + 1, params)
    out = {}
    d_eta = dim(kind, eta)
    for zeta, _box in covers(eta):
        out[zeta] = (edge_weight(kind, eta, zeta) * upper[zeta] * d_eta
                     / (mass_eta * dim(kind, zeta)))
    total = sum(out.values())
    if isinstance(total, Fraction):
        assert total == 1, f"up-chain mass {total} at {eta!r}"
    else:
        assert abs(total - 1) <= 1e-12, f"up-chain mass {total} at {eta!r}"
    return out


def updown_step(eta: Partition, params: ZParams, rng) -> Partition:
    """One Gibbs update: an up move, then a down move (level preserved)."""
    mid = _sample(up_prob(eta, params), rng)
    kind = GraphKind.jack(params.vartheta)
    return _sample(down_prob(kind, mid), rng)


def _sample(dist: dict, rng) -> Partition:
    u = rng.random()
    acc = 0.0
    last = None
    for key, mass in dist.items():
        acc += float(mass)
        last = key
        if u < acc:
            return key
    return last


def updown_transition_matrix(n: int, params: ZParams):
    """States of level n and the exact one-step up-down matrix (row-stochastic)."""
    states = enumerate_partitions(n)
    index = {s: i for i, s in enumerate(states)}
    kind = GraphKind.jack(params.vartheta)
    rows = [[Fraction(0)] * len(states) for _ in states]
    for eta in states:
        for mid, pu in up_prob(eta, params).items():
            for zeta, pd in down_prob(kind, mid).items():
                rows[index[eta]][index[zeta]] += pu * pd
    return states, rows


@dataclass
class UpDownSample:
    """Empirical occupancy of an up-down run, with the exact target alongside."""

    level: int
    steps: int
    burn_in: int
    counts: dict
    target: dict

    def empirical(self) -> dict:
        total = sum(self.counts.values())
        return {eta: c / total for eta, c in self.counts.items()}

    def tv_distance(self) -> float:
        emp = self.empirical()
        keys = set(emp) | set(self.target)
        return 0.5 * sum(abs(emp.get(k, 0.0) - float(self.target.get(k, 0)))
                         for k in keys)


def updown_simulate(n: int, steps: int, params: ZParams, rng,
                    burn_in: int = 0) -> UpDownSample:
    """Run the level-n up-down chain and tally post-burn-in occupancy.

    The transition matrix is precomputed once; the trajectory is sampled by
    inverse-cdf lookups.
    """
    states, rows = updown_transition_matrix(n, params)
    cum = np.cumsum(np.array([[float(x) for x in row] for row in rows]), axis=1)
    target = level_table(n, params, normalized=True)
    start = max(range(len(states)), key=lambda i: target[states[i]])
    counts: dict = {}
    state = start
    uniforms = rng.random(steps + burn_in)
    for step in range(steps + burn_in):
        state = int(np.searchsorted(cum[state], uniforms[step], side="right"))
        if state >= len(states):
            state = len(states) - 1
        if step >= burn_in:
            eta = states[state]
            counts[eta] = counts.get(eta, 0) + 1
    return UpDownSample(n, steps, burn_in, counts, target)
