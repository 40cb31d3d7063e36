"""The diffusion pre-generator on the phi-algebra and its dual jump process.

The operator acts on polynomials in the moment coordinates phi_i (i >= 2;
phi_1 is identically 1).  With rational parameters the action is exact, which
is what makes the duality identity checkable with zero tolerance: applying
the operator to a specialized Schur function must reproduce the one-step
down-recursion exactly.

The dual process is a pure-jump chain on partitions: wait an exponential time
with rate n(n-1+theta)/2 at level n, then take one step of the Young-graph
down chain; the state (1) is absorbing (the jump it would make is invisible
to every test function).  Its radial law is the coalescent module's
coefficient family.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import coalescent
from .graph import YOUNG, down_prob, kernel_H
from .partition import EMPTY, Partition, cocovers, enumerate_partitions
from .symfunc import GradedSymPoly, ThomaPoint, basis_convert, j_eval, schur_in_powersums
from .zmeasure import ZParams, level_masses

SPECTRUM_DEGREE_CAP = 7


class PhiPoly:
    """Polynomial in the coordinates phi_i, i >= 2 (phi_1 is substituted by 1).

    Keys are descending tuples of indices >= 2; the empty tuple is the
    constant monomial.  The weighted degree of phi_i is i.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict | None = None):
        clean = {}
        for key, val in (coeffs or {}).items():
            key = tuple(sorted(key, reverse=True))
            if any(i < 2 for i in key):
                raise ValueError(f"phi indices must be >= 2, got {key}")
            if val:
                clean[key] = val
        self.coeffs = clean

    @classmethod
    def constant(cls, value) -> "PhiPoly":
        return cls({(): value})

    @classmethod
    def variable(cls, i: int) -> "PhiPoly":
        return cls({(i,): Fraction(1)})

    def __eq__(self, other):
        return isinstance(other, PhiPoly) and self.coeffs == other.coeffs

    def __add__(self, other):
        out = dict(self.coeffs)
        for key, val in other.coeffs.items():
            new = out.get(key, 0) + val
            if new:
                out[key] = new
            else:
                out.pop(key, None)
        return PhiPoly(out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, factor) -> "PhiPoly":
        if not factor:
            return PhiPoly()
        return PhiPoly({key: factor * val for key, val in self.coeffs.items()})

    def __mul__(self, other):
        out: dict = {}
        for k1, v1 in self.coeffs.items():
            for k2, v2 in other.coeffs.items():
                key = tuple(sorted(k1 + k2, reverse=True))
                out[key] = out.get(key, 0) + v1 * v2
        return PhiPoly(out)

    def is_zero(self) -> bool:
        return not self.coeffs

    def weighted_degree(self) -> int:
        return max((sum(key) for key in self.coeffs), default=0)

    def __repr__(self):
        if not self.coeffs:
            return "PhiPoly(0)"
        bits = []
        for key in sorted(self.coeffs, key=lambda k: (sum(k), k)):
            mono = "*".join(f"phi{i}" for i in key) or "1"
            bits.append(f"({self.coeffs[key]})*{mono}")
        return "PhiPoly(" + " + ".join(bits) + ")"


def phi_from_powersums(f: GradedSymPoly) -> PhiPoly:
    """Image of a symmetric function under the specialization algebra map.

    Converts to the power-sum basis and drops every index-1 factor
    (phi_1 = 1).
    """
    pexp = basis_convert(f, "powersum", cap=max(12, f.degree))
    out: dict = {}
    for mu, c in pexp.coeffs.items():
        key = tuple(p for p in mu.parts if p >= 2)
        out[key] = out.get(key, 0) + c
    return PhiPoly(out)


def schur_phi(eta: Partition) -> PhiPoly:
    """The specialized Schur function as a PhiPoly."""
    return phi_from_powersums(schur_in_powersums(eta))


def _key_remove(key: tuple, *values) -> tuple:
    bag = list(key)
    for v in values:
        bag.remove(v)
    return tuple(sorted(bag, reverse=True))


def _key_add(key: tuple, *values) -> tuple:
    bag = list(key)
    for v in values:
        if v >= 2:
            bag.append(v)
    return tuple(sorted(bag, reverse=True))


def generator_a_apply(f: PhiPoly, params: ZParams,
                      degree_cap: int | None = None) -> PhiPoly:
    """Apply the pre-generator term by term.

    Three sums: the second-order part with coefficients
    (1/2) i j (phi_{i+j-1} - phi_i phi_j); the vartheta/2 quadratic drift
    feeding phi_{i+j+1} down to phi_i phi_j (with phi_1 = 1); and the linear
    drift mixing phi_i with phi_{i-1}.  The weighted degree never increases
    (asserted).  Exact whenever params and coefficients are rational.
    """
    th = params.vartheta
    zsum = params.zsum
    theta = params.theta
    out: dict = {}

    def add(key, val):
        if val:
            out[key] = out.get(key, 0) + val
            if not out[key]:
                del out[key]

    for key, c in f.coeffs.items():
        counts = Counter(key)
        values = sorted(counts)
        # second-order sum over ordered pairs (i, j), both >= 2
        for i in values:
            for j in values:
                if i == j:
                    mult = counts[i] * (counts[i] - 1)
                else:
                    mult = counts[i] * counts[j]
                if not mult:
                    continue
                factor = Fraction(i * j, 2) * mult * c
                base = _key_remove(key, i, j)
                add(_key_add(base, i + j - 1), factor)
                add(key, -factor)
        # quadratic drift: phi_k pulled apart into phi_i phi_j, i+j = k-1
        for k in values:
            if k < 3:
                continue
            factor = th * Fraction(k, 2) * counts[k] * c
            base = _key_remove(key, k)
            for i in range(1, k - 1):
                j = k - 1 - i
                add(_key_add(base, i, j), factor)
        # linear drift
        for i in values:
            base = _key_remove(key, i)
            up = Fraction(i, 2) * counts[i] * c
            add(_key_add(base, i - 1), up * ((1 - th) * (i - 1) + zsum))
            add(key, -up * ((i - 1) + theta))

    result = PhiPoly(out)
    cap = degree_cap if degree_cap is not None else f.weighted_degree()
    assert result.weighted_degree() <= cap, "generator raised the weighted degree"
    return result


def phi_basis(max_degree: int) -> list:
    """Monomials of weighted degree <= max_degree: partitions with parts >= 2."""
    basis = []
    for d in range(max_degree + 1):
        for mu in enumerate_partitions(d):
            if all(p >= 2 for p in mu.parts):
                basis.append(tuple(mu.parts))
    return basis


@dataclass
class SpectrumReport:
    ok: bool
    max_degree: int
    theta: float
    computed: list
    expected: list
    max_gap: float

    def __str__(self):
        status = "pass" if self.ok else "FAIL"
        return (f"spectrum degree<={self.max_degree} theta={self.theta}: "
                f"{status} (max eigenvalue gap {self.max_gap:.3e})")


def spectrum_check(max_degree: int, params: ZParams,
                   tol: float = 1e-8) -> SpectrumReport:
    """Eigenvalues of the generator on the weighted-degree-capped basis.

    Expected multiset: 0 once, and -m(m-1+theta)/2 with multiplicity
    p(m) - p(m-1) for each 2 <= m <= max_degree.
    """
    if max_degree > SPECTRUM_DEGREE_CAP:
        raise ValueError(f"spectrum check capped at degree {SPECTRUM_DEGREE_CAP}")
    basis = phi_basis(max_degree)
    index = {key: i for i, key in enumerate(basis)}
    mat = np.zeros((len(basis), len(basis)))
    for j, key in enumerate(basis):
        image = generator_a_apply(PhiPoly({key: Fraction(1)}), params)
        for out_key, val in image.coeffs.items():
            mat[index[out_key], j] = float(val)
    computed = sorted(np.linalg.eigvals(mat).real)
    thf = float(params.theta)
    expected = [0.0]
    for m in range(2, max_degree + 1):
        mult = len([mu for mu in enumerate_partitions(m)
                    if all(p >= 2 for p in mu.parts)])
        expected.extend([-m * (m - 1 + thf) / 2] * mult)
    expected.sort()
    gaps = [abs(a - b) for a, b in zip(computed, expected)]
    max_gap = max(gaps) if gaps else 0.0
    ok = len(computed) == len(expected) and max_gap <= tol
    return SpectrumReport(ok, max_degree, thf, computed, expected, max_gap)


def _box_pair_factor(params: ZParams, box) -> Fraction:
    """(z + c)(z' + c) for the vartheta-content c of one box (exact)."""
    i, j = box
    c = (j - 1) - (i - 1) * params.vartheta
    if params.case == "complementary":
        return (params.z + c) * (params.zprime + c)
    re, im = params._exact_parts
    return (re + c) ** 2 + im ** 2


def duality_residual(eta: Partition, params: ZParams) -> PhiPoly:
    """Generator applied to a specialized Schur function minus the one-step
    down-recursion; must vanish identically.

    Exact (rational parameters); restricted to vartheta = 1 where the
    identity is available.
    """
    if params.vartheta != 1:
        raise ValueError("the duality identity is available at vartheta = 1 only")
    n = eta.size
    lam_n = Fraction(n) * (n - 1 + params.theta) / 2
    lhs = generator_a_apply(schur_phi(eta), params)
    rhs = schur_phi(eta).scale(-lam_n)
    for zeta, box in cocovers(eta):
        ratio = _box_pair_factor(params, box)
        rhs = rhs + schur_phi(zeta).scale(Fraction(1, 2) * ratio)
    return lhs - rhs


# ---------------------------------------------------------------------------
# The dual jump process
# ---------------------------------------------------------------------------

@dataclass
class DualState:
    current: Partition
    time: float
    absorbed: bool


def _theta_of(params) -> float:
    if isinstance(params, ZParams):
        return float(params.theta)
    return float(params)


def sub_partitions(nu: Partition) -> dict:
    """All partitions contained in nu, grouped by size."""
    levels: dict = {nu.size: {nu}}
    for n in range(nu.size, 0, -1):
        lower = set()
        for eta in levels.get(n, ()):
            for zeta, _ in cocovers(eta):
                lower.add(zeta)
        if lower:
            levels[n - 1] = lower
    return {n: sorted(s) for n, s in levels.items()}


def dual_transition_prob(nu: Partition, eta: Partition, t: float, theta) -> float:
    """Mass at eta after time t started from nu: d_mn(t) times the down-chain
    hitting kernel.

    Levels below 1 carry the complement d_m0 (absorbed mass under the
    collapsed reading); rows over |eta| >= 1 sum to 1 - d_m0.
    """
    if not nu.contains(eta) or eta.size < 1:
        raise ValueError(f"{eta!r} must be a nonempty sub-partition of {nu!r}")
    if eta == nu:
        dcoef = (1.0 if t == 0 else
                 coalescent.d_mn(t, nu.size, nu.size, theta))
        return dcoef * float(kernel_H(eta, nu))
    if t == 0:
        return 0.0
    return (coalescent.d_mn(t, nu.size, eta.size, theta)
            * float(kernel_H(eta, nu)))


def dual_law(nu: Partition, t: float, theta, collapsed: bool = True) -> dict:
    """Full analytic law over sub-partitions of nu at time t.

    With collapsed=True the state (1) carries d_m0 + d_m1 (absorption); with
    collapsed=False it carries only d_m1 and the law totals 1 - d_m0.
    """
    m = nu.size
    row = coalescent.d_m_row(t, m, theta)
    out = {}
    for n, etas in sub_partitions(nu).items():
        if n < 1:
            continue
        coef = row[n]
        if n == 1 and collapsed:
            coef = row[0] + row[1]
        for eta in etas:
            out[eta] = coef * float(kernel_H(eta, nu))
    return out


def simulate_dual(nu: Partition, t: float, params, rng) -> DualState:
    """One path: exponential holds at rate n(n-1+theta)/2, down steps by the
    Young-graph down chain, absorption at (1)."""
    theta = _theta_of(params)
    state = nu
    clock = 0.0
    while state.size > 1:
        clock += rng.exponential(1.0 / coalescent.lam(state.size, theta))
        if clock > t:
            return DualState(state, t, state.size == 1)
        state = _sample_dist(down_prob(YOUNG, state), rng)
    return DualState(state, t, True)


def _sample_dist(dist: dict, rng) -> Partition:
    u = rng.random()
    acc = 0.0
    last = None
    for key, mass in dist.items():
        acc += float(mass)
        last = key
        if u < acc:
            return key
    return last


def simulate_dual_paths(nu: Partition, t: float, params, n_paths: int,
                        rng) -> dict:
    """Empirical law of the dual process over n_paths independent paths.

    Vectorized level by level: at each level every still-active path draws
    one exponential hold and one categorical down step.
    """
    theta = _theta_of(params)
    levels = sub_partitions(nu)
    states = [eta for n in sorted(levels, reverse=True) for eta in levels[n]]
    index = {eta: i for i, eta in enumerate(states)}
    max_co = max(len(cocovers(eta)) for eta in states if eta.size > 1)
    cum = np.zeros((len(states), max_co))
    succ = np.zeros((len(states), max_co), dtype=np.int64)
    for eta in states:
        if eta.size <= 1:
            continue
        dist = down_prob(YOUNG, eta)
        acc = 0.0
        for k, (zeta, mass) in enumerate(dist.items()):
            acc += float(mass)
            cum[index[eta], k] = acc
            succ[index[eta], k] = index[zeta]
        cum[index[eta], len(dist):] = 1.0

    pos = np.full(n_paths, index[nu], dtype=np.int64)
    clock = np.zeros(n_paths)
    frozen = np.zeros(n_paths, dtype=bool)
    for n in range(nu.size, 1, -1):
        level_ids = np.array([index[eta] for eta in levels[n]])
        active = ~frozen & np.isin(pos, level_ids)
        count = int(active.sum())
        if not count:
            continue
        clock[active] += rng.exponential(1.0 / coalescent.lam(n, theta), count)
        frozen |= active & (clock > t)
        moving = active & ~frozen
        if moving.any():
            u = rng.random(int(moving.sum()))
            rows = pos[moving]
            choice = (cum[rows] < u[:, None]).sum(axis=1)
            pos[moving] = succ[rows, np.minimum(choice, max_co - 1)]
    counts: dict = {}
    for i, eta in enumerate(states):
        c = int((pos == i).sum())
        if c:
            counts[eta] = c
    return counts


def expected_j_given_start(eta: Partition, omega: ThomaPoint, t: float,
                           params: ZParams) -> float:
    """Conditional expectation of the level-m sampling weight of eta along
    the diffusion started at omega, evaluated through the dual process.

    The bracket pairs the radial coefficients with the down-chain kernel; the
    bottom coefficient is the collapsed d_m0 + d_m1 (state (1) is absorbing,
    and its test function is constant 1), which makes the level sum exactly
    one and the t -> infinity limit the stationary expectation.
    """
    if params.vartheta != 1:
        raise ValueError("available at vartheta = 1 only")
    m = eta.size
    theta = float(params.theta)
    masses = {n: level_masses(n, params)[0] for n in range(1, m + 1)}
    if t == 0:
        return float(j_eval(eta, omega, 1))
    row = coalescent.d_m_row(t, m, theta)
    bracket = row[0] + row[1]
    for n in range(2, m + 1):
        if not row[n]:
            continue
        inner = 0.0
        for zeta in sub_partitions(eta).get(n, ()):
            inner += (float(kernel_H(zeta, eta)) * float(j_eval(zeta, omega, 1))
                      / float(masses[n][zeta]))
        bracket += row[n] * inner
    return float(masses[m][eta]) * bracket
