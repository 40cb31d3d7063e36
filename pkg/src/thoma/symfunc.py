"""Graded symmetric-function algebra at bounded degree.

Exact-rational expansions in the monomial, power-sum, Schur and Jack bases,
plus the specialization that sends power sums to alpha/beta moments of a
Thoma-simplex point.

All degree-d computations run in exactly d variables: that is the stable
range, so the finite-variable coefficients equal the symmetric-function
coefficients.  Jack functions are built as the dominance-triangular
eigenfunctions of the second-order operator extracted from the u-expansion of
the Sekiguchi determinant; the full determinant is kept (``sekiguchi_apply``)
as an oracle for small variable counts.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .graph import GraphKind, dim, edge_weight
from .partition import (EMPTY, Partition, cocovers, covers, dominates,
                        enumerate_partitions)

DEGREE_CAP = 12
JACK_DEGREE_CAP = 8

BASES = ("monomial", "powersum", "schur", "jack_p", "jack_branching")


class CapacityError(ValueError):
    """A request exceeded the configured degree cap."""


# ---------------------------------------------------------------------------
# Thoma simplex points
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ThomaPoint:
    """A finitely supported point (alpha; beta) of the Thoma simplex.

    Both coordinate lists are non-increasing and nonnegative with total mass
    at most 1; gamma is the residual mass.  Coordinates may be exact
    rationals (then every specialization stays exact) or floats.
    """

    alpha: tuple = ()
    beta: tuple = ()

    def __post_init__(self):
        for seq in (self.alpha, self.beta):
            for i, x in enumerate(seq):
                if x < 0 or x > 1:
                    raise ValueError(f"coordinates must lie in [0,1]: {seq}")
                if i and seq[i - 1] < x:
                    raise ValueError(f"coordinates must be non-increasing: {seq}")
        total = sum(self.alpha) + sum(self.beta)
        if total > 1 and float(total) > 1 + 1e-12:
            raise ValueError(f"alpha/beta mass {total} exceeds 1")

    @property
    def gamma(self):
        return 1 - sum(self.alpha) - sum(self.beta)

    def moment(self, k: int, vartheta):
        """Image of the k-th power sum: 1 for k=1, else the signed moment sum."""
        if k < 1:
            raise ValueError("power sums are indexed from 1")
        if k == 1:
            return Fraction(1)
        return (sum(x ** k for x in self.alpha)
                + (-vartheta) ** (k - 1) * sum(x ** k for x in self.beta))


def parse_thoma(text: str) -> ThomaPoint:
    """Parse "a=0.5,0.3;b=0.1" into a ThomaPoint with exact coordinates."""
    alpha: tuple = ()
    beta: tuple = ()
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        key, _, vals = chunk.partition("=")
        coords = tuple(Fraction(v) for v in vals.split(",") if v.strip())
        if key.strip() == "a":
            alpha = coords
        elif key.strip() == "b":
            beta = coords
        else:
            raise ValueError(f"unknown Thoma coordinate block {key!r}")
    return ThomaPoint(alpha, beta)


# ---------------------------------------------------------------------------
# Graded symmetric polynomials
# ---------------------------------------------------------------------------

class GradedSymPoly:
    """A sparse, basis-tagged symmetric function of bounded degree.

    ``coeffs`` maps Partition -> exact rational; zero coefficients are
    dropped.  Jack bases carry their vartheta.
    """

    __slots__ = ("degree", "basis", "vartheta", "coeffs")

    def __init__(self, degree: int, basis: str, coeffs: dict, vartheta=None):
        if basis not in BASES:
            raise ValueError(f"unknown basis {basis!r}")
        if basis.startswith("jack"):
            if vartheta is None:
                raise ValueError("Jack bases need vartheta")
            vartheta = Fraction(vartheta)
        else:
            vartheta = None
        clean = {}
        for key, val in coeffs.items():
            if not isinstance(key, Partition):
                key = Partition(key)
            if key.size > degree:
                raise ValueError(f"key {key!r} exceeds degree {degree}")
            if val:
                clean[key] = val
        self.degree = degree
        self.basis = basis
        self.vartheta = vartheta
        self.coeffs = clean

    def __eq__(self, other):
        return (isinstance(other, GradedSymPoly)
                and self.basis == other.basis
                and self.vartheta == other.vartheta
                and self.coeffs == other.coeffs)

    def __repr__(self):
        return (f"GradedSymPoly(degree={self.degree}, basis={self.basis!r}, "
                f"coeffs={self.coeffs!r})")


# -- monomial/power-sum plumbing --------------------------------------------

def _mult_by_p(coeffs: dict, k: int) -> dict:
    """Multiply a monomial-basis expansion by the power sum p_k.

    Coefficient rule: attaching k to one part (or starting a new part) of mu
    lands on nu with multiplicity equal to the number of parts of nu with the
    new value.
    """
    out: dict = {}
    for mu, c in coeffs.items():
        seen = set()
        for u in (0,) + mu.parts:
            if u in seen:
                continue
            seen.add(u)
            bag = list(mu.parts)
            if u:
                bag.remove(u)
            bag.append(u + k)
            nu = Partition(sorted(bag, reverse=True))
            contrib = c * nu.multiplicity(u + k)
            out[nu] = out.get(nu, 0) + contrib
    return {key: val for key, val in out.items() if val}


@lru_cache(maxsize=None)
def _p_in_monomials(mu_parts: tuple) -> tuple:
    """Expansion of the power-sum product p_mu in the monomial basis."""
    coeffs = {EMPTY: Fraction(1)}
    for k in mu_parts:
        coeffs = _mult_by_p(coeffs, k)
    return tuple(sorted(coeffs.items()))


@lru_cache(maxsize=None)
def _m_to_p_table(d: int) -> dict:
    """For each mu of size d: the power-sum expansion of m_mu (Gauss-Jordan)."""
    parts = enumerate_partitions(d)
    index = {mu: i for i, mu in enumerate(parts)}
    n = len(parts)
    # Columns of M are the monomial expansions of p_mu; invert M exactly.
    mat = [[Fraction(0)] * n for _ in range(n)]
    for j, mu in enumerate(parts):
        for nu, c in _p_in_monomials(mu.parts):
            mat[index[nu]][j] = Fraction(c)
    inv = [[Fraction(1) if i == j else Fraction(0) for j in range(n)]
           for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if mat[r][col])
        mat[col], mat[piv] = mat[piv], mat[col]
        inv[col], inv[piv] = inv[piv], inv[col]
        scale = mat[col][col]
        mat[col] = [x / scale for x in mat[col]]
        inv[col] = [x / scale for x in inv[col]]
        for r in range(n):
            if r != col and mat[r][col]:
                f = mat[r][col]
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[col])]
                inv[r] = [a - f * b for a, b in zip(inv[r], inv[col])]
    table = {}
    for i, mu in enumerate(parts):
        table[mu] = {parts[j]: inv[j][i] for j in range(n) if inv[j][i]}
    return table


def _convert_p_to_m(coeffs: dict) -> dict:
    out: dict = {}
    for mu, c in coeffs.items():
        for nu, k in _p_in_monomials(mu.parts):
            out[nu] = out.get(nu, 0) + c * k
    return {k: v for k, v in out.items() if v}


def _convert_m_to_p(coeffs: dict, cap: int) -> dict:
    out: dict = {}
    for mu, c in coeffs.items():
        if mu.size > cap:
            raise CapacityError(f"degree {mu.size} above cap {cap}")
        for nu, k in _m_to_p_table(mu.size)[mu].items():
            out[nu] = out.get(nu, 0) + c * k
    return {k: v for k, v in out.items() if v}


# -- symmetric-group characters (border-strip recursion) ---------------------

def _border_strip_removals(parts: tuple, r: int):
    """All ways to remove a border strip of size r; yields (rest, height)."""
    l = len(parts)
    if l == 0:
        return
    beta = [parts[i] + (l - 1 - i) for i in range(l)]
    bset = set(beta)
    for b in beta:
        nb = b - r
        if nb >= 0 and nb not in bset:
            height = sum(1 for x in beta if nb < x < b)
            newbeta = sorted((bset - {b}) | {nb}, reverse=True)
            rest = tuple(newbeta[i] - (l - 1 - i) for i in range(l))
            yield tuple(p for p in rest if p), height


@lru_cache(maxsize=None)
def sym_character(eta_parts: tuple, mu_parts: tuple) -> int:
    """Irreducible symmetric-group character value chi^eta(mu)."""
    if not mu_parts:
        return 1 if not eta_parts else 0
    r, rest = mu_parts[0], mu_parts[1:]
    return sum((-1) ** height * sym_character(sub, rest)
               for sub, height in _border_strip_removals(eta_parts, r))


def _cycle_class_size_denom(mu: Partition) -> int:
    """The centralizer order z_mu = prod over part values i of i^m_i * m_i!."""
    z = 1
    for i in set(mu.parts):
        m = mu.multiplicity(i)
        z *= i ** m * math.factorial(m)
    return z


def schur_in_powersums(eta: Partition) -> GradedSymPoly:
    """Schur function in the power-sum basis via the character expansion."""
    coeffs: dict = {}
    for mu in enumerate_partitions(eta.size):
        chi = sym_character(eta.parts, mu.parts)
        if chi:
            coeffs[mu] = Fraction(chi, _cycle_class_size_denom(mu))
    return GradedSymPoly(eta.size, "powersum", coeffs)


def _convert_s_to_p(coeffs: dict) -> dict:
    out: dict = {}
    for eta, c in coeffs.items():
        for mu, k in schur_in_powersums(eta).coeffs.items():
            out[mu] = out.get(mu, 0) + c * k
    return {k: v for k, v in out.items() if v}


def _convert_p_to_s(coeffs: dict) -> dict:
    # p_mu = sum over eta of chi^eta(mu) s_eta.
    out: dict = {}
    for mu, c in coeffs.items():
        for eta in enumerate_partitions(mu.size):
            chi = sym_character(eta.parts, mu.parts)
            if chi:
                out[eta] = out.get(eta, 0) + c * chi
    return {k: v for k, v in out.items() if v}


# ---------------------------------------------------------------------------
# Jack functions
# ---------------------------------------------------------------------------

def _distinct_permutations(vals: tuple):
    """Distinct permutations of a multiset (plain lexicographic successor walk)."""
    cur = sorted(vals)
    n = len(cur)
    while True:
        yield tuple(cur)
        i = n - 2
        while i >= 0 and cur[i] >= cur[i + 1]:
            i -= 1
        if i < 0:
            return
        j = n - 1
        while cur[j] <= cur[i]:
            j -= 1
        cur[i], cur[j] = cur[j], cur[i]
        cur[i + 1:] = reversed(cur[i + 1:])


def _sorted_key(expvec: tuple) -> tuple:
    return tuple(sorted(expvec, reverse=True))


@lru_cache(maxsize=None)
def _lb_apply_m(mu: Partition, nvars: int, vartheta: Fraction) -> tuple:
    """Action of the degree-preserving second-order operator on m_mu.

    This is the u^(n-2) coefficient of the Sekiguchi determinant, normalized
    so its eigenvalue on the Jack function of lambda is
    sum(l_i*(l_i-1))/2 + vartheta * sum((n-i)*l_i).  Returns the monomial
    expansion as a tuple of (Partition, Fraction) pairs; support is dominated
    by mu.
    """
    padded = tuple(mu.parts) + (0,) * (nvars - len(mu.parts))
    if len(padded) != nvars:
        raise ValueError(f"{mu!r} needs more than {nvars} variables")
    acc: dict = {}

    def add(vec, coef):
        acc[vec] = acc.get(vec, 0) + coef

    diag2 = Fraction(sum(p * (p - 1) for p in mu.parts), 2)
    for vec in _distinct_permutations(padded):
        if diag2:
            add(vec, diag2)
        for i in range(nvars):
            a = vec[i]
            for j in range(i + 1, nvars):
                b = vec[j]
                if a == b:
                    if a:
                        add(vec, vartheta * a)
                    continue
                hi, lo = (a, b) if a > b else (b, a)
                if a < b:
                    continue  # handled from the partner term of the orbit
                add(vec, vartheta * hi)
                swapped = list(vec)
                swapped[i], swapped[j] = b, a
                add(tuple(swapped), vartheta * hi)
                spread = vartheta * (hi - lo)
                mid = list(vec)
                for s in range(1, hi - lo):
                    mid[i], mid[j] = hi - s, lo + s
                    add(tuple(mid), spread)

    out = {}
    for vec, coef in acc.items():
        if vec == _sorted_key(vec) and coef:
            out[Partition(tuple(p for p in vec if p))] = coef
    return tuple(sorted(out.items()))


def _lb_eigenvalue(lam: Partition, nvars: int, vartheta: Fraction) -> Fraction:
    val = Fraction(sum(p * (p - 1) for p in lam.parts), 2)
    val += vartheta * sum((nvars - i) * p for i, p in enumerate(lam.parts, start=1))
    return val


_JACK_P_CACHE: dict = {}


def jack_in_monomials(eta: Partition, vartheta, cap: int | None = None) -> GradedSymPoly:
    """Monic (P-normalized) Jack function as a monomial expansion.

    The unique dominance-triangular eigenfunction with leading coefficient 1,
    found by back-substitution against the second-order operator.  Eigenvalue
    distinctness across dominance-comparable pairs is asserted on every solve.
    """
    vartheta = Fraction(vartheta)
    if vartheta <= 0:
        raise ValueError("vartheta must be positive")
    cap = JACK_DEGREE_CAP if cap is None else cap
    if eta.size > cap:
        raise CapacityError(f"degree {eta.size} above Jack cap {cap}")
    key = (eta, vartheta)
    cached = _JACK_P_CACHE.get(key)
    if cached is not None:
        return cached

    n = eta.size
    if n == 0:
        poly = GradedSymPoly(0, "monomial", {EMPTY: Fraction(1)})
        _JACK_P_CACHE[key] = poly
        return poly
    level = enumerate_partitions(n)  # reverse-lex refines dominance
    ev_eta = _lb_eigenvalue(eta, n, vartheta)
    for mu in level:
        if mu != eta and dominates(eta, mu):
            assert _lb_eigenvalue(mu, n, vartheta) != ev_eta, \
                f"eigenvalue collision between {eta!r} and {mu!r}"

    coeffs = {eta: Fraction(1)}
    start = level.index(eta)
    for mu in level[start + 1:]:
        rhs = Fraction(0)
        for nu, c in coeffs.items():
            for target, val in _lb_apply_m(nu, n, vartheta):
                if target == mu:
                    rhs += c * val
        if rhs:
            coeffs[mu] = rhs / (ev_eta - _lb_eigenvalue(mu, n, vartheta))
    poly = GradedSymPoly(n, "monomial", coeffs)
    _JACK_P_CACHE[key] = poly
    return poly


def _expand_in_jack_p(coeffs: dict, degree: int, vartheta: Fraction) -> dict:
    """Write a homogeneous monomial expansion in the monic Jack basis."""
    rem = dict(coeffs)
    out = {}
    for mu in enumerate_partitions(degree):
        c = rem.get(mu)
        if c:
            out[mu] = c
            for nu, val in jack_in_monomials(mu, vartheta, cap=degree).coeffs.items():
                left = rem.get(nu, 0) - c * val
                if left:
                    rem[nu] = left
                else:
                    rem.pop(nu, None)
    if rem:
        raise AssertionError(f"non-triangular residue in Jack expansion: {rem}")
    return out


class PieriInconsistency(Exception):
    """Raised only on request; inconsistencies are normally reported as data."""


_BRANCHING_CACHE: dict = {}


def _branching_scalars(vartheta: Fraction, max_level: int) -> dict:
    """Scalars c_eta rescaling monic Jack functions so the branching-graph
    Pieri rule p_1 * J_eta = sum of edge_weight(eta,nu) * J_nu holds exactly.

    The scalar of each nu is pinned through its first parent and re-derived
    through every other parent; disagreements are collected in ``report``
    rather than patched.  Returns {"scalars": {...}, "report": [...]}.
    """
    state = _BRANCHING_CACHE.setdefault(
        vartheta, {"scalars": {EMPTY: Fraction(1)}, "report": [], "level": 0})
    kind = GraphKind.jack(vartheta)
    while state["level"] < max_level:
        lev = state["level"]
        pieri: dict = {}
        for eta in enumerate_partitions(lev):
            p1f = _mult_by_p(jack_in_monomials(eta, vartheta, cap=lev).coeffs, 1)
            pieri[eta] = _expand_in_jack_p(p1f, lev + 1, vartheta)
        for nu in enumerate_partitions(lev + 1):
            pinned = None
            for eta, _ in cocovers(nu):
                psi = pieri[eta].get(nu, Fraction(0))
                cand = state["scalars"][eta] * psi / edge_weight(kind, eta, nu)
                if pinned is None:
                    pinned = cand
                    state["scalars"][nu] = cand
                elif cand != pinned:
                    state["report"].append(
                        {"vartheta": vartheta, "nu": nu, "parent": eta,
                         "pinned": pinned, "candidate": cand})
        state["level"] = lev + 1
    return state


def jack_branching(eta: Partition, vartheta, cap: int | None = None) -> GradedSymPoly:
    """Jack function in the normalization pinned by the branching graph.

    Characterized by J of the empty partition = 1, J_(1) = p_1, and the exact
    Pieri rule with the graph edge weights; equivalently the expansion
    (p_1)^n = sum over |eta| = n of dim(eta) * J_eta holds level by level.
    Returned as a monomial expansion.
    """
    vartheta = Fraction(vartheta)
    cap = JACK_DEGREE_CAP if cap is None else cap
    if eta.size > cap:
        raise CapacityError(f"degree {eta.size} above Jack cap {cap}")
    scalars = _branching_scalars(vartheta, eta.size)["scalars"]
    base = jack_in_monomials(eta, vartheta, cap=cap)
    c = scalars[eta]
    return GradedSymPoly(eta.size, "monomial",
                         {mu: c * v for mu, v in base.coeffs.items()})


def pieri_report(vartheta, max_level: int) -> list:
    """Parent-consistency failures observed while pinning scalars (expected empty)."""
    return list(_branching_scalars(Fraction(vartheta), max_level)["report"])


# ---------------------------------------------------------------------------
# Basis conversion and evaluation
# ---------------------------------------------------------------------------

def basis_convert(f: GradedSymPoly, target: str, vartheta=None,
                  cap: int | None = None) -> GradedSymPoly:
    """Exact change of basis; round trips are identities.

    Jack targets need a vartheta (taken from the source poly if tagged).
    """
    cap = DEGREE_CAP if cap is None else cap
    if f.degree > cap:
        raise CapacityError(f"degree {f.degree} above cap {cap}")
    if target not in BASES:
        raise ValueError(f"unknown basis {target!r}")
    th = Fraction(vartheta) if vartheta is not None else f.vartheta
    if f.basis == target and (not target.startswith("jack") or th == f.vartheta):
        return f

    # Everything routes through the monomial basis.
    if f.basis == "monomial":
        mono = dict(f.coeffs)
    elif f.basis == "powersum":
        mono = _convert_p_to_m(f.coeffs)
    elif f.basis == "schur":
        mono = _convert_p_to_m(_convert_s_to_p(f.coeffs))
    else:
        builder = jack_in_monomials if f.basis == "jack_p" else jack_branching
        mono = {}
        for eta, c in f.coeffs.items():
            for mu, v in builder(eta, f.vartheta, cap=max(cap, eta.size)).coeffs.items():
                mono[mu] = mono.get(mu, 0) + c * v
        mono = {k: v for k, v in mono.items() if v}

    if target == "monomial":
        return GradedSymPoly(f.degree, "monomial", mono)
    if target == "powersum":
        return GradedSymPoly(f.degree, "powersum", _convert_m_to_p(mono, cap))
    if target == "schur":
        pexp = _convert_m_to_p(mono, cap)
        return GradedSymPoly(f.degree, "schur", _convert_p_to_s(pexp))

    if th is None:
        raise ValueError("conversion to a Jack basis needs vartheta")
    out: dict = {}
    by_size: dict = {}
    for mu, c in mono.items():
        by_size.setdefault(mu.size, {})[mu] = c
    for size, chunk in by_size.items():
        in_p = _expand_in_jack_p(chunk, size, th)
        if target == "jack_p":
            for eta, c in in_p.items():
                out[eta] = out.get(eta, 0) + c
        else:
            scalars = _branching_scalars(th, size)["scalars"]
            for eta, c in in_p.items():
                out[eta] = out.get(eta, 0) + c / scalars[eta]
    return GradedSymPoly(f.degree, target, out, vartheta=th)


def schur_eval(eta: Partition, xs) -> float:
    """Schur polynomial value via the bialternant ratio.

    Needs at least as many variables as eta has rows.  Nearly coincident
    entries (pairwise gap below 1e-9) fall back to the exact monomial
    expansion to dodge Vandermonde cancellation.
    """
    xs = list(xs)
    n = len(xs)
    if n < len(eta):
        raise ValueError(f"need at least {len(eta)} variables for {eta!r}")
    if n == 0:
        return 1.0 if eta == EMPTY else 0.0
    close = any(abs(float(xs[i]) - float(xs[j])) < 1e-9
                for i in range(n) for j in range(i + 1, n))
    if close:
        mono = basis_convert(GradedSymPoly(eta.size, "schur", {eta: Fraction(1)}),
                             "monomial", cap=max(DEGREE_CAP, eta.size))
        total = 0.0
        for mu, c in mono.coeffs.items():
            if len(mu) > n:
                continue
            padded = tuple(mu.parts) + (0,) * (n - len(mu))
            total += float(c) * sum(
                math.prod(float(x) ** e for x, e in zip(xs, vec))
                for vec in _distinct_permutations(padded))
        return total

    import numpy as np

    lam = tuple(eta.parts) + (0,) * (n - len(eta))
    num = np.array([[float(x) ** (lam[j] + n - 1 - j) for j in range(n)]
                    for x in xs])
    den = np.array([[float(x) ** (n - 1 - j) for j in range(n)] for x in xs])
    return float(np.linalg.det(num) / np.linalg.det(den))


def specialize(f: GradedSymPoly, omega: ThomaPoint, vartheta):
    """Evaluate f under the Thoma-simplex homomorphism (p_1 maps to 1).

    Multiplicative over power-sum products; exact when everything is rational.
    """
    pexp = basis_convert(f, "powersum", cap=max(DEGREE_CAP, f.degree))
    moments: dict = {}
    total = 0
    for mu, c in pexp.coeffs.items():
        term = c
        for k in mu.parts:
            val = moments.get(k)
            if val is None:
                val = omega.moment(k, vartheta)
                moments[k] = val
            term = term * val
        total = total + term
    return total


_JACK_PSUM_CACHE: dict = {}


def _jack_branching_powersums(eta: Partition, vartheta: Fraction):
    key = (eta, vartheta)
    cached = _JACK_PSUM_CACHE.get(key)
    if cached is None:
        poly = basis_convert(jack_branching(eta, vartheta), "powersum")
        cached = tuple(poly.coeffs.items())
        _JACK_PSUM_CACHE[key] = cached
    return cached


def j_eval(eta: Partition, omega: ThomaPoint, vartheta):
    """dim(eta) times the specialized branching-normalized Jack function.

    These are the sampling weights: they sum to 1 over each level.
    """
    vartheta = Fraction(vartheta)
    moments: dict = {1: Fraction(1)}
    total = 0
    for mu, c in _jack_branching_powersums(eta, vartheta):
        term = c
        for k in mu.parts:
            val = moments.get(k)
            if val is None:
                val = omega.moment(k, vartheta)
                moments[k] = val
            term = term * val
        total = total + term
    return dim(GraphKind.jack(vartheta), eta) * total


def j_eval_level(n: int, omega: ThomaPoint, vartheta) -> dict:
    """j_eval for every partition of n at once (shared moment table)."""
    return {eta: j_eval(eta, omega, vartheta) for eta in enumerate_partitions(n)}


# ---------------------------------------------------------------------------
# Sekiguchi determinant (oracle for small variable counts)
# ---------------------------------------------------------------------------

def _poly_is_symmetric(poly: dict) -> bool:
    canon: dict = {}
    for vec, c in poly.items():
        key = _sorted_key(vec)
        canon.setdefault(key, set()).add(c)
    for vec, c in poly.items():
        if len(canon[_sorted_key(vec)]) != 1:
            return False
    return True


def _mul_monomial(poly: dict, shift: tuple) -> dict:
    return {tuple(e + s for e, s in zip(vec, shift)): c for vec, c in poly.items()}


def _mul_var(poly: dict, i: int) -> dict:
    out = {}
    for vec, c in poly.items():
        key = vec[:i] + (vec[i] + 1,) + vec[i + 1:]
        out[key] = c
    return out


def _euler_var(poly: dict, i: int) -> dict:
    """x_i * d/dx_i."""
    out = {}
    for vec, c in poly.items():
        if vec[i]:
            out[vec] = c * vec[i]
    return out


def _add_into(acc: dict, poly: dict, scale=1):
    for vec, c in poly.items():
        val = acc.get(vec, 0) + scale * c
        if val:
            acc[vec] = val
        else:
            acc.pop(vec, None)


def _div_linear(poly: dict, a: int, b: int) -> dict:
    """Exact division by (x_a - x_b); raises if the remainder is nonzero.

    Horner descent on the x_a-degree: with A_j the degree-j slice,
    q_{j-1} = lower_a(A_j + x_b * q_j), and A_0 + x_b * q_0 must vanish.
    """
    if not poly:
        return {}
    by_dega: dict = {}
    for vec, c in poly.items():
        by_dega.setdefault(vec[a], {})[vec] = c
    quot: dict = {}
    qj: dict = {}  # q_j, keys carry x_a-exponent exactly j
    for j in range(max(by_dega), 0, -1):
        cur = dict(by_dega.get(j, {}))
        for vec, c in qj.items():
            nv = vec[:b] + (vec[b] + 1,) + vec[b + 1:]
            _add_into(cur, {nv: c})
        qj = {}
        for vec, c in cur.items():
            nv = vec[:a] + (vec[a] - 1,) + vec[a + 1:]
            qj[nv] = c
        _add_into(quot, qj)
    rem = dict(by_dega.get(0, {}))
    for vec, c in qj.items():
        nv = vec[:b] + (vec[b] + 1,) + vec[b + 1:]
        _add_into(rem, {nv: c})
    if rem:
        raise ArithmeticError("inexact division by Vandermonde factor")
    return quot


def sekiguchi_apply(f: dict, nvars: int, vartheta) -> list:
    """Apply the Sekiguchi determinant operator to a symmetric polynomial.

    ``f`` maps exponent tuples of length nvars to exact rationals.  Returns
    the list of u-power coefficients [u^0, ..., u^nvars], each again a
    polynomial dict.  Enforced for nvars <= 8 (the expansion sums over all
    permutations); the eigen-solve path uses the extracted second-order
    operator instead.
    """
    vartheta = Fraction(vartheta)
    if nvars > 8:
        raise CapacityError("direct Sekiguchi expansion enforced for nvars <= 8")
    if any(len(vec) != nvars for vec in f):
        raise ValueError("exponent tuples must have length nvars")
    if not _poly_is_symmetric(f):
        raise ValueError("sekiguchi_apply needs a symmetric input")

    total = [dict() for _ in range(nvars + 1)]
    for perm in itertools.permutations(range(nvars)):
        sign = 1
        seen = list(perm)
        for i in range(nvars):  # parity by counting inversions
            for j in range(i + 1, nvars):
                if seen[i] > seen[j]:
                    sign = -sign
        # Row i carries x_i^(n-1-perm[i]) * (u + (n-1-perm[i])*vartheta + x_i d_i).
        stages = [dict(f)]  # index = power of u
        for i in range(nvars):
            c = (nvars - 1 - perm[i]) * vartheta
            nxt = [dict() for _ in range(len(stages) + 1)]
            for d, poly in enumerate(stages):
                if not poly:
                    continue
                _add_into(nxt[d + 1], poly)
                _add_into(nxt[d], poly, c)
                _add_into(nxt[d], _euler_var(poly, i))
            stages = nxt
        shift = tuple(nvars - 1 - perm[i] for i in range(nvars))
        for d, poly in enumerate(stages):
            _add_into(total[d], _mul_monomial(poly, shift), sign)

    out = []
    for poly in total:
        for a in range(nvars):
            for b in range(a + 1, nvars):
                poly = _div_linear(poly, a, b)
        if not _poly_is_symmetric(poly):
            raise ArithmeticError("Sekiguchi image failed the symmetry check")
        out.append(poly)
    return out


def sekiguchi_eigenvalue(lam: Partition, nvars: int, vartheta, u):
    """prod over i of (lam_i + (n-i)*vartheta + u)."""
    vartheta = Fraction(vartheta)
    val = 1
    for i in range(1, nvars + 1):
        li = lam.parts[i - 1] if i <= len(lam) else 0
        val = val * (li + (nvars - i) * vartheta + u)
    return val
