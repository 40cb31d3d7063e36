"""Kingman and Jack branching graphs.

Edge weights come from the Pieri coefficients of monomial (Kingman) and Jack
(parameter vartheta) symmetric functions.  Dimensions are defined by the
one-step recursion dim(zeta) = sum over eta ⊂ zeta of weight(eta, zeta) *
dim(eta); the textbook closed forms are treated as test targets, never as the
implementation (see ``closed_form_report``).

All arithmetic is exact rational.  Caches are plain dicts warmed on first use;
after warm-up they are read-only and safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .partition import EMPTY, Partition, arm_leg, cocovers, covers


@dataclass(frozen=True)
class GraphKind:
    """Which branching graph: Kingman, or Jack with parameter vartheta > 0.

    Jack(1) is the Young graph: every edge weight is 1.
    """

    family: str
    vartheta: Fraction | None = None

    def __post_init__(self):
        if self.family not in ("kingman", "jack"):
            raise ValueError(f"unknown graph family {self.family!r}")
        if self.family == "jack":
            if self.vartheta is None or self.vartheta <= 0:
                raise ValueError("Jack graph needs vartheta > 0")
        elif self.vartheta is not None:
            raise ValueError("Kingman graph takes no parameter")

    @classmethod
    def kingman(cls) -> "GraphKind":
        return cls("kingman")

    @classmethod
    def jack(cls, vartheta) -> "GraphKind":
        return cls("jack", Fraction(vartheta))


KINGMAN = GraphKind.kingman()
YOUNG = GraphKind.jack(1)


def added_box(eta: Partition, zeta: Partition):
    """The unique box of zeta missing from eta, or raise if not a cover pair."""
    if zeta.size != eta.size + 1 or not zeta.contains(eta):
        raise ValueError(f"{zeta!r} does not cover {eta!r}")
    for i in range(1, len(zeta) + 1):
        old = eta.parts[i - 1] if i <= len(eta) else 0
        if zeta.parts[i - 1] != old:
            return (i, zeta.parts[i - 1])
    raise AssertionError("cover pair with no differing row")


def edge_weight(kind: GraphKind, eta: Partition, zeta: Partition) -> Fraction:
    """Pieri edge weight between a cover pair eta ⊂ zeta.

    Kingman: the multiplicity in zeta of the new part's value.
    Jack(vartheta): product over the boxes of eta sitting in the new box's
    column of the four-factor arm/leg ratio; empty column gives 1.
    """
    i, j = added_box(eta, zeta)
    if kind.family == "kingman":
        return Fraction(zeta.multiplicity(zeta.parts[i - 1]))
    th = kind.vartheta
    w = Fraction(1)
    col_height = eta.conjugate().parts[j - 1] if eta and j <= eta.parts[0] else 0
    for row in range(1, col_height + 1):
        a, l = arm_leg(eta, (row, j))
        w *= Fraction((a + (l + 2) * th) * (a + 1 + l * th),
                      (a + 1 + (l + 1) * th) * (a + (l + 1) * th))
    return w


_DIM_CACHE: dict = {}


def dim(kind: GraphKind, eta: Partition) -> Fraction:
    """Total path weight from the empty partition to eta (memoized recursion)."""
    key = (kind, eta)
    cached = _DIM_CACHE.get(key)
    if cached is not None:
        return cached
    if not eta:
        value = Fraction(1)
    else:
        value = sum(edge_weight(kind, sub, eta) * dim(kind, sub)
                    for sub, _ in cocovers(eta))
    _DIM_CACHE[key] = value
    return value


_RELDIM_CACHE: dict = {}


def relative_dim(kind: GraphKind, eta: Partition, nu: Partition) -> Fraction:
    """Total weight of monotone paths from eta up to nu.

    Computed by the one-step backward recursion with memoization; equals
    dim(nu) when eta is empty and 1 when eta == nu.
    """
    if not nu.contains(eta):
        raise ValueError(f"{eta!r} is not contained in {nu!r}")
    key = (kind, eta, nu)
    cached = _RELDIM_CACHE.get(key)
    if cached is not None:
        return cached
    if eta == nu:
        value = Fraction(1)
    else:
        value = Fraction(0)
        for mid, _ in covers(eta):
            if nu.contains(mid):
                value += edge_weight(kind, eta, mid) * relative_dim(kind, mid, nu)
    _RELDIM_CACHE[key] = value
    return value


@dataclass(frozen=True)
class HookProducts:
    """The two box-wise hook products H and H' of a diagram at a given vartheta."""

    H: Fraction
    Hprime: Fraction


def hook_products(eta: Partition, vartheta) -> HookProducts:
    """H(eta) = prod(a+1+l*vartheta) and H'(eta) = prod(a+(1+l)*vartheta)."""
    th = Fraction(vartheta)
    h = hp = Fraction(1)
    for box in eta.boxes():
        a, l = arm_leg(eta, box)
        h *= a + 1 + l * th
        hp *= a + (1 + l) * th
    return HookProducts(h, hp)


def down_prob(kind: GraphKind, zeta: Partition) -> dict[Partition, Fraction]:
    """One-step down-chain law: mass weight(eta,zeta)*dim(eta)/dim(zeta) per cocover.

    The masses are exact rationals summing to exactly 1.
    """
    if not zeta:
        raise ValueError("down chain undefined at the empty partition")
    dz = dim(kind, zeta)
    out = {}
    for eta, _ in cocovers(zeta):
        out[eta] = edge_weight(kind, eta, zeta) * dim(kind, eta) / dz
    return out


def kernel_H(eta: Partition, nu: Partition, vartheta=1) -> Fraction:
    """Multi-step down-chain hitting kernel dim(eta)*dim(eta,nu)/dim(nu).

    For fixed nu the level-n row (all eta ⊂ nu with |eta| = n) sums to 1.
    """
    kind = GraphKind.jack(vartheta)
    return (dim(kind, eta) * relative_dim(kind, eta, nu)) / dim(kind, nu)


def kingman_closed_form(eta: Partition) -> Fraction:
    """n! / (eta_1! ... eta_l!), the multinomial count of set partitions."""
    val = Fraction(math.factorial(eta.size))
    for p in eta.parts:
        val /= math.factorial(p)
    return val


def jack_closed_form_hh(eta: Partition, vartheta) -> Fraction:
    """The n!/(H*H') expression quoted for the Jack graph (a test target only)."""
    hooks = hook_products(eta, vartheta)
    return Fraction(math.factorial(eta.size)) / (hooks.H * hooks.Hprime)


def young_closed_form(eta: Partition) -> Fraction:
    """n!/H(eta;1): the standard-Young-tableau count."""
    return Fraction(math.factorial(eta.size)) / hook_products(eta, 1).H


def closed_form_report(max_n: int, varthetas=(2, Fraction(1, 2))) -> list[dict]:
    """Compare recursion dimensions against the quoted closed forms.

    Returns one row per (graph, partition) with both values and a match flag.
    The Kingman multinomial and the Young-graph tableau count are expected to
    match; the n!/(H*H') expression at general vartheta is recorded as data
    (it does not agree with the edge-weight recursion).
    """
    from .partition import enumerate_partitions

    rows = []
    for n in range(0, max_n + 1):
        for eta in enumerate_partitions(n):
            rec = dim(KINGMAN, eta)
            closed = kingman_closed_form(eta)
            rows.append({"graph": "kingman", "vartheta": None, "partition": eta,
                         "dim_recursion": rec, "closed_form": closed,
                         "closed_form_kind": "multinomial", "match": rec == closed})
            rec = dim(YOUNG, eta)
            closed = young_closed_form(eta)
            rows.append({"graph": "jack", "vartheta": Fraction(1), "partition": eta,
                         "dim_recursion": rec, "closed_form": closed,
                         "closed_form_kind": "n!/H", "match": rec == closed})
            for th in varthetas:
                th = Fraction(th)
                kind = GraphKind.jack(th)
                rec = dim(kind, eta)
                closed = jack_closed_form_hh(eta, th)
                rows.append({"graph": "jack", "vartheta": th, "partition": eta,
                             "dim_recursion": rec, "closed_form": closed,
                             "closed_form_kind": "n!/(H*H')", "match": rec == closed})
    return rows
