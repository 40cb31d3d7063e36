"""Integer partitions and Young-diagram geometry.

Partitions are the substrate for every other module: branching graphs walk
between them, symmetric functions are indexed by them, and the measures and
processes downstream live on them.  Everything here is exact integer /
rational arithmetic.

Boxes are 1-indexed ``(row, col)`` pairs, rows growing downward.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering


@total_ordering
class Partition:
    """An integer partition, stored as a non-increasing tuple of positive parts.

    Immutable and hashable; the conjugate is computed on demand and cached.
    The empty partition is ``Partition()``.
    """

    __slots__ = ("parts", "_conj")

    def __init__(self, parts=()):
        parts = tuple(int(p) for p in parts)
        for i, p in enumerate(parts):
            if p <= 0:
                raise ValueError(f"parts must be positive, got {parts}")
            if i and parts[i - 1] < p:
                raise ValueError(f"parts must be non-increasing, got {parts}")
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "_conj", None)

    def __setattr__(self, name, value):
        raise AttributeError("Partition is immutable")

    # -- basic accessors ---------------------------------------------------

    @property
    def size(self) -> int:
        return sum(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __getitem__(self, i):
        return self.parts[i]

    def __bool__(self) -> bool:
        return bool(self.parts)

    def __eq__(self, other) -> bool:
        if isinstance(other, Partition):
            return self.parts == other.parts
        return NotImplemented

    def __lt__(self, other) -> bool:
        # Sort key: by size, then reverse-lexicographic within a size (the
        # canonical enumeration order, largest-first parts compare first).
        if not isinstance(other, Partition):
            return NotImplemented
        if self.size != other.size:
            return self.size < other.size
        return rl_key(self) > rl_key(other)

    def __hash__(self) -> int:
        return hash(self.parts)

    def __repr__(self) -> str:
        return f"Partition({self.parts!r})"

    def __str__(self) -> str:
        return ",".join(str(p) for p in self.parts)

    # -- diagram geometry --------------------------------------------------

    def conjugate(self) -> "Partition":
        """Transpose of the Young diagram (an involution)."""
        if self._conj is None:
            if not self.parts:
                conj = self
            else:
                cols = [0] * self.parts[0]
                for p in self.parts:
                    for j in range(p):
                        cols[j] += 1
                conj = Partition(cols)
            object.__setattr__(self, "_conj", conj)
        return self._conj

    def multiplicity(self, i: int) -> int:
        """Number of parts equal to i."""
        return sum(1 for p in self.parts if p == i)

    def contains_box(self, box) -> bool:
        i, j = box
        return 1 <= i <= len(self.parts) and 1 <= j <= self.parts[i - 1]

    def contains(self, other: "Partition") -> bool:
        """Young-diagram containment: other fits inside self."""
        if len(other) > len(self.parts):
            return False
        return all(o <= s for o, s in zip(other.parts, self.parts))

    def boxes(self):
        """All boxes (i, j), row-major."""
        for i, p in enumerate(self.parts, start=1):
            for j in range(1, p + 1):
                yield (i, j)

    def diagonal_length(self) -> int:
        return sum(1 for i, p in enumerate(self.parts, start=1) if p >= i)

    def with_part_added(self, row: int) -> "Partition":
        """New partition with one box appended in the given (1-indexed) row."""
        parts = list(self.parts)
        if row == len(parts) + 1:
            parts.append(1)
        else:
            parts[row - 1] += 1
        return Partition(parts)

    def with_part_removed(self, row: int) -> "Partition":
        parts = list(self.parts)
        parts[row - 1] -= 1
        if parts and parts[-1] == 0:
            parts.pop()
        return Partition(parts)


EMPTY = Partition()


def rl_key(eta: Partition) -> tuple:
    """Reverse-lexicographic sort key within one size (descending order)."""
    return tuple(-p for p in eta.parts)


def parse_partition(text: str) -> Partition:
    """Parse the textual form "5,4,1"; the empty string is the empty partition."""
    text = text.strip()
    if not text or text == "-":
        return EMPTY
    return Partition(int(tok) for tok in text.split(","))


def format_partition(eta: Partition) -> str:
    return str(eta)


def enumerate_partitions(n: int):
    """All partitions of n, in reverse-lexicographic order: (n) first, (1^n) last."""
    if n < 0:
        raise ValueError("n must be >= 0")
    out = []

    def descend(remaining, maxpart, prefix):
        if remaining == 0:
            out.append(Partition(prefix))
            return
        for p in range(min(maxpart, remaining), 0, -1):
            descend(remaining - p, p, prefix + [p])

    descend(n, n if n else 1, [])
    return out


def arm_leg(eta: Partition, box) -> tuple[int, int]:
    """Arm and leg lengths of a box inside the diagram of eta."""
    if not eta.contains_box(box):
        raise ValueError(f"box {box} outside diagram of {eta!r}")
    i, j = box
    arm = eta.parts[i - 1] - j
    leg = eta.conjugate().parts[j - 1] - i
    return arm, leg


@dataclass(frozen=True)
class FrobeniusCoords:
    """Shifted diagonal arm/leg coordinates (a_1,...,a_r; b_1,...,b_r).

    Both lists are strictly decreasing positive half-integers and
    sum(a) + sum(b) = |eta|.
    """

    a: tuple
    b: tuple

    def to_partition(self) -> Partition:
        """Reconstruct the partition (exact round trip)."""
        r = len(self.a)
        # a_i = eta_i - i + 1/2 and b_i = eta'_i - i + 1/2 (i = 1..r).
        row_parts = [int(self.a[i] - Fraction(1, 2)) + i + 1 for i in range(r)]
        col_parts = [int(self.b[i] - Fraction(1, 2)) + i + 1 for i in range(r)]
        # Rows below the diagonal block are read off the first r columns.
        parts = list(row_parts)
        for row in range(r + 1, (col_parts[0] if col_parts else 0) + 1):
            parts.append(sum(1 for q in col_parts if q >= row))
        return Partition(parts)


def frobenius(eta: Partition) -> FrobeniusCoords:
    """Frobenius coordinates: diagonal arms and legs, each shifted by 1/2."""
    r = eta.diagonal_length()
    a = []
    b = []
    for i in range(1, r + 1):
        arm, leg = arm_leg(eta, (i, i))
        a.append(arm + Fraction(1, 2))
        b.append(leg + Fraction(1, 2))
    return FrobeniusCoords(tuple(a), tuple(b))


def scaled_frobenius(eta: Partition):
    """Frobenius coordinates divided by |eta|, as a point of the Thoma simplex.

    The alpha/beta masses sum to exactly 1 (gamma = 0).
    """
    from .symfunc import ThomaPoint  # local import: symfunc depends on us

    n = eta.size
    if n == 0:
        raise ValueError("scaled Frobenius coordinates need a nonempty partition")
    fc = frobenius(eta)
    alpha = tuple(x / n for x in fc.a)
    beta = tuple(x / n for x in fc.b)
    return ThomaPoint(alpha, beta)


def covers(eta: Partition):
    """All (zeta, box) with eta ⊂ zeta and |zeta| = |eta| + 1.

    The box is the addable corner (row, col) that was attached.
    """
    out = []
    l = len(eta)
    for i in range(1, l + 2):
        cur = eta.parts[i - 1] if i <= l else 0
        above = eta.parts[i - 2] if i >= 2 else None
        if above is None or above > cur:
            out.append((eta.with_part_added(i), (i, cur + 1)))
    return out


def cocovers(eta: Partition):
    """All (zeta, box) with zeta ⊂ eta and |zeta| = |eta| - 1.

    The box is the removable corner of eta that was deleted.
    """
    out = []
    l = len(eta)
    for i in range(1, l + 1):
        cur = eta.parts[i - 1]
        below = eta.parts[i] if i < l else 0
        if cur > below:
            out.append((eta.with_part_removed(i), (i, cur)))
    return out


def dominates(lam: Partition, mu: Partition) -> bool:
    """Dominance order on partitions of equal size: lam >= mu."""
    if lam.size != mu.size:
        raise ValueError("dominance compares partitions of equal size")
    acc_l = acc_m = 0
    for k in range(max(len(lam), len(mu))):
        acc_l += lam.parts[k] if k < len(lam) else 0
        acc_m += mu.parts[k] if k < len(mu) else 0
        if acc_l < acc_m:
            return False
    return True
