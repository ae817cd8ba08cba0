"""Coefficients and bounds of the delta-invariant inequality for Lagrangian immersions.

All arithmetic is exact (``fractions.Fraction``); floats appear only when a
caller asks for the right-hand side with a float ``H^2`` or ``c``.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence


class PartitionError(ValueError):
    pass


@dataclass(frozen=True)
class Partition:
    n: int
    parts: tuple

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        object.__setattr__(self, "parts", parts)
        if self.n < 3:
            raise PartitionError("n >= 3 violated")
        if not parts:
            raise PartitionError("k >= 1 violated (empty partition)")
        if list(parts) != sorted(parts):
            raise PartitionError("n_1 <= ... <= n_k violated (parts must be nondecreasing)")
        if parts[0] < 2:
            raise PartitionError("n_1 >= 2 violated")
        if parts[-1] > self.n - 1:
            raise PartitionError("n_k ≤ n−1 violated")
        if sum(parts) > self.n:
            raise PartitionError("n_1 + ... + n_k ≤ n violated")

    @property
    def k(self) -> int:
        return len(self.parts)

    @property
    def total(self) -> int:
        return sum(self.parts)

    @classmethod
    def parse(cls, n: int, parts) -> "Partition":
        if isinstance(parts, str):
            parts = [int(p) for p in parts.replace(" ", "").split(",") if p]
        return cls(int(n), tuple(parts))


def all_partitions(n: int):
    """Every valid partition for dimension n (nondecreasing, parts in [2, n-1], sum <= n)."""
    def rec(prefix, lo, budget):
        for p in range(lo, min(n - 1, budget) + 1):
            yield prefix + (p,)
            yield from rec(prefix + (p,), p, budget - p)
    for parts in rec((), 2, n):
        yield Partition(n, parts)


def a_coefficient(p: Partition) -> Fraction:
    n, k = p.n, p.k
    if p.total < n:
        s = sum(Fraction(1, 2 + nj) for nj in p.parts)
        num = n * n * (n - p.total + 3 * k - 1 - 6 * s)
        den = 2 * (n - p.total + 3 * k + 2 - 6 * s)
    else:
        s = sum(Fraction(1, 2 + nj) for nj in p.parts[1:])
        num = n * n * (k - 1 - 2 * s)
        den = 2 * (k - 2 * s)
    return Fraction(num) / den


def curvature_weight(p: Partition) -> Fraction:
    """The factor of c in the bound: (n(n-1) - sum n_j(n_j-1)) / 2."""
    return Fraction(p.n * (p.n - 1) - sum(nj * (nj - 1) for nj in p.parts), 2)


def delta_bound_rhs(p: Partition, h_norm_sq, c):
    """a(n, n_1..n_k) |H|^2 + curvature_weight * c.

    Exact when both ``h_norm_sq`` and ``c`` are ints/Fractions.
    """
    if h_norm_sq < 0:
        raise ValueError("h_norm_sq must be non-negative")
    exact = all(isinstance(x, (int, Fraction)) for x in (h_norm_sq, c))
    a, w = a_coefficient(p), curvature_weight(p)
    if exact:
        return a * Fraction(h_norm_sq) + w * Fraction(c)
    return float(a) * float(h_norm_sq) + float(w) * float(c)


@dataclass(frozen=True)
class SpecialCaseTag:
    case_one_m: Optional[int] = None
    case_two: bool = False

    @property
    def empty(self) -> bool:
        return self.case_one_m is None and not self.case_two

    def describe(self, n: int) -> Sequence[str]:
        out = []
        if self.case_one_m is not None:
            m = self.case_one_m
            out.append(f"case I: d = 1/(2+{m}), {m} divides n-1; delta({','.join([str(m)] * ((n - 1) // m))})-ideal")
        if self.case_two:
            out.append("case II: d = 1/(n-1), n >= 5; delta(2,n-2)-ideal only under an extra condition (not certified)")
        return out


def parse_rational(text) -> Fraction:
    """Parse 'p/q', an integer, or a terminating decimal string exactly."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        raise TypeError("pass rationals as 'p/q' strings, not floats")
    return Fraction(str(text).strip())


def classify_special_d(n: int, d) -> SpecialCaseTag:
    d = parse_rational(d)
    m = None
    if d > 0:
        inv = 1 / d - 2
        if inv.denominator == 1 and inv >= 2 and (n - 1) % int(inv) == 0:
            m = int(inv)
    two = n >= 5 and d == Fraction(1, n - 1)
    return SpecialCaseTag(m, two)
