"""Ramification invariants of the iterate tower of a Frobenius lift.

Everything here is exact valuation arithmetic over Fraction: the tower
fields are never constructed.  The level-n data lives at scale
e_n = p^n * e0, and the break invariants come out of the closed formulas
for the lowest-valuation coefficient of the ramification polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .series import FrobLift, NewtonPolygon, newton_hull


@dataclass(frozen=True)
class TowerSpec:
    """A Frobenius lift plus the degree e0 of the Eisenstein polynomial
    cutting out the first-layer uniformizer."""

    f: FrobLift
    e0: int

    def __post_init__(self) -> None:
        if self.e0 < 1:
            raise ValueError("e0 must be a positive integer")

    @property
    def p(self) -> int:
        return self.f.spec.p

    @property
    def e(self) -> int:
        """v_F(p) in the pi-normalization."""
        return self.f.spec.e_F

    def e_n(self, n: int) -> int:
        return self.p ** n * self.e0


def _coeff_vals(t: TowerSpec) -> list[tuple[int, int]]:
    """(i, v_F(a_i)) for the nonzero coefficients a_1..a_p."""
    out = []
    for i, a in enumerate(t.f.coeffs, start=1):
        if not a.is_zero():
            out.append((i, a.val()))
    return out


def imin(t: TowerSpec) -> int:
    """Least i with v_F(a_i) <= e; a_p = 1 guarantees existence."""
    for i, v in _coeff_vals(t):
        if v <= t.e:
            return i
    raise AssertionError("unreachable: a_p is a unit")


def _weight(t: TowerSpec) -> int:
    """v_F(a_imin) + floor(imin/p) * e, the slope datum of the tower."""
    i0 = imin(t)
    v = t.f.coeffs[i0 - 1].val()
    return v + (i0 // t.p) * t.e


def elementary_level(t: TowerSpec, n: int) -> Fraction:
    """The unique ramification break i_n of the level-n step."""
    if n < 1:
        raise ValueError("levels start at n = 1")
    i0 = imin(t)
    return Fraction(t.e_n(n) * _weight(t) + i0 - t.p, t.p - 1)


def apf_constant(t: TowerSpec) -> Fraction:
    """The strictly-APF constant of the tower, as an exact rational.

    Computed from the closed form and cross-checked against the infimum
    of i_n / p^n, which is attained at n = 1.
    """
    p, e0 = t.p, t.e0
    i0 = imin(t)
    c = Fraction(e0, p - 1) * _weight(t) - Fraction(p - i0, p * (p - 1))
    check = min(elementary_level(t, n) / Fraction(p ** n) for n in range(1, 11))
    if c != check:
        raise AssertionError("closed form disagrees with the infimum")
    if c <= 0:
        raise AssertionError("APF constant must be positive")
    return c


@dataclass(frozen=True)
class RamPolygonReport:
    """Valuation points of the level-n ramification polynomial, their lower
    hull, and the single-segment verdict."""

    n: int
    points: tuple[tuple[int, Fraction], ...]
    polygon: NewtonPolygon
    single_segment: bool
    drop: Fraction
    expected_drop: Fraction
    ties: tuple[int, ...]

    @property
    def matches(self) -> bool:
        return self.single_segment and self.drop == self.expected_drop

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "points": [[i, str(v)] for i, v in self.points],
            "vertices": [[str(x), str(y)] for x, y in self.polygon.vertices],
            "single_segment": self.single_segment,
            "drop": str(self.drop),
            "expected_drop": str(self.expected_drop),
            "matches": self.matches,
            "ties": list(self.ties),
        }


def ramification_polygon(t: TowerSpec, n: int) -> RamPolygonReport:
    """Points (i, v_n(b_i)) of the ramification polynomial at level n.

    v_n(b_{p-1}) = p exactly; below that the valuation is the minimum of
    e_n*e + p (the leading-coefficient branch) and e_n*v_F(a_j) + j over
    the nonzero a_j with i+1 <= j <= p-1.  A tied minimum would only give
    a lower bound, so tied indices are reported rather than trusted.
    """
    if n < 1:
        raise ValueError("levels start at n = 1")
    p, e = t.p, t.e
    en = t.e_n(n)
    vals = dict(_coeff_vals(t))
    points: list[tuple[int, Fraction]] = []
    ties: list[int] = []
    for i in range(p - 1):
        cands = [en * e + p]
        cands += [en * vals[j] + j for j in range(i + 1, p) if j in vals]
        best = min(cands)
        if cands.count(best) > 1:
            ties.append(i)
        points.append((i, Fraction(best)))
    points.append((p - 1, Fraction(p)))
    hull = newton_hull(points)
    single = len(hull.vertices) == 2
    drop = points[0][1] - Fraction(p)
    expected = elementary_level(t, n) * (p - 1)
    return RamPolygonReport(n, tuple(points), hull, single, drop,
                            expected, tuple(ties))


def tower_report(t: TowerSpec, levels: int = 6,
                 polygon_levels: int = 4) -> dict:
    """Full invariant bundle in the CLI's JSON shape."""
    polys = [ramification_polygon(t, n) for n in range(1, polygon_levels + 1)]
    return {
        "imin": imin(t),
        "levels": [{"n": n, "i_n": str(elementary_level(t, n))}
                   for n in range(1, levels + 1)],
        "c": str(apf_constant(t)),
        "polygon": polys[0].to_json(),
        "single_segment": all(r.matches for r in polys),
    }
