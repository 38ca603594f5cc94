"""Dimension bounds and the independent-conditions rank test for node sets.

Linear systems handled: all plane curves of degree d (``p2``), all surfaces
of degree d in projective 3-space (``p3``), and the restricted system of
degree-d surfaces on a fixed surface inside projective 3-space (``ci4``,
parametrized by the pair (d, h) with d >= h - 1).  Regularity of a node set
is certified as full rank of its evaluation matrix against the ambient
monomial basis, computed exactly over the rationals with an optional
prime-field pre-filter.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Sequence

from .errors import ArityError, DataFormatError, PointNotOnSurface, ToolkitError
from .linalg import ModularUnusable, RatMatrix
from .polynomials import MultiPoly, format_rational, monomials_of_degree, parse_rational

SPACES = ("p2", "p3", "ci4")


def choose(n: int, k: int) -> int:
    """Binomial coefficient with C(n, k) = 0 whenever n < k or k < 0."""
    if k < 0 or n < k:
        return 0
    return comb(n, k)


@dataclass(frozen=True)
class SystemSpec:
    """A linear system of divisors, identified by ambient space and degree."""

    space: str
    d: int
    h: int | None = None
    surface: MultiPoly | None = None  # membership equation for the ci4 case

    def __post_init__(self):
        if self.space not in SPACES:
            raise ValueError(f"space must be one of {SPACES}, got {self.space!r}")
        if self.d < 0:
            raise ValueError("degree must be nonnegative")
        if self.space == "ci4":
            if self.h is None or self.h < 2:
                raise ValueError("ci4 systems need h >= 2")
            if self.d < self.h - 1:
                raise ValueError("ci4 systems need d >= h - 1")
        if self.surface is not None:
            if self.surface.arity != 4:
                raise ArityError("membership surface must live in 4 variables")
            if self.surface.is_zero() or not self.surface.is_homogeneous():
                raise ValueError("membership surface must be nonzero homogeneous")

    @property
    def ambient_arity(self) -> int:
        return 3 if self.space == "p2" else 4

    def monomial_basis(self):
        return list(monomials_of_degree(self.ambient_arity, self.d))

    def to_json(self) -> dict:
        doc: dict = {"space": self.space, "d": self.d}
        if self.h is not None:
            doc["h"] = self.h
        if self.surface is not None:
            doc["surface"] = self.surface.to_json()
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "SystemSpec":
        try:
            space = str(doc["space"])
            d = int(doc["d"])
            h = int(doc["h"]) if "h" in doc and doc["h"] is not None else None
            surface = (
                MultiPoly.from_json(doc["surface"]) if doc.get("surface") else None
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DataFormatError(f"malformed system spec: {exc}") from exc
        try:
            return cls(space, d, h, surface)
        except (ValueError, ArityError) as exc:
            raise DataFormatError(str(exc)) from exc


def linear_system_dim(spec: SystemSpec) -> int:
    """Projective dimension of the system.

    For the restricted ci4 case this is C(d+3,3) - C(d-h+1,3) - 1 with the
    convention C(n,3) = 0 for n < 3, matching the bound arithmetic the
    toolkit certifies (see restricted_dim_oracle for the matrix-rank route).
    """
    if spec.space == "p2":
        return choose(spec.d + 2, 2) - 1
    if spec.space == "p3":
        return choose(spec.d + 3, 3) - 1
    return choose(spec.d + 3, 3) - choose(spec.d - spec.h + 1, 3) - 1


def restricted_dim_oracle(
    h: int, d: int, multiplier: MultiPoly | None = None, seed: int = 0
) -> int:
    """Independent matrix-rank route to linear_system_dim for the ci4 case.

    Counts degree-d monomials in 4 variables, subtracts the rank of the
    multiplication map q -> q * g on the complementary degree (the subtracted
    binomial counts forms of degree d - h - 2, so g has degree h + 2), and
    subtracts one to projectivize.  The rank is computed by exact elimination,
    never assumed; a zero multiplier is rejected.
    """
    if h < 2 or d < h - 1:
        raise ValueError("oracle needs h >= 2 and d >= h - 1")
    domain_degree = d - h - 2
    domain = list(monomials_of_degree(4, domain_degree))
    if not domain:
        if multiplier is not None and multiplier.is_zero():
            raise ValueError("degenerate multiplier: zero polynomial")
        return choose(d + 3, 3) - 1
    if multiplier is None:
        rng = random.Random(seed)
        while True:
            terms = {
                e: Fraction(rng.randint(-9, 9))
                for e in monomials_of_degree(4, h + 2)
            }
            multiplier = MultiPoly(4, terms)
            if not multiplier.is_zero():
                break
    if multiplier.is_zero():
        raise ValueError("degenerate multiplier: zero polynomial")
    if not multiplier.is_homogeneous() or multiplier.degree() != h + 2:
        raise ValueError("multiplier must be homogeneous of degree h + 2")
    target = {e: i for i, e in enumerate(monomials_of_degree(4, d))}
    rows = []
    for e in domain:
        image = MultiPoly(4, {e: Fraction(1)}) * multiplier
        row = [Fraction(0)] * len(target)
        for mono, c in image.terms():
            row[target[mono]] = c
        rows.append(row)
    rank = RatMatrix.from_rows(rows).rank()
    return choose(d + 3, 3) - rank - 1


def max_regular_delta(spec: SystemSpec) -> int:
    """Largest certified node count delta for a regular family in the system."""
    if spec.space == "p3":
        if spec.d < 2:
            raise ValueError("the surface bound needs d >= 2")
        return choose(spec.d - 1, 2)
    if spec.space == "ci4":
        return linear_system_dim(spec)
    raise ValueError("no regular-delta bound is defined for p2 systems")


def heuristic_floor(spec: SystemSpec) -> int:
    """Conjectural lower bound floor(dim/4): a double point imposes at most 4
    conditions, so this many general nodes are always reachable heuristically."""
    return linear_system_dim(spec) // 4


def canonical_point(coords: Sequence) -> tuple[Fraction, ...]:
    """Scale homogeneous coordinates so the first nonzero one equals 1."""
    pt = [Fraction(x) for x in coords]
    pivot = next((x for x in pt if x != 0), None)
    if pivot is None:
        raise ValueError("projective point cannot have all coordinates zero")
    return tuple(x / pivot for x in pt)


@dataclass(frozen=True)
class ConditionMatrix:
    """Evaluation matrix of the system's monomial basis at a node set."""

    system: SystemSpec
    points: tuple[tuple[Fraction, ...], ...]
    matrix: RatMatrix


def condition_matrix(spec: SystemSpec, points: Sequence[Sequence]) -> ConditionMatrix:
    """Build the point-conditions matrix (one row per canonicalized point).

    Points must be pairwise distinct after canonical scaling; for ci4 systems
    carrying a membership surface, every point must lie on that surface.
    """
    pts = [canonical_point(p) for p in points]
    arity = spec.ambient_arity
    for p in pts:
        if len(p) != arity:
            raise ArityError(f"point {p} does not match ambient arity {arity}")
    if len(set(pts)) != len(pts):
        raise ValueError("duplicate points in the node set")
    if spec.space == "ci4" and spec.surface is not None:
        for p in pts:
            if spec.surface.eval_at(p) != 0:
                raise PointNotOnSurface(f"point {p} is not on the ci4 surface")
    basis = spec.monomial_basis()
    rows = []
    for p in pts:
        row = []
        for mono in basis:
            v = Fraction(1)
            for x, k in zip(p, mono):
                if k:
                    v *= x**k
            row.append(v)
        rows.append(row)
    matrix = (
        RatMatrix.from_rows(rows)
        if rows
        else RatMatrix(0, len(basis), ())
    )
    return ConditionMatrix(spec, tuple(pts), matrix)


@dataclass(frozen=True)
class IndependenceReport:
    """Rank certificate for the conditions imposed by a node set."""

    rank: int
    regular: bool
    tangent_dim: int
    delta: int
    modular_rank: int | None = None

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "regular": self.regular,
            "tangent_dim": self.tangent_dim,
            "delta": self.delta,
            "modular_rank": self.modular_rank,
        }


def independence_rank(cm: ConditionMatrix) -> IndependenceReport:
    """Rank of the condition matrix; regular means rank equals the node count.

    The prime-field mirror runs first as a pre-filter, then the rational
    elimination re-establishes the certified rank (the modular value can
    only drop, never exceed it).
    """
    try:
        modular = cm.matrix.rank_mod()
    except ModularUnusable:
        modular = None
    rank = cm.matrix.rank()
    if modular is not None and modular > rank:
        raise ToolkitError("modular pre-filter exceeded the rational rank")
    delta = len(cm.points)
    return IndependenceReport(
        rank=rank,
        regular=rank == delta,
        tangent_dim=linear_system_dim(cm.system) - rank,
        delta=delta,
        modular_rank=modular,
    )


@dataclass(frozen=True)
class T1CodimensionReport:
    """Codimension of the T1-forcing subspace inside a local linear system."""

    rank: int
    codimension: int
    dim_before: int
    dim_after: int

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "codimension": self.codimension,
            "dim_before": self.dim_before,
            "dim_after": self.dim_after,
        }


def t1_codimension(local_equations: Sequence[MultiPoly]) -> T1CodimensionReport:
    """Codimension of forcing a T1 point at the origin of a local system.

    The members form a basis of the system, given as 4-variable local
    equations in (x, y, z, u) already translated so the candidate point is
    the origin.  Forcing the normal form a*x + b*y + (higher order) there
    imposes three linear conditions on the system: the value and the two
    partials along (z, u) must vanish.  The codimension is the exact rank
    of those three functionals, so the constrained subsystem always
    satisfies dim_after >= dim_before - 3.
    """
    if not local_equations:
        raise ValueError("empty local system")
    origin = (0, 0, 0, 0)
    cols = []
    for g in local_equations:
        if g.arity != 4:
            raise ArityError("local equations live in 4 variables (x, y, z, u)")
        cols.append(
            [g.eval_at(origin), g.derive(2).eval_at(origin), g.derive(3).eval_at(origin)]
        )
    matrix = RatMatrix.from_rows(
        [[col[i] for col in cols] for i in range(3)]
    )
    rank = matrix.rank()
    dim_before = len(local_equations) - 1
    return T1CodimensionReport(
        rank=rank,
        codimension=rank,
        dim_before=dim_before,
        dim_after=dim_before - rank,
    )


def parse_points(doc: dict) -> list[tuple[Fraction, ...]]:
    """Read the points file format {"points": [["0","0","1"], ...]}."""
    try:
        raw = doc["points"]
        return [tuple(parse_rational(str(x)) for x in entry) for entry in raw]
    except (KeyError, TypeError) as exc:
        raise DataFormatError(f"malformed points document: {exc}") from exc


def points_to_json(points: Sequence[Sequence[Fraction]]) -> dict:
    return {"points": [[format_rational(Fraction(x)) for x in p] for p in points]}
