"""Dimension terms, contexts, substitutions, apartness, and constraint solving.

Two sorts of interval variable coexist: *path* dimensions are structural
(diagonals allowed), *bridge* dimensions are substructural (weakening and
exchange but no contraction).  The substructural side is enforced here once,
by the injectivity check on substitutions, so the rest of the kernel can
treat substitution as a total operation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union


class DimError(Exception):
    """Malformed dimension input: out-of-scope variable or sort violation."""


# ---------------------------------------------------------------------------
# Dimension terms


@dataclass(frozen=True)
class BVar:
    name: str

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True)
class BConst:
    value: int  # 0 or 1

    def __repr__(self) -> str:
        return f"!{self.value}"


@dataclass(frozen=True)
class PVar:
    name: str

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True)
class PConst:
    value: int  # 0 or 1

    def __repr__(self) -> str:
        return str(self.value)


BridgeDim = Union[BVar, BConst]
PathDim = Union[PVar, PConst]
Dim = Union[BridgeDim, PathDim]

B0, B1 = BConst(0), BConst(1)
P0, P1 = PConst(0), PConst(1)


def is_bridge(d: Dim) -> bool:
    return isinstance(d, (BVar, BConst))


# ---------------------------------------------------------------------------
# Contexts


@dataclass(frozen=True)
class DimCtx:
    """A pair of disjoint variable sets: bridge variables and path variables."""

    bridge_vars: frozenset[str] = frozenset()
    path_vars: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        overlap = self.bridge_vars & self.path_vars
        if overlap:
            raise DimError(f"dimension names used at both sorts: {sorted(overlap)}")

    def has(self, d: Dim) -> bool:
        match d:
            case BVar(name):
                return name in self.bridge_vars
            case PVar(name):
                return name in self.path_vars
            case BConst(_) | PConst(_):
                return True
        return False

    def add_bridge(self, name: str) -> DimCtx:
        return DimCtx(self.bridge_vars | {name}, self.path_vars)

    def add_path(self, name: str) -> DimCtx:
        return DimCtx(self.bridge_vars, self.path_vars | {name})

    def remove_path(self, name: str) -> DimCtx:
        return DimCtx(self.bridge_vars, self.path_vars - {name})


def apart_ctx(ctx: DimCtx, r: BridgeDim) -> DimCtx:
    """Drop a bridge variable from the context; constants remove nothing."""
    if isinstance(r, BVar):
        return DimCtx(ctx.bridge_vars - {r.name}, ctx.path_vars)
    return ctx


def apart_ctx_many(ctx: DimCtx, rs: Iterable[BridgeDim]) -> DimCtx:
    for r in rs:
        ctx = apart_ctx(ctx, r)
    return ctx


# ---------------------------------------------------------------------------
# Substitutions


@dataclass(frozen=True)
class DimSubst:
    """A sort-respecting map between dimension contexts.

    Variables absent from the maps are sent to themselves.  Distinct bridge
    variables may never share a variable image (no contraction); sharing a
    constant image is fine.
    """

    bridge_map: Mapping[str, BridgeDim] = field(default_factory=dict)
    path_map: Mapping[str, PathDim] = field(default_factory=dict)
    source: DimCtx = DimCtx()
    target: DimCtx = DimCtx()

    def __post_init__(self) -> None:
        images: dict[str, str] = {}
        for v in sorted(self.source.bridge_vars | set(self.bridge_map)):
            img = self.bridge_map.get(v, BVar(v))
            if isinstance(img, BVar):
                if img.name in images:
                    raise DimError(
                        f"bridge substitution not injective: "
                        f"{images[img.name]} and {v} both map to {img.name}"
                    )
                images[img.name] = v

    def apply_bridge(self, d: BridgeDim) -> BridgeDim:
        if isinstance(d, BVar):
            return self.bridge_map.get(d.name, d)
        return d

    def apply_path(self, d: PathDim) -> PathDim:
        if isinstance(d, PVar):
            return self.path_map.get(d.name, d)
        return d

    def is_identity(self) -> bool:
        return all(img == BVar(v) for v, img in self.bridge_map.items()) and all(
            img == PVar(v) for v, img in self.path_map.items()
        )


def identity_subst(ctx: DimCtx) -> DimSubst:
    return DimSubst({}, {}, ctx, ctx)


def apply_subst_dim(d: Dim, psi: DimSubst) -> Dim:
    """Send a variable to its image; constants are untouched."""
    match d:
        case BVar(name):
            if name not in psi.source.bridge_vars and name not in psi.bridge_map:
                raise DimError(f"bridge variable {name} not in substitution source")
            return psi.apply_bridge(d)
        case PVar(name):
            if name not in psi.source.path_vars and name not in psi.path_map:
                raise DimError(f"path variable {name} not in substitution source")
            return psi.apply_path(d)
        case _:
            return d


def compose_subst(psi1: DimSubst, psi2: DimSubst) -> DimSubst:
    """The substitution acting as psi1 followed by psi2 on aspects."""
    bmap = {v: psi2.apply_bridge(img) for v, img in psi1.bridge_map.items()}
    for v in psi1.source.bridge_vars:
        if v not in bmap:
            img = psi2.apply_bridge(BVar(v))
            if img != BVar(v):
                bmap[v] = img
    pmap = {v: psi2.apply_path(img) for v, img in psi1.path_map.items()}
    for v in psi1.source.path_vars:
        if v not in pmap:
            img = psi2.apply_path(PVar(v))
            if img != PVar(v):
                pmap[v] = img
    return DimSubst(bmap, pmap, psi1.source, psi2.target)


# ---------------------------------------------------------------------------
# Constraints


@dataclass(frozen=True)
class BridgeEq:
    lhs: BridgeDim
    rhs: BConst

    def mentions(self, r: Dim) -> bool:
        return self.lhs == r or self.rhs == r

    def __repr__(self) -> str:
        return f"{self.lhs!r}={self.rhs!r}"


@dataclass(frozen=True)
class PathEq:
    lhs: PathDim
    rhs: PathDim

    def mentions(self, r: Dim) -> bool:
        return self.lhs == r or self.rhs == r

    def __repr__(self) -> str:
        return f"{self.lhs!r}={self.rhs!r}"


Constraint = Union[BridgeEq, PathEq]
ConstraintSet = tuple[Constraint, ...]


def constraint_subst(xi: Constraint, psi: DimSubst) -> Constraint:
    match xi:
        case BridgeEq(lhs, rhs):
            return BridgeEq(psi.apply_bridge(lhs), rhs)
        case PathEq(lhs, rhs):
            return PathEq(psi.apply_path(lhs), psi.apply_path(rhs))
    raise DimError(f"not a constraint: {xi!r}")


def constraint_true(xi: Constraint) -> bool:
    """A constraint holds outright iff it is a reflexive equation."""
    return xi.lhs == xi.rhs


def restrict_constraints(cs: ConstraintSet, r: BridgeDim) -> ConstraintSet:
    """Delete every equation mentioning r, keeping the order of survivors."""
    return tuple(xi for xi in cs if not xi.mentions(r))


# ---------------------------------------------------------------------------
# Solving


@dataclass(frozen=True)
class ConstraintSolution:
    """Either inconsistency or the most general satisfying substitution."""

    subst: DimSubst | None

    @property
    def consistent(self) -> bool:
        return self.subst is not None


INCONSISTENT = ConstraintSolution(None)


class _UnionFind:
    def __init__(self) -> None:
        self.parent: dict[str, str] = {}

    def find(self, v: str) -> str:
        self.parent.setdefault(v, v)
        root = v
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[v] != root:
            self.parent[v], v = root, self.parent[v]
        return root

    def union(self, a: str, b: str) -> str:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # keep the lexicographically least name as representative, so the
            # solution substitution is canonical
            ra, rb = min(ra, rb), max(ra, rb)
            self.parent[rb] = ra
        return ra


def solve_constraints(cs: ConstraintSet, dctx: DimCtx | None = None) -> ConstraintSolution:
    """Most general unifier of a constraint list.

    Bridge equations assign constants directly; path equations are solved by
    union-find with constant propagation.  Every substitution satisfying the
    list factors through the returned one.
    """
    bridge_assign: dict[str, BConst] = {}
    for xi in cs:
        if isinstance(xi, BridgeEq):
            match xi.lhs:
                case BConst(v):
                    if v != xi.rhs.value:
                        return INCONSISTENT
                case BVar(name):
                    prev = bridge_assign.get(name)
                    if prev is not None and prev != xi.rhs:
                        return INCONSISTENT
                    bridge_assign[name] = xi.rhs

    uf = _UnionFind()
    path_vars: set[str] = set()
    pin: dict[str, PConst] = {}  # class representative -> constant

    def pin_const(root: str, c: PConst) -> bool:
        prev = pin.get(root)
        if prev is not None and prev != c:
            return False
        pin[root] = c
        return True

    for xi in cs:
        if isinstance(xi, PathEq):
            match (xi.lhs, xi.rhs):
                case (PConst(a), PConst(b)):
                    if a != b:
                        return INCONSISTENT
                case (PVar(a), PConst(_)) | (PConst(_), PVar(a)):
                    path_vars.add(a)
                    c = xi.rhs if isinstance(xi.rhs, PConst) else xi.lhs
                    assert isinstance(c, PConst)
                    if not pin_const(uf.find(a), c):
                        return INCONSISTENT
                case (PVar(a), PVar(b)):
                    path_vars.update((a, b))
                    ca, cb = pin.pop(uf.find(a), None), pin.pop(uf.find(b), None)
                    if ca is not None and cb is not None and ca != cb:
                        return INCONSISTENT
                    root = uf.union(a, b)
                    c = ca if ca is not None else cb
                    if c is not None:
                        pin[root] = c

    path_map: dict[str, PathDim] = {}
    for v in sorted(path_vars):
        root = uf.find(v)
        img: PathDim = pin.get(root, PVar(root))
        if img != PVar(v):
            path_map[v] = img

    source = dctx if dctx is not None else _mentioned_ctx(cs)
    target_bridge = source.bridge_vars - set(bridge_assign)
    substituted = {v for v in source.path_vars if path_map.get(v, PVar(v)) != PVar(v)}
    reps = {d.name for d in path_map.values() if isinstance(d, PVar)}
    target = DimCtx(target_bridge, (source.path_vars - substituted) | reps)
    return ConstraintSolution(DimSubst(dict(bridge_assign), path_map, source, target))


def _mentioned_ctx(cs: ConstraintSet) -> DimCtx:
    bs: set[str] = set()
    ps: set[str] = set()
    for xi in cs:
        for d in (xi.lhs, xi.rhs):
            if isinstance(d, BVar):
                bs.add(d.name)
            elif isinstance(d, PVar):
                ps.add(d.name)
    return DimCtx(frozenset(bs), frozenset(ps))
