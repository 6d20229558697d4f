"""The term language: AST, substitution, traversal, and alpha-comparison.

One frozen dataclass per constructor.  A single table (_NODES) records where
dimensions sit and which fields bind what, so substitution, free-variable
computation, scope checking, and alpha-equality share one traversal.
"""

from __future__ import annotations

from dataclasses import dataclass, fields as dc_fields
from typing import Iterator, NamedTuple, Union

from .dims import (
    B0,
    B1,
    BConst,
    BridgeDim,
    BridgeEq,
    BVar,
    Constraint,
    DimCtx,
    DimError,
    PathDim,
    PathEq,
    PConst,
    PVar,
    constraint_subst,
    DimSubst,
)


class ScopeError(Exception):
    """A term mentions a variable not provided by its context."""


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Univ:
    pass


@dataclass(frozen=True)
class Bool:
    pass


@dataclass(frozen=True)
class TrueTm:
    pass


@dataclass(frozen=True)
class FalseTm:
    pass


@dataclass(frozen=True)
class Unit:
    pass


@dataclass(frozen=True)
class Star:
    pass


@dataclass(frozen=True)
class Void:
    pass


@dataclass(frozen=True)
class Pi:
    var: str
    dom: "Term"
    cod: "Term"


@dataclass(frozen=True)
class Lam:
    var: str
    body: "Term"


@dataclass(frozen=True)
class App:
    fn: "Term"
    arg: "Term"


@dataclass(frozen=True)
class Sigma:
    var: str
    dom: "Term"
    cod: "Term"


@dataclass(frozen=True)
class Pair:
    fst: "Term"
    snd: "Term"


@dataclass(frozen=True)
class Fst:
    arg: "Term"


@dataclass(frozen=True)
class Snd:
    arg: "Term"


@dataclass(frozen=True)
class PathTy:
    var: str
    ty: "Term"
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class PLam:
    var: str
    body: "Term"


@dataclass(frozen=True)
class PApp:
    fn: "Term"
    dim: PathDim


@dataclass(frozen=True)
class BridgeTy:
    var: str
    ty: "Term"
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class BLam:
    var: str
    body: "Term"


@dataclass(frozen=True)
class BApp:
    fn: "Term"
    dim: BridgeDim


@dataclass(frozen=True)
class VTy:
    dim: PathDim
    left: "Term"
    right: "Term"
    equiv: "Term"


@dataclass(frozen=True)
class Vin:
    dim: PathDim
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Vproj:
    dim: PathDim
    arg: "Term"
    fn: "Term"


@dataclass(frozen=True)
class GelTy:
    dim: BridgeDim
    left: "Term"
    right: "Term"
    var_a: str
    var_b: str
    rel: "Term"


@dataclass(frozen=True)
class GelIntro:
    dim: BridgeDim
    left: "Term"
    right: "Term"
    witness: "Term"


@dataclass(frozen=True)
class Ungel:
    var: str  # bridge variable, captured in body
    body: "Term"


@dataclass(frozen=True)
class Extent:
    dim: BridgeDim
    arg: "Term"
    var0: str
    branch0: "Term"
    var1: str
    branch1: "Term"
    var_a: str
    var_b: str
    var_c: str
    branchq: "Term"


@dataclass(frozen=True)
class Tube:
    constraint: Constraint
    var: str  # path variable bound in body
    body: "Term"


TubeSystem = tuple[Tube, ...]


@dataclass(frozen=True)
class Hcom:
    ty: "Term"
    src: PathDim
    dst: PathDim
    cap: "Term"
    tubes: TubeSystem = ()


@dataclass(frozen=True)
class Coe:
    var: str
    ty: "Term"
    src: PathDim
    dst: PathDim
    arg: "Term"


@dataclass(frozen=True)
class Com:
    var: str
    ty: "Term"
    src: PathDim
    dst: PathDim
    cap: "Term"
    tubes: TubeSystem = ()


@dataclass(frozen=True)
class Fcom:
    src: PathDim
    dst: PathDim
    cap: "Term"
    tubes: TubeSystem = ()


@dataclass(frozen=True)
class If:
    var: str
    motive: "Term"
    scrut: "Term"
    on_true: "Term"
    on_false: "Term"


@dataclass(frozen=True)
class VoidElim:
    var: str
    motive: "Term"
    scrut: "Term"


@dataclass(frozen=True)
class Ann:
    ty: "Term"
    tm: "Term"


Term = Union[
    Var, Univ, Bool, TrueTm, FalseTm, Unit, Star, Void,
    Pi, Lam, App, Sigma, Pair, Fst, Snd,
    PathTy, PLam, PApp, BridgeTy, BLam, BApp,
    VTy, Vin, Vproj, GelTy, GelIntro, Ungel, Extent,
    Hcom, Coe, Com, Fcom, If, VoidElim, Ann,
]


# ---------------------------------------------------------------------------
# Node table: ("tm", field, binders) / ("bdim", field) / ("pdim", field) /
# ("tubes", field).  Binders are (sort, name_field) pairs with sort in t/b/p.

_T = "tm"
_BD = "bdim"
_PD = "pdim"
_TU = "tubes"

_NODES: dict[type, tuple] = {
    Var: (),
    Univ: (), Bool: (), TrueTm: (), FalseTm: (), Unit: (), Star: (), Void: (),
    Pi: ((_T, "dom", ()), (_T, "cod", (("t", "var"),))),
    Lam: ((_T, "body", (("t", "var"),)),),
    App: ((_T, "fn", ()), (_T, "arg", ())),
    Sigma: ((_T, "dom", ()), (_T, "cod", (("t", "var"),))),
    Pair: ((_T, "fst", ()), (_T, "snd", ())),
    Fst: ((_T, "arg", ()),),
    Snd: ((_T, "arg", ()),),
    PathTy: ((_T, "ty", (("p", "var"),)), (_T, "left", ()), (_T, "right", ())),
    PLam: ((_T, "body", (("p", "var"),)),),
    PApp: ((_T, "fn", ()), (_PD, "dim")),
    BridgeTy: ((_T, "ty", (("b", "var"),)), (_T, "left", ()), (_T, "right", ())),
    BLam: ((_T, "body", (("b", "var"),)),),
    BApp: ((_T, "fn", ()), (_BD, "dim")),
    VTy: ((_PD, "dim"), (_T, "left", ()), (_T, "right", ()), (_T, "equiv", ())),
    Vin: ((_PD, "dim"), (_T, "left", ()), (_T, "right", ())),
    Vproj: ((_PD, "dim"), (_T, "arg", ()), (_T, "fn", ())),
    GelTy: (
        (_BD, "dim"), (_T, "left", ()), (_T, "right", ()),
        (_T, "rel", (("t", "var_a"), ("t", "var_b"))),
    ),
    GelIntro: ((_BD, "dim"), (_T, "left", ()), (_T, "right", ()), (_T, "witness", ())),
    Ungel: ((_T, "body", (("b", "var"),)),),
    Extent: (
        (_BD, "dim"), (_T, "arg", ()),
        (_T, "branch0", (("t", "var0"),)),
        (_T, "branch1", (("t", "var1"),)),
        (_T, "branchq", (("t", "var_a"), ("t", "var_b"), ("t", "var_c"))),
    ),
    Hcom: ((_T, "ty", ()), (_PD, "src"), (_PD, "dst"), (_T, "cap", ()), (_TU, "tubes")),
    Coe: ((_T, "ty", (("p", "var"),)), (_PD, "src"), (_PD, "dst"), (_T, "arg", ())),
    Com: ((_T, "ty", (("p", "var"),)), (_PD, "src"), (_PD, "dst"), (_T, "cap", ()), (_TU, "tubes")),
    Fcom: ((_PD, "src"), (_PD, "dst"), (_T, "cap", ()), (_TU, "tubes")),
    If: ((_T, "motive", (("t", "var"),)), (_T, "scrut", ()), (_T, "on_true", ()), (_T, "on_false", ())),
    VoidElim: ((_T, "motive", (("t", "var"),)), (_T, "scrut", ()),),
    Ann: ((_T, "ty", ()), (_T, "tm", ())),
}

_counter = 0


def fresh(hint: str = "v") -> str:
    """Globally fresh name, marked with '%'."""
    global _counter
    _counter += 1
    base = hint.split("%", 1)[0] or "v"
    return f"{base}%{_counter}"


def reserve_name(name: str) -> None:
    """Keep future fresh names distinct from an externally supplied one."""
    global _counter
    if "%" in name:
        suffix = name.rsplit("%", 1)[1]
        if suffix.isdigit():
            _counter = max(_counter, int(suffix))


# ---------------------------------------------------------------------------
# Free variables


class FreeVars(NamedTuple):
    terms: frozenset[str]
    bridges: frozenset[str]
    paths: frozenset[str]


def free_vars(t: Term) -> FreeVars:
    tvs: set[str] = set()
    bvs: set[str] = set()
    pvs: set[str] = set()

    def add_dim(d: BridgeDim | PathDim, bound_b: frozenset, bound_p: frozenset) -> None:
        if isinstance(d, BVar) and d.name not in bound_b:
            bvs.add(d.name)
        elif isinstance(d, PVar) and d.name not in bound_p:
            pvs.add(d.name)

    def go(t: Term, bt: frozenset, bb: frozenset, bp: frozenset) -> None:
        if isinstance(t, Var):
            if t.name not in bt:
                tvs.add(t.name)
            return
        for spec in _NODES[type(t)]:
            kind = spec[0]
            if kind in (_BD, _PD):
                add_dim(getattr(t, spec[1]), bb, bp)
            elif kind == _T:
                _, f, binders = spec
                bt2, bb2, bp2 = bt, bb, bp
                for sort, nf in binders:
                    n = getattr(t, nf)
                    if sort == "t":
                        bt2 = bt2 | {n}
                    elif sort == "b":
                        bb2 = bb2 | {n}
                    else:
                        bp2 = bp2 | {n}
                go(getattr(t, f), bt2, bb2, bp2)
            elif kind == _TU:
                for tube in getattr(t, spec[1]):
                    add_dim(tube.constraint.lhs, bb, bp)
                    add_dim(tube.constraint.rhs, bb, bp)
                    go(tube.body, bt, bb, bp | {tube.var})
        return

    go(t, frozenset(), frozenset(), frozenset())
    return FreeVars(frozenset(tvs), frozenset(bvs), frozenset(pvs))


def free_dims(t: Term) -> tuple[frozenset[str], frozenset[str]]:
    fv = free_vars(t)
    return fv.bridges, fv.paths


# ---------------------------------------------------------------------------
# Simultaneous capture-avoiding substitution

_EMPTY: dict = {}


def subst(
    t: Term,
    tmap: dict[str, Term] | None = None,
    bmap: dict[str, BridgeDim] | None = None,
    pmap: dict[str, PathDim] | None = None,
) -> Term:
    """Substitute terms for term variables and dimensions for dimension
    variables, renaming binders as needed to avoid capture."""
    tmap = tmap or _EMPTY
    bmap = bmap or _EMPTY
    pmap = pmap or _EMPTY
    if not (tmap or bmap or pmap):
        return t

    def danger(tmap: dict, bmap: dict, pmap: dict) -> FreeVars:
        ts: set[str] = set()
        bs: set[str] = set()
        ps: set[str] = set()
        for v in tmap.values():
            fv = free_vars(v)
            ts |= fv.terms
            bs |= fv.bridges
            ps |= fv.paths
        bs |= {d.name for d in bmap.values() if isinstance(d, BVar)}
        ps |= {d.name for d in pmap.values() if isinstance(d, PVar)}
        return FreeVars(frozenset(ts), frozenset(bs), frozenset(ps))

    def go(t: Term, tmap: dict, bmap: dict, pmap: dict) -> Term:
        if not (tmap or bmap or pmap):
            return t
        if isinstance(t, Var):
            return tmap.get(t.name, t)
        kw: dict = {}
        changed = False
        for spec in _NODES[type(t)]:
            kind = spec[0]
            f = spec[1]
            old = getattr(t, f)
            if kind == _BD:
                new = bmap.get(old.name, old) if isinstance(old, BVar) else old
            elif kind == _PD:
                new = pmap.get(old.name, old) if isinstance(old, PVar) else old
            elif kind == _T:
                binders = spec[2]
                tm2, bm2, pm2 = tmap, bmap, pmap
                renames: list[tuple[str, str]] = []
                for sort, nf in binders:
                    n = getattr(t, nf)
                    m = {"t": tm2, "b": bm2, "p": pm2}[sort]
                    if n in m:
                        m = dict(m)
                        del m[n]
                        if sort == "t":
                            tm2 = m
                        elif sort == "b":
                            bm2 = m
                        else:
                            pm2 = m
                    dset = danger(tm2, bm2, pm2)
                    hits = {"t": dset.terms, "b": dset.bridges, "p": dset.paths}[sort]
                    if n in hits:
                        n2 = fresh(n)
                        renames.append((nf, n2))
                        if sort == "t":
                            tm2 = {**tm2, n: Var(n2)}
                        elif sort == "b":
                            bm2 = {**bm2, n: BVar(n2)}
                        else:
                            pm2 = {**pm2, n: PVar(n2)}
                for nf, n2 in renames:
                    kw[nf] = n2
                    changed = True
                new = go(old, tm2, bm2, pm2)
            else:  # tubes
                new_tubes = []
                for tube in old:
                    xi = _constraint_map(tube.constraint, bmap, pmap)
                    pm2 = pmap
                    var = tube.var
                    if var in pm2:
                        pm2 = dict(pm2)
                        del pm2[var]
                    dset = danger(tmap, bmap, pm2)
                    if var in dset.paths:
                        var2 = fresh(var)
                        pm2 = {**pm2, var: PVar(var2)}
                        var = var2
                    new_tubes.append(Tube(xi, var, go(tube.body, tmap, bmap, pm2)))
                new = tuple(new_tubes)
            if new != old:
                changed = True
            if f not in kw:
                kw[f] = new
        if not changed:
            return t
        for fld in dc_fields(t):
            if fld.name not in kw:
                kw[fld.name] = getattr(t, fld.name)
        return type(t)(**kw)

    return go(t, dict(tmap), dict(bmap), dict(pmap))


def _constraint_map(xi: Constraint, bmap: dict, pmap: dict) -> Constraint:
    match xi:
        case BridgeEq(lhs, rhs):
            if isinstance(lhs, BVar) and lhs.name in bmap:
                lhs = bmap[lhs.name]
            return BridgeEq(lhs, rhs)
        case PathEq(lhs, rhs):
            if isinstance(lhs, PVar) and lhs.name in pmap:
                lhs = pmap[lhs.name]
            if isinstance(rhs, PVar) and rhs.name in pmap:
                rhs = pmap[rhs.name]
            return PathEq(lhs, rhs)
    raise DimError(f"not a constraint: {xi!r}")


def subst_dims(t: Term, psi: DimSubst) -> Term:
    """The action of a bridge-path substitution on a term (its psi-aspect)."""
    return subst(t, bmap=dict(psi.bridge_map), pmap=dict(psi.path_map))


def bsubst(t: Term, r: BridgeDim, x: str) -> Term:
    """Substitute the bridge dimension r for the variable x."""
    return subst(t, bmap={x: r})


def dsubst(t: Term, r: PathDim, x: str) -> Term:
    """Substitute the path dimension r for the variable x."""
    return subst(t, pmap={x: r})


def subst_term(t: Term, name: str, val: Term) -> Term:
    return subst(t, tmap={name: val})


# ---------------------------------------------------------------------------
# Alpha-equality


def alpha_equal(t1: Term, t2: Term) -> bool:
    """Equality up to consistent renaming of bound variables of all sorts."""

    def dim_eq(d1, d2, env1: dict, env2: dict) -> bool:
        if type(d1) is not type(d2):
            return False
        if isinstance(d1, (BConst, PConst)):
            return d1 == d2
        i1 = env1.get(d1.name, d1.name)
        i2 = env2.get(d2.name, d2.name)
        return i1 == i2

    def go(t1, t2, e1: dict, e2: dict) -> bool:
        if type(t1) is not type(t2):
            return False
        if isinstance(t1, Var):
            return e1.get(t1.name, t1.name) == e2.get(t2.name, t2.name)
        for spec in _NODES[type(t1)]:
            kind, f = spec[0], spec[1]
            a, b = getattr(t1, f), getattr(t2, f)
            if kind in (_BD, _PD):
                if not dim_eq(a, b, e1, e2):
                    return False
            elif kind == _T:
                e1b, e2b = e1, e2
                for sort, nf in spec[2]:
                    lvl = len(e1b)
                    e1b = {**e1b, getattr(t1, nf): lvl}
                    e2b = {**e2b, getattr(t2, nf): lvl}
                if not go(a, b, e1b, e2b):
                    return False
            else:  # tubes
                if len(a) != len(b):
                    return False
                for u, v in zip(a, b):
                    if type(u.constraint) is not type(v.constraint):
                        return False
                    if not dim_eq(u.constraint.lhs, v.constraint.lhs, e1, e2):
                        return False
                    if not dim_eq(u.constraint.rhs, v.constraint.rhs, e1, e2):
                        return False
                    lvl = len(e1)
                    if not go(u.body, v.body, {**e1, u.var: lvl}, {**e2, v.var: lvl}):
                        return False
        return True

    return go(t1, t2, {}, {})


# ---------------------------------------------------------------------------
# Scope checking


def check_scope(t: Term, dctx: DimCtx, tvars: frozenset[str] = frozenset()) -> None:
    """Raise ScopeError unless every free variable of t is in scope."""
    fv = free_vars(t)
    bad_t = fv.terms - tvars
    bad_b = fv.bridges - dctx.bridge_vars
    bad_p = fv.paths - dctx.path_vars
    if bad_t or bad_b or bad_p:
        parts = []
        if bad_t:
            parts.append(f"term variables {sorted(bad_t)}")
        if bad_b:
            parts.append(f"bridge dimensions {sorted(bad_b)}")
        if bad_p:
            parts.append(f"path dimensions {sorted(bad_p)}")
        raise ScopeError("out of scope: " + ", ".join(parts))


# ---------------------------------------------------------------------------
# Typing contexts: telescopes of hypotheses and bridge markers


@dataclass(frozen=True)
class TermHyp:
    name: str
    ty: Term


@dataclass(frozen=True)
class Marker:
    dim: BridgeDim


CtxEntry = Union[TermHyp, Marker]
TypingCtx = tuple[CtxEntry, ...]


def ctx_apart(ctx: TypingCtx, r: BridgeDim) -> TypingCtx:
    """Keep only the hypotheses introduced before the marker for r.

    Constants, and variables with no marker, keep the whole telescope.
    """
    if isinstance(r, BVar):
        for i in range(len(ctx) - 1, -1, -1):
            e = ctx[i]
            if isinstance(e, Marker) and e.dim == r:
                return ctx[:i]
    return ctx


def ctx_names(ctx: TypingCtx) -> frozenset[str]:
    return frozenset(e.name for e in ctx if isinstance(e, TermHyp))


def ctx_lookup(ctx: TypingCtx, name: str) -> Term | None:
    for e in reversed(ctx):
        if isinstance(e, TermHyp) and e.name == name:
            return e.ty
    return None


def ctx_subst_dims(ctx: TypingCtx, psi: DimSubst) -> TypingCtx:
    out: list[CtxEntry] = []
    for e in ctx:
        if isinstance(e, TermHyp):
            out.append(TermHyp(e.name, subst_dims(e.ty, psi)))
        else:
            out.append(Marker(psi.apply_bridge(e.dim)))
    return tuple(out)


def subterms(t: Term) -> Iterator[Term]:
    """All subterms, including t itself (binder bodies included as-is)."""
    yield t
    for spec in _NODES[type(t)]:
        kind, f = spec[0], spec[1]
        if kind == _T:
            yield from subterms(getattr(t, f))
        elif kind == _TU:
            for tube in getattr(t, f):
                yield from subterms(tube.body)
