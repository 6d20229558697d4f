"""Deterministic small-step evaluation.

Each reduction rule is a separate guarded function; `applicable_rules`
exposes them all so the determinism property (at most one rule fires, values
never step) is testable rather than assumed.  Reduction is weak-head:
congruence only where a rule demands it (heads of eliminators, the type
argument of hcom/coe, the body of ungel).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .dims import (
    B0, B1, P0, P1, BConst, BridgeDim, BridgeEq, BVar, Constraint,
    PathDim, PathEq, PConst, PVar, constraint_true,
)
from .syntax import (
    Ann, App, BApp, BLam, Bool, BridgeTy, Coe, Com, Extent, FalseTm, Fcom,
    Fst, GelIntro, GelTy, Hcom, If, Lam, PApp, Pair, PathTy, Pi, PLam, Sigma,
    Snd, Star, Term, TrueTm, Tube, TubeSystem, Ungel, Unit, Univ, Var, Vin,
    VoidElim, Void, Vproj, VTy, bsubst, dsubst, fresh, subst, subst_term,
)

DEFAULT_FUEL = 10**6


class EvalError(Exception):
    def __init__(self, kind: str, msg: str, term: Term | None = None):
        super().__init__(msg)
        self.kind = kind
        self.term = term


@dataclass(frozen=True)
class Stepped:
    term: Term


@dataclass(frozen=True)
class Value:
    pass


@dataclass(frozen=True)
class Stuck:
    reason: str
    neutral: bool  # variable-headed spine, safe to compare structurally


StepResult = Stepped | Value | Stuck

VALUE = Value()


def isval(t: Term) -> bool:
    match t:
        case (Pi() | Sigma() | PathTy() | BridgeTy() | Univ() | Bool() | Unit()
              | Void() | TrueTm() | FalseTm() | Star() | Lam() | PLam() | BLam()
              | Pair()):
            return True
        case VTy(dim=PVar()) | Vin(dim=PVar()):
            return True
        case GelTy(dim=BVar()) | GelIntro(dim=BVar()):
            return True
        case _:
            return False


# ---------------------------------------------------------------------------
# Rule helpers


def _tube_map(tubes: TubeSystem, f: Callable[[Term], Term]) -> TubeSystem:
    return tuple(Tube(t.constraint, t.var, f(t.body)) for t in tubes)


def _tube_bsubst(tubes: TubeSystem, r: BridgeDim, x: str) -> TubeSystem:
    out = []
    for t in tubes:
        xi = t.constraint
        if isinstance(xi, BridgeEq) and xi.lhs == BVar(x):
            xi = BridgeEq(r, xi.rhs)
        out.append(Tube(xi, t.var, bsubst(t.body, r, x)))
    return tuple(out)


def _mentions_bridge(xi: Constraint, x: str) -> bool:
    return isinstance(xi, BridgeEq) and xi.lhs == BVar(x)


def expand_com(var: str, ty: Term, r: PathDim, s: PathDim, cap: Term,
               tubes: TubeSystem) -> Term:
    """Heterogeneous composition in terms of hcom and coe."""
    z = fresh(var)
    coerced_cap = Coe(z, dsubst(ty, PVar(z), var), r, s, cap)
    new_tubes = []
    for t in tubes:
        w = fresh(t.var)
        z2 = fresh(var)
        body = Coe(z2, dsubst(ty, PVar(z2), var), PVar(w), s, dsubst(t.body, PVar(w), t.var))
        new_tubes.append(Tube(t.constraint, w, body))
    return Hcom(dsubst(ty, s, var), r, s, coerced_cap, tuple(new_tubes))


# ---------------------------------------------------------------------------
# Reduction rules.  Each returns the reduct or None.


def _r_ann(t: Term) -> Optional[Term]:
    if isinstance(t, Ann):
        return t.tm
    return None


def _r_app_head(t: Term) -> Optional[Term]:
    if isinstance(t, App):
        r = step(t.fn)
        if isinstance(r, Stepped):
            return App(r.term, t.arg)
    return None


def _r_app_beta(t: Term) -> Optional[Term]:
    if isinstance(t, App) and isinstance(t.fn, Lam):
        return subst_term(t.fn.body, t.fn.var, t.arg)
    return None


def _r_fst_head(t: Term) -> Optional[Term]:
    if isinstance(t, Fst):
        r = step(t.arg)
        if isinstance(r, Stepped):
            return Fst(r.term)
    return None


def _r_fst_beta(t: Term) -> Optional[Term]:
    if isinstance(t, Fst) and isinstance(t.arg, Pair):
        return t.arg.fst
    return None


def _r_snd_head(t: Term) -> Optional[Term]:
    if isinstance(t, Snd):
        r = step(t.arg)
        if isinstance(r, Stepped):
            return Snd(r.term)
    return None


def _r_snd_beta(t: Term) -> Optional[Term]:
    if isinstance(t, Snd) and isinstance(t.arg, Pair):
        return t.arg.snd
    return None


def _r_papp_head(t: Term) -> Optional[Term]:
    if isinstance(t, PApp):
        r = step(t.fn)
        if isinstance(r, Stepped):
            return PApp(r.term, t.dim)
    return None


def _r_papp_beta(t: Term) -> Optional[Term]:
    if isinstance(t, PApp) and isinstance(t.fn, PLam):
        return dsubst(t.fn.body, t.dim, t.fn.var)
    return None


def _r_if_head(t: Term) -> Optional[Term]:
    if isinstance(t, If):
        r = step(t.scrut)
        if isinstance(r, Stepped):
            return If(t.var, t.motive, r.term, t.on_true, t.on_false)
    return None


def _r_if_true(t: Term) -> Optional[Term]:
    if isinstance(t, If) and isinstance(t.scrut, TrueTm):
        return t.on_true
    return None


def _r_if_false(t: Term) -> Optional[Term]:
    if isinstance(t, If) and isinstance(t.scrut, FalseTm):
        return t.on_false
    return None


def _r_voidelim_head(t: Term) -> Optional[Term]:
    if isinstance(t, VoidElim):
        r = step(t.scrut)
        if isinstance(r, Stepped):
            return VoidElim(t.var, t.motive, r.term)
    return None


# Bridge types (operational rules for application and Kan structure)


def _r_bapp_head(t: Term) -> Optional[Term]:
    if isinstance(t, BApp):
        r = step(t.fn)
        if isinstance(r, Stepped):
            return BApp(r.term, t.dim)
    return None


def _r_bapp_beta(t: Term) -> Optional[Term]:
    if isinstance(t, BApp) and isinstance(t.fn, BLam):
        return bsubst(t.fn.body, t.dim, t.fn.var)
    return None


# Extent: a case operator on its bridge dimension, so it always steps.


def _r_extent_0(t: Term) -> Optional[Term]:
    if isinstance(t, Extent) and t.dim == B0:
        return subst_term(t.branch0, t.var0, t.arg)
    return None


def _r_extent_1(t: Term) -> Optional[Term]:
    if isinstance(t, Extent) and t.dim == B1:
        return subst_term(t.branch1, t.var1, t.arg)
    return None


def _r_extent_var(t: Term) -> Optional[Term]:
    if isinstance(t, Extent) and isinstance(t.dim, BVar):
        x = t.dim.name
        # abstracting the argument deliberately captures x
        q = subst(t.branchq, tmap={
            t.var_a: bsubst(t.arg, B0, x),
            t.var_b: bsubst(t.arg, B1, x),
            t.var_c: BLam(x, t.arg),
        })
        return BApp(q, t.dim)
    return None


# Gel types


def _r_gelty_const(t: Term) -> Optional[Term]:
    if isinstance(t, GelTy) and isinstance(t.dim, BConst):
        return t.left if t.dim == B0 else t.right
    return None


def _r_gel_const(t: Term) -> Optional[Term]:
    if isinstance(t, GelIntro) and isinstance(t.dim, BConst):
        return t.left if t.dim == B0 else t.right
    return None


def _r_ungel_head(t: Term) -> Optional[Term]:
    if isinstance(t, Ungel):
        r = step(t.body)
        if isinstance(r, Stepped):
            return Ungel(t.var, r.term)
    return None


def _r_ungel_beta(t: Term) -> Optional[Term]:
    if (isinstance(t, Ungel) and isinstance(t.body, GelIntro)
            and t.body.dim == BVar(t.var)):
        # the substitution is a no-op on well-typed input; it keeps the
        # evaluation system context-preserving
        return bsubst(t.body.witness, B0, t.var)
    return None


# V types: endpoint rules only


def _r_vty_const(t: Term) -> Optional[Term]:
    if isinstance(t, VTy) and isinstance(t.dim, PConst):
        return t.left if t.dim == P0 else t.right
    return None


def _r_vin_const(t: Term) -> Optional[Term]:
    if isinstance(t, Vin) and isinstance(t.dim, PConst):
        return t.left if t.dim == P0 else t.right
    return None


def _r_vproj_0(t: Term) -> Optional[Term]:
    if isinstance(t, Vproj) and t.dim == P0:
        return App(t.fn, t.arg)
    return None


def _r_vproj_1(t: Term) -> Optional[Term]:
    if isinstance(t, Vproj) and t.dim == P1:
        return t.arg
    return None


def _r_vproj_head(t: Term) -> Optional[Term]:
    if isinstance(t, Vproj) and isinstance(t.dim, PVar):
        r = step(t.arg)
        if isinstance(r, Stepped):
            return Vproj(t.dim, r.term, t.fn)
    return None


def _r_vproj_beta(t: Term) -> Optional[Term]:
    if (isinstance(t, Vproj) and isinstance(t.dim, PVar)
            and isinstance(t.arg, Vin) and t.arg.dim == t.dim):
        return t.arg.right
    return None


# Kan operations: generic rules


def _r_coe_ty_step(t: Term) -> Optional[Term]:
    if isinstance(t, Coe):
        r = step(t.ty)
        if isinstance(r, Stepped):
            return Coe(t.var, r.term, t.src, t.dst, t.arg)
    return None


def _r_hcom_ty_step(t: Term) -> Optional[Term]:
    if isinstance(t, Hcom):
        r = step(t.ty)
        if isinstance(r, Stepped):
            return Hcom(r.term, t.src, t.dst, t.cap, t.tubes)
    return None


def _r_com_expand(t: Term) -> Optional[Term]:
    if isinstance(t, Com):
        return expand_com(t.var, t.ty, t.src, t.dst, t.cap, t.tubes)
    return None


# Kan operations: type-directed rules


def _r_hcom_pi(t: Term) -> Optional[Term]:
    if isinstance(t, Hcom) and isinstance(t.ty, Pi):
        pi = t.ty
        a = fresh(pi.var)
        cod = subst_term(pi.cod, pi.var, Var(a))
        tubes = _tube_map(t.tubes, lambda n: App(n, Var(a)))
        return Lam(a, Hcom(cod, t.src, t.dst, App(t.cap, Var(a)), tubes))
    return None


def _r_hcom_sigma(t: Term) -> Optional[Term]:
    if isinstance(t, Hcom) and isinstance(t.ty, Sigma):
        sg = t.ty

        def first(w: PathDim) -> Term:
            return Hcom(sg.dom, t.src, w, Fst(t.cap), _tube_map(t.tubes, Fst))

        y = fresh("y")
        snd_line = subst_term(sg.cod, sg.var, first(PVar(y)))
        snd = Com(y, snd_line, t.src, t.dst, Snd(t.cap), _tube_map(t.tubes, Snd))
        return Pair(first(t.dst), snd)
    return None


def _r_hcom_path(t: Term) -> Optional[Term]:
    if isinstance(t, Hcom) and isinstance(t.ty, PathTy):
        pt = t.ty
        x = fresh(pt.var)
        line = dsubst(pt.ty, PVar(x), pt.var)
        tubes = _tube_map(t.tubes, lambda n: PApp(n, PVar(x)))
        tubes += (
            Tube(PathEq(PVar(x), P0), fresh("_"), pt.left),
            Tube(PathEq(PVar(x), P1), fresh("_"), pt.right),
        )
        return PLam(x, Hcom(line, t.src, t.dst, PApp(t.cap, PVar(x)), tubes))
    return None


def _r_hcom_bridge(t: Term) -> Optional[Term]:
    if isinstance(t, Hcom) and isinstance(t.ty, BridgeTy):
        bt = t.ty
        x = fresh(bt.var)
        line = bsubst(bt.ty, BVar(x), bt.var)
        tubes = _tube_map(t.tubes, lambda n: BApp(n, BVar(x)))
        tubes += (
            Tube(BridgeEq(BVar(x), B0), fresh("_"), bt.left),
            Tube(BridgeEq(BVar(x), B1), fresh("_"), bt.right),
        )
        return BLam(x, Hcom(line, t.src, t.dst, BApp(t.cap, BVar(x)), tubes))
    return None


def _r_hcom_gel(t: Term) -> Optional[Term]:
    if isinstance(t, Hcom) and isinstance(t.ty, GelTy) and isinstance(t.ty.dim, BVar):
        g = t.ty
        x = g.dim.name

        def side(endpoint: BConst, ty: Term) -> Callable[[PathDim], Term]:
            cap = bsubst(t.cap, endpoint, x)
            tubes = _tube_bsubst(t.tubes, endpoint, x)
            return lambda w: Hcom(ty, t.src, w, cap, tubes)

        m, n = side(B0, g.left), side(B1, g.right)
        y = fresh("y")
        rel_line = subst(g.rel, tmap={g.var_a: m(PVar(y)), g.var_b: n(PVar(y))})
        kept = tuple(
            Tube(u.constraint, u.var, Ungel(x, u.body))
            for u in t.tubes if not _mentions_bridge(u.constraint, x)
        )
        witness = Com(y, rel_line, t.src, t.dst, Ungel(x, t.cap), kept)
        return GelIntro(g.dim, m(t.dst), n(t.dst), witness)
    return None


def _r_coe_pi(t: Term) -> Optional[Term]:
    if isinstance(t, Coe) and isinstance(t.ty, Pi):
        pi = t.ty
        a = fresh(pi.var)

        def back(w: PathDim) -> Term:
            z = fresh(t.var)
            return Coe(z, dsubst(pi.dom, PVar(z), t.var), t.dst, w, Var(a))

        cod_line = subst_term(pi.cod, pi.var, back(PVar(t.var)))
        return Lam(a, Coe(t.var, cod_line, t.src, t.dst, App(t.arg, back(t.src))))
    return None


def _r_coe_sigma(t: Term) -> Optional[Term]:
    if isinstance(t, Coe) and isinstance(t.ty, Sigma):
        sg = t.ty

        def first(w: PathDim) -> Term:
            z = fresh(t.var)
            return Coe(z, dsubst(sg.dom, PVar(z), t.var), t.src, w, Fst(t.arg))

        cod_line = subst_term(sg.cod, sg.var, first(PVar(t.var)))
        return Pair(first(t.dst), Coe(t.var, cod_line, t.src, t.dst, Snd(t.arg)))
    return None


def _r_coe_path(t: Term) -> Optional[Term]:
    if isinstance(t, Coe) and isinstance(t.ty, PathTy):
        pt = t.ty
        x = fresh(pt.var)
        line = dsubst(pt.ty, PVar(x), pt.var)
        z0, z1 = fresh(t.var), fresh(t.var)
        tubes = (
            Tube(PathEq(PVar(x), P0), z0, dsubst(pt.left, PVar(z0), t.var)),
            Tube(PathEq(PVar(x), P1), z1, dsubst(pt.right, PVar(z1), t.var)),
        )
        return PLam(x, Com(t.var, line, t.src, t.dst, PApp(t.arg, PVar(x)), tubes))
    return None


def _r_coe_bridge(t: Term) -> Optional[Term]:
    if isinstance(t, Coe) and isinstance(t.ty, BridgeTy):
        bt = t.ty
        x = fresh(bt.var)
        line = bsubst(bt.ty, BVar(x), bt.var)
        z0, z1 = fresh(t.var), fresh(t.var)
        tubes = (
            Tube(BridgeEq(BVar(x), B0), z0, dsubst(bt.left, PVar(z0), t.var)),
            Tube(BridgeEq(BVar(x), B1), z1, dsubst(bt.right, PVar(z1), t.var)),
        )
        return BLam(x, Com(t.var, line, t.src, t.dst, BApp(t.arg, BVar(x)), tubes))
    return None


def _r_coe_gel(t: Term) -> Optional[Term]:
    if isinstance(t, Coe) and isinstance(t.ty, GelTy) and isinstance(t.ty.dim, BVar):
        g = t.ty
        x = g.dim.name

        def side(endpoint: BConst, ty: Term) -> Callable[[PathDim], Term]:
            cap = bsubst(t.arg, endpoint, x)

            def build(w: PathDim) -> Term:
                z = fresh(t.var)
                return Coe(z, dsubst(ty, PVar(z), t.var), t.src, w, cap)

            return build

        m, n = side(B0, g.left), side(B1, g.right)
        y = fresh(t.var)
        rel_line = subst(g.rel, tmap={g.var_a: m(PVar(y)), g.var_b: n(PVar(y))},
                         pmap={t.var: PVar(y)})
        witness = Coe(y, rel_line, t.src, t.dst, Ungel(x, t.arg))
        return GelIntro(g.dim, m(t.dst), n(t.dst), witness)
    return None


def _r_hcom_ground(t: Term) -> Optional[Term]:
    # strict ground types: composition is the cap
    if isinstance(t, Hcom) and isinstance(t.ty, (Bool, Unit, Void)):
        return t.cap
    return None


def _r_coe_ground(t: Term) -> Optional[Term]:
    if isinstance(t, Coe) and isinstance(t.ty, (Bool, Unit, Void)):
        return t.arg
    return None


def _r_hcom_univ_refl(t: Term) -> Optional[Term]:
    if isinstance(t, Hcom) and isinstance(t.ty, (Univ, VTy)) and t.src == t.dst:
        if isinstance(t.ty, VTy) and not isinstance(t.ty.dim, PVar):
            return None
        return t.cap
    return None


def _r_hcom_univ_tube(t: Term) -> Optional[Term]:
    if isinstance(t, Hcom) and isinstance(t.ty, (Univ, VTy)) and t.src != t.dst:
        if isinstance(t.ty, VTy) and not isinstance(t.ty.dim, PVar):
            return None
        for u in t.tubes:
            if constraint_true(u.constraint):
                return dsubst(u.body, t.dst, u.var)
    return None


def _r_coe_univ_refl(t: Term) -> Optional[Term]:
    if isinstance(t, Coe) and isinstance(t.ty, (Univ, VTy)) and t.src == t.dst:
        if isinstance(t.ty, VTy) and not isinstance(t.ty.dim, PVar):
            return None
        return t.arg
    return None


def _r_fcom_refl(t: Term) -> Optional[Term]:
    if isinstance(t, Fcom) and t.src == t.dst:
        return t.cap
    return None


def _r_fcom_tube(t: Term) -> Optional[Term]:
    if isinstance(t, Fcom) and t.src != t.dst:
        for u in t.tubes:
            if constraint_true(u.constraint):
                return dsubst(u.body, t.dst, u.var)
    return None


RULES: tuple[tuple[str, Callable[[Term], Optional[Term]]], ...] = (
    ("ann", _r_ann),
    ("app/head", _r_app_head),
    ("app/beta", _r_app_beta),
    ("fst/head", _r_fst_head),
    ("fst/beta", _r_fst_beta),
    ("snd/head", _r_snd_head),
    ("snd/beta", _r_snd_beta),
    ("papp/head", _r_papp_head),
    ("papp/beta", _r_papp_beta),
    ("if/head", _r_if_head),
    ("if/true", _r_if_true),
    ("if/false", _r_if_false),
    ("void-elim/head", _r_voidelim_head),
    ("bapp/head", _r_bapp_head),
    ("bapp/beta", _r_bapp_beta),
    ("extent/0", _r_extent_0),
    ("extent/1", _r_extent_1),
    ("extent/var", _r_extent_var),
    ("gel-type/const", _r_gelty_const),
    ("gel/const", _r_gel_const),
    ("ungel/head", _r_ungel_head),
    ("ungel/beta", _r_ungel_beta),
    ("vty/const", _r_vty_const),
    ("vin/const", _r_vin_const),
    ("vproj/0", _r_vproj_0),
    ("vproj/1", _r_vproj_1),
    ("vproj/head", _r_vproj_head),
    ("vproj/beta", _r_vproj_beta),
    ("coe/ty-step", _r_coe_ty_step),
    ("hcom/ty-step", _r_hcom_ty_step),
    ("com/expand", _r_com_expand),
    ("hcom/pi", _r_hcom_pi),
    ("hcom/sigma", _r_hcom_sigma),
    ("hcom/path", _r_hcom_path),
    ("hcom/bridge", _r_hcom_bridge),
    ("hcom/gel", _r_hcom_gel),
    ("hcom/ground", _r_hcom_ground),
    ("hcom/univ-refl", _r_hcom_univ_refl),
    ("hcom/univ-tube", _r_hcom_univ_tube),
    ("coe/pi", _r_coe_pi),
    ("coe/sigma", _r_coe_sigma),
    ("coe/path", _r_coe_path),
    ("coe/bridge", _r_coe_bridge),
    ("coe/gel", _r_coe_gel),
    ("coe/ground", _r_coe_ground),
    ("coe/univ-refl", _r_coe_univ_refl),
    ("fcom/refl", _r_fcom_refl),
    ("fcom/tube", _r_fcom_tube),
)


def applicable_rules(t: Term) -> list[tuple[str, Term]]:
    """Every rule that fires on t, with its reduct.  Values match none."""
    out = []
    for name, rule in RULES:
        r = rule(t)
        if r is not None:
            out.append((name, r))
    return out


def _stuck_info(t: Term) -> Stuck:
    def from_head(h: Term, garbage: str) -> Stuck:
        if isval(h):
            return Stuck(garbage, False)
        inner = step(h)
        assert isinstance(inner, Stuck)
        return Stuck(inner.reason, inner.neutral)

    match t:
        case Var(n):
            return Stuck(f"variable {n}", True)
        case App(fn=h):
            return from_head(h, "applying a non-function")
        case Fst(arg=h) | Snd(arg=h):
            return from_head(h, "projecting from a non-pair")
        case PApp(fn=h):
            return from_head(h, "path-applying a non-path")
        case BApp(fn=h):
            return from_head(h, "bridge-applying a non-bridge")
        case If(scrut=h):
            return from_head(h, "if on a non-boolean")
        case VoidElim(scrut=h):
            return from_head(h, "eliminating a non-void value")
        case Ungel(body=h):
            return from_head(h, "ungel of a non-gel value")
        case Vproj(arg=h):
            return from_head(h, "vproj of a non-vin value")
        case Hcom(ty=a) | Coe(ty=a):
            if isval(a):
                if isinstance(a, (Univ, VTy)):
                    return Stuck("unsupported-fcom: nontrivial Kan operation "
                                 "in the universe or a V type", True)
                return Stuck("Kan operation at a non-type", False)
            inner = step(a)
            assert isinstance(inner, Stuck)
            return Stuck(inner.reason, inner.neutral)
        case Fcom():
            return Stuck("unsupported-fcom: no nontrivial reduction", False)
    return Stuck(f"no rule for {type(t).__name__}", False)


def step(t: Term) -> StepResult:
    """One deterministic step, a value verdict, or stuckness."""
    if isval(t):
        return VALUE
    for _, rule in RULES:
        r = rule(t)
        if r is not None:
            return Stepped(r)
    return _stuck_info(t)


@dataclass
class Trace:
    terms: list[Term]
    steps: int


def eval_term(t: Term, fuel: int = DEFAULT_FUEL, trace: bool = False) -> tuple[Term, Trace]:
    """Iterate the step relation to a value, within a step budget."""
    tr = Trace([t] if trace else [], 0)
    cur = t
    for _ in range(fuel):
        r = step(cur)
        match r:
            case Value():
                return cur, tr
            case Stuck(reason, _):
                raise EvalError("stuck", f"stuck: {reason}", cur)
            case Stepped(nxt):
                cur = nxt
                tr.steps += 1
                if trace:
                    tr.terms.append(cur)
    raise EvalError("diverged", f"no value after {fuel} steps", cur)


def whnf(t: Term, fuel: int = DEFAULT_FUEL) -> tuple[Term, StepResult]:
    """Reduce to a value or a stuck term; the verdict rides along."""
    cur = t
    for _ in range(fuel):
        r = step(cur)
        if isinstance(r, Stepped):
            cur = r.term
        else:
            return cur, r
    raise EvalError("diverged", f"no weak head normal form after {fuel} steps", cur)
