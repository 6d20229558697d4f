"""Definitional equality of terms and types under a constraint list.

The decision procedure: solve the constraints (inconsistent lists make every
equation hold vacuously), apply the most general solution, weak-head reduce,
then compare type-directed where a type is known (eta for functions, pairs,
paths, bridges, and gel) and structurally on neutral spines.  Two judgmental
laws that the operational semantics cannot fire are applied during weak-head
reduction here: endpoint collapse of neutral (b)app at a constant, and the
cap/face collapse of Kan operations whose type is neutral or a universe.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .dims import (
    B0, B1, P0, P1, BConst, BridgeDim, BVar, ConstraintSet, DimCtx, PConst,
    PathDim, PVar, constraint_true, solve_constraints,
)
from . import opsem
from .opsem import Stuck, whnf
from .syntax import (
    Ann, App, BApp, BLam, Bool, BridgeTy, Coe, Fcom, FalseTm, Fst, GelIntro,
    GelTy, Hcom, If, Lam, Marker, PApp, Pair, PathTy, Pi, PLam, Sigma, Snd,
    Star, Term, TermHyp, TrueTm, Tube, TypingCtx, Ungel, Unit, Univ, Var,
    Vin, Void, VoidElim, Vproj, VTy, alpha_equal, bsubst, ctx_lookup,
    ctx_subst_dims, dsubst, fresh, subst, subst_dims, subst_term,
)

_COLLAPSE_FUEL = 10_000


class ConversionError(Exception):
    """The comparison could not be decided (fuel, or an unsupported spine)."""


@dataclass(frozen=True)
class EqProblem:
    dim_ctx: DimCtx
    constraints: ConstraintSet
    ctx: TypingCtx
    lhs: Term
    rhs: Term
    at_type: Term | None = None


def equal_term(p: EqProblem) -> bool:
    sol = solve_constraints(p.constraints, p.dim_ctx)
    if not sol.consistent:
        return True
    psi = sol.subst
    conv = _Converter(psi.target, ctx_subst_dims(p.ctx, psi))
    ty = subst_dims(p.at_type, psi) if p.at_type is not None else None
    return conv.terms(subst_dims(p.lhs, psi), subst_dims(p.rhs, psi), ty)


def equal_type(p: EqProblem) -> bool:
    sol = solve_constraints(p.constraints, p.dim_ctx)
    if not sol.consistent:
        return True
    psi = sol.subst
    conv = _Converter(psi.target, ctx_subst_dims(p.ctx, psi))
    return conv.types(subst_dims(p.lhs, psi), subst_dims(p.rhs, psi))


class _Converter:
    def __init__(self, dctx: DimCtx, ctx: TypingCtx, fuel: int = opsem.DEFAULT_FUEL):
        self.dctx = dctx
        self.ctx = ctx
        self.fuel = fuel

    def _with(self, *entries) -> "_Converter":
        c = _Converter(self.dctx, self.ctx + tuple(entries), self.fuel)
        return c

    def _with_bridge(self, x: str) -> "_Converter":
        c = _Converter(self.dctx.add_bridge(x), self.ctx + (Marker(BVar(x)),), self.fuel)
        return c

    def _with_path(self, x: str) -> "_Converter":
        return _Converter(self.dctx.add_path(x), self.ctx, self.fuel)

    # -- weak-head reduction extended with judgmental collapse laws --------

    def whnf(self, t: Term) -> Term:
        for _ in range(_COLLAPSE_FUEL):
            t, verdict = whnf(t, self.fuel)
            if isinstance(verdict, Stuck):
                collapsed = self._collapse(t)
                if collapsed is not None:
                    t = collapsed
                    continue
            return t
        raise ConversionError("weak-head reduction did not settle")

    def _collapse(self, t: Term) -> Term | None:
        match t:
            case Hcom(_, src, dst, cap, tubes):
                if src == dst:
                    return cap
                for u in tubes:
                    if constraint_true(u.constraint):
                        return dsubst(u.body, dst, u.var)
            case Coe(_, _, src, dst, arg) if src == dst:
                return arg
            case PApp(fn, PConst() as e):
                ty = self._spine_whnf_type(fn)
                if isinstance(ty, PathTy):
                    return ty.left if e == P0 else ty.right
            case BApp(fn, BConst() as e):
                ty = self._spine_whnf_type(fn)
                if isinstance(ty, BridgeTy):
                    return ty.left if e == B0 else ty.right
        # a stuck spine may be blocked on a collapsible head
        head_field = {
            App: "fn", PApp: "fn", BApp: "fn", Fst: "arg", Snd: "arg",
            If: "scrut", VoidElim: "scrut", Ungel: "body", Vproj: "arg",
            Hcom: "ty", Coe: "ty",
        }.get(type(t))
        if head_field is not None:
            inner = self
            if isinstance(t, Ungel):
                inner = _Converter(self.dctx.add_bridge(t.var), self.ctx, self.fuel)
            head = getattr(t, head_field)
            new_head = inner._collapse(head)
            if new_head is not None:
                return replace(t, **{head_field: new_head})
        return None

    def _spine_type(self, t: Term) -> Term | None:
        """Type of a variable-headed spine, from the context alone."""
        match t:
            case Var(n):
                return ctx_lookup(self.ctx, n)
            case Ann(ty, _):
                return ty
            case App(fn, arg):
                ty = self._spine_whnf_type(fn)
                if isinstance(ty, Pi):
                    return subst_term(ty.cod, ty.var, arg)
            case Fst(arg):
                ty = self._spine_whnf_type(arg)
                if isinstance(ty, Sigma):
                    return ty.dom
            case Snd(arg):
                ty = self._spine_whnf_type(arg)
                if isinstance(ty, Sigma):
                    return subst_term(ty.cod, ty.var, Fst(arg))
            case PApp(fn, d):
                ty = self._spine_whnf_type(fn)
                if isinstance(ty, PathTy):
                    return dsubst(ty.ty, d, ty.var)
            case BApp(fn, d):
                ty = self._spine_whnf_type(fn)
                if isinstance(ty, BridgeTy):
                    return bsubst(ty.ty, d, ty.var)
            case If(var, motive, scrut, _, _):
                return subst_term(motive, var, scrut)
            case VoidElim(var, motive, scrut):
                return subst_term(motive, var, scrut)
            case Ungel(x, body):
                inner = _Converter(self.dctx.add_bridge(x), self.ctx, self.fuel)
                ty = inner._spine_type(body)
                if ty is not None:
                    ty = inner.whnf(ty)
                    if isinstance(ty, GelTy) and ty.dim == BVar(x):
                        return subst(ty.rel, tmap={
                            ty.var_a: bsubst(body, B0, x),
                            ty.var_b: bsubst(body, B1, x),
                        })
            case Hcom(ty=ty):
                return ty
            case Coe(var, ty, _, dst, _):
                return dsubst(ty, dst, var)
            case Vproj(_, arg, _):
                ty = self._spine_whnf_type(arg)
                if isinstance(ty, VTy):
                    return ty.right
        return None

    def _spine_whnf_type(self, t: Term) -> Term | None:
        ty = self._spine_type(t)
        return self.whnf(ty) if ty is not None else None

    # -- term equality ------------------------------------------------------

    def terms(self, lhs: Term, rhs: Term, ty: Term | None) -> bool:
        if ty is None:
            return self.untyped(lhs, rhs)
        ty = self.whnf(ty)
        match ty:
            case Univ():
                return self.types(lhs, rhs)
            case Pi(var, dom, cod):
                a = fresh(var)
                inner = self._with(TermHyp(a, dom))
                return inner.terms(App(lhs, Var(a)), App(rhs, Var(a)),
                                   subst_term(cod, var, Var(a)))
            case Sigma(var, dom, cod):
                if not self.terms(Fst(lhs), Fst(rhs), dom):
                    return False
                return self.terms(Snd(lhs), Snd(rhs), subst_term(cod, var, Fst(lhs)))
            case PathTy(var, line, _, _):
                x = fresh(var)
                inner = self._with_path(x)
                return inner.terms(PApp(lhs, PVar(x)), PApp(rhs, PVar(x)),
                                   dsubst(line, PVar(x), var))
            case BridgeTy(var, line, _, _):
                x = fresh(var)
                inner = self._with_bridge(x)
                return inner.terms(BApp(lhs, BVar(x)), BApp(rhs, BVar(x)),
                                   bsubst(line, BVar(x), var))
            case GelTy(dim=BVar()) as g:
                lw, rw = self.whnf(lhs), self.whnf(rhs)
                if isinstance(lw, GelIntro) or isinstance(rw, GelIntro):
                    lc = self._gel_components(lw, g)
                    rc = self._gel_components(rw, g)
                    if lc is None or rc is None:
                        return False
                    if not self.terms(lc[0], rc[0], g.left):
                        return False
                    if not self.terms(lc[1], rc[1], g.right):
                        return False
                    wty = subst(g.rel, tmap={g.var_a: lc[0], g.var_b: lc[1]})
                    return self.terms(lc[2], rc[2], wty)
                return self.untyped(lw, rw)
            case _:
                return self.untyped(lhs, rhs)

    def _gel_components(self, v: Term, g: GelTy) -> tuple[Term, Term, Term] | None:
        """Split a value of a gel type into endpoint and witness components."""
        if isinstance(v, GelIntro):
            if v.dim != g.dim:
                return None
            return v.left, v.right, v.witness
        assert isinstance(g.dim, BVar)
        y = g.dim.name
        x = fresh(y)
        opened = bsubst(v, BVar(x), y)
        return bsubst(v, B0, y), bsubst(v, B1, y), Ungel(x, opened)

    # -- untyped (structural) equality on weak-head normal forms ------------

    def untyped(self, lhs: Term, rhs: Term) -> bool:
        lhs, rhs = self.whnf(lhs), self.whnf(rhs)
        if alpha_equal(lhs, rhs):
            return True
        # eta across a constructor/neutral split
        match (lhs, rhs):
            case (Lam(), _) | (_, Lam()):
                a = fresh("a")
                l = self._body(lhs, Var(a), App)
                r = self._body(rhs, Var(a), App)
                return self.untyped(l, r)
            case (PLam(), _) | (_, PLam()):
                x = fresh("x")
                inner = self._with_path(x)
                return inner.untyped(PApp(lhs, PVar(x)) if not isinstance(lhs, PLam)
                                     else dsubst(lhs.body, PVar(x), lhs.var),
                                     PApp(rhs, PVar(x)) if not isinstance(rhs, PLam)
                                     else dsubst(rhs.body, PVar(x), rhs.var))
            case (BLam(), _) | (_, BLam()):
                x = fresh("x")
                inner = self._with_bridge(x)
                return inner.untyped(BApp(lhs, BVar(x)) if not isinstance(lhs, BLam)
                                     else bsubst(lhs.body, BVar(x), lhs.var),
                                     BApp(rhs, BVar(x)) if not isinstance(rhs, BLam)
                                     else bsubst(rhs.body, BVar(x), rhs.var))
            case (Pair(), _) | (_, Pair()):
                return (self.untyped(Fst(lhs), Fst(rhs))
                        and self.untyped(Snd(lhs), Snd(rhs)))
            case (GelIntro(), _) | (_, GelIntro()) if not (
                    isinstance(lhs, GelIntro) and isinstance(rhs, GelIntro)):
                other = rhs if isinstance(lhs, GelIntro) else lhs
                oty = self._spine_type(other)
                if oty is not None:
                    oty = self.whnf(oty)
                    if isinstance(oty, GelTy) and isinstance(oty.dim, BVar):
                        return self.terms(lhs, rhs, oty)
                return False
        if type(lhs) is not type(rhs):
            return False
        return self._congruent(lhs, rhs)

    def _body(self, t: Term, arg: Term, app) -> Term:
        if isinstance(t, Lam):
            return subst_term(t.body, t.var, arg)
        return app(t, arg)

    def _congruent(self, lhs: Term, rhs: Term) -> bool:
        match (lhs, rhs):
            case (Var(a), Var(b)):
                return a == b
            case ((Univ(), Univ()) | (Bool(), Bool()) | (Unit(), Unit())
                  | (Void(), Void()) | (TrueTm(), TrueTm())
                  | (FalseTm(), FalseTm()) | (Star(), Star())):
                return True
            case (Pi(v1, d1, c1), Pi(v2, d2, c2)) | (Sigma(v1, d1, c1), Sigma(v2, d2, c2)):
                if not self.types(d1, d2):
                    return False
                a = fresh(v1)
                inner = self._with(TermHyp(a, d1))
                return inner.types(subst_term(c1, v1, Var(a)), subst_term(c2, v2, Var(a)))
            case (PathTy(v1, t1, l1, r1), PathTy(v2, t2, l2, r2)):
                x = fresh(v1)
                inner = self._with_path(x)
                if not inner.types(dsubst(t1, PVar(x), v1), dsubst(t2, PVar(x), v2)):
                    return False
                return (self.terms(l1, l2, dsubst(t1, P0, v1))
                        and self.terms(r1, r2, dsubst(t1, P1, v1)))
            case (BridgeTy(v1, t1, l1, r1), BridgeTy(v2, t2, l2, r2)):
                x = fresh(v1)
                inner = self._with_bridge(x)
                if not inner.types(bsubst(t1, BVar(x), v1), bsubst(t2, BVar(x), v2)):
                    return False
                return (self.terms(l1, l2, bsubst(t1, B0, v1))
                        and self.terms(r1, r2, bsubst(t1, B1, v1)))
            case (GelTy(d1, a1, b1, va1, vb1, r1), GelTy(d2, a2, b2, va2, vb2, r2)):
                if d1 != d2:
                    return False
                if not (self.types(a1, a2) and self.types(b1, b2)):
                    return False
                a, b = fresh(va1), fresh(vb1)
                inner = self._with(TermHyp(a, a1), TermHyp(b, b1))
                return inner.types(
                    subst(r1, tmap={va1: Var(a), vb1: Var(b)}),
                    subst(r2, tmap={va2: Var(a), vb2: Var(b)}),
                )
            case (VTy(d1, a1, b1, e1), VTy(d2, a2, b2, e2)):
                return (d1 == d2 and self.types(a1, a2) and self.types(b1, b2)
                        and self.untyped(e1, e2))
            case (Vin(d1, l1, r1), Vin(d2, l2, r2)):
                return d1 == d2 and self.untyped(l1, l2) and self.untyped(r1, r2)
            case (Vproj(d1, a1, f1), Vproj(d2, a2, f2)):
                return d1 == d2 and self.untyped(a1, a2) and self.untyped(f1, f2)
            case (App(f1, a1), App(f2, a2)):
                return self.untyped(f1, f2) and self.untyped(a1, a2)
            case (PApp(f1, d1), PApp(f2, d2)) | (BApp(f1, d1), BApp(f2, d2)):
                return d1 == d2 and self.untyped(f1, f2)
            case (Fst(a1), Fst(a2)) | (Snd(a1), Snd(a2)):
                return self.untyped(a1, a2)
            case (If(v1, m1, s1, t1, f1), If(v2, m2, s2, t2, f2)):
                a = fresh(v1)
                inner = self._with(TermHyp(a, Bool()))
                return (inner.types(subst_term(m1, v1, Var(a)), subst_term(m2, v2, Var(a)))
                        and self.untyped(s1, s2) and self.untyped(t1, t2)
                        and self.untyped(f1, f2))
            case (VoidElim(v1, m1, s1), VoidElim(v2, m2, s2)):
                a = fresh(v1)
                inner = self._with(TermHyp(a, Void()))
                return (inner.types(subst_term(m1, v1, Var(a)), subst_term(m2, v2, Var(a)))
                        and self.untyped(s1, s2))
            case (Ungel(x1, b1), Ungel(x2, b2)):
                x = fresh(x1)
                inner = self._with_bridge(x)
                return inner.untyped(bsubst(b1, BVar(x), x1), bsubst(b2, BVar(x), x2))
            case (Hcom(t1, r1, s1, c1, u1), Hcom(t2, r2, s2, c2, u2)):
                return ((r1, s1) == (r2, s2) and self.types(t1, t2)
                        and self.untyped(c1, c2) and self._tubes(u1, u2))
            case (Fcom(r1, s1, c1, u1), Fcom(r2, s2, c2, u2)):
                return ((r1, s1) == (r2, s2)
                        and self.untyped(c1, c2) and self._tubes(u1, u2))
            case (Coe(v1, t1, r1, s1, a1), Coe(v2, t2, r2, s2, a2)):
                if (r1, s1) != (r2, s2):
                    return False
                x = fresh(v1)
                inner = self._with_path(x)
                return (inner.types(dsubst(t1, PVar(x), v1), dsubst(t2, PVar(x), v2))
                        and self.untyped(a1, a2))
            case (GelIntro(d1, l1, r1, w1), GelIntro(d2, l2, r2, w2)):
                return (d1 == d2 and self.untyped(l1, l2) and self.untyped(r1, r2)
                        and self.untyped(w1, w2))
        return False

    def _tubes(self, u1, u2) -> bool:
        if len(u1) != len(u2):
            return False
        for a, b in zip(u1, u2):
            if a.constraint != b.constraint:
                return False
            x = fresh(a.var)
            inner = self._with_path(x)
            if not inner.untyped(dsubst(a.body, PVar(x), a.var),
                                 dsubst(b.body, PVar(x), b.var)):
                return False
        return True

    # -- type equality -------------------------------------------------------

    def types(self, lhs: Term, rhs: Term) -> bool:
        lhs, rhs = self.whnf(lhs), self.whnf(rhs)
        if alpha_equal(lhs, rhs):
            return True
        if type(lhs) is not type(rhs):
            return False
        return self._congruent(lhs, rhs)
