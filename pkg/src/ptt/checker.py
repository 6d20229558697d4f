"""Bidirectional type checker over (dimension ctx; constraints; telescope).

Introduction forms check, elimination forms infer; hcom/coe/com carry their
type and infer.  Constraint lists are discharged at judgment entry by
substituting their most general solution (inconsistent lists hold
vacuously); premises that extend the constraints re-enter the same way.
Every rejection names the rule whose premise failed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .dims import (
    B0, B1, P0, P1, BConst, BridgeDim, BridgeEq, BVar, Constraint,
    ConstraintSet, DimCtx, PathDim, PathEq, PConst, PVar, apart_ctx,
    restrict_constraints, solve_constraints,
)
from .conversion import _Converter, ConversionError
from . import opsem
from .syntax import (
    Ann, App, BApp, BLam, Bool, BridgeTy, Coe, Com, Extent, FalseTm, Fcom,
    Fst, GelIntro, GelTy, Hcom, If, Lam, Marker, PApp, Pair, PathTy, Pi,
    PLam, Sigma, Snd, Star, Term, TermHyp, TrueTm, Tube, TypingCtx, Ungel,
    Unit, Univ, Var, Vin, Void, VoidElim, Vproj, VTy, bsubst, ctx_apart,
    ctx_lookup, ctx_names, ctx_subst_dims, dsubst, free_vars, fresh, subst,
    subst_dims, subst_term,
)
from .surface import print_term


class CheckError(Exception):
    def __init__(self, rule: str, msg: str, premise: int | None = None,
                 expected: Term | None = None, actual: Term | None = None,
                 kind: str = "premise"):
        self.rule = rule
        self.premise = premise
        self.expected = expected
        self.actual = actual
        self.kind = kind
        self.loc: str | None = None
        detail = msg
        if expected is not None:
            detail += f"\n  expected: {print_term(expected)}"
        if actual is not None:
            detail += f"\n  actual:   {print_term(actual)}"
        super().__init__(detail)

    def __str__(self) -> str:
        where = f" [{self.loc}]" if self.loc else ""
        prem = f" premise {self.premise}" if self.premise is not None else ""
        return f"{self.rule}{prem}{where}: {super().__str__()}"


@dataclass(frozen=True)
class Env:
    dctx: DimCtx
    ctx: TypingCtx = ()

    def converter(self) -> _Converter:
        return _Converter(self.dctx, self.ctx)

    def hyp(self, name: str, ty: Term) -> "Env":
        return Env(self.dctx, self.ctx + (TermHyp(name, ty),))

    def bridge(self, x: str) -> "Env":
        return Env(self.dctx.add_bridge(x), self.ctx + (Marker(BVar(x)),))

    def path(self, x: str) -> "Env":
        return Env(self.dctx.add_path(x), self.ctx)

    def apart(self, r: BridgeDim) -> "Env":
        return Env(apart_ctx(self.dctx, r), ctx_apart(self.ctx, r))


def _under(env: Env, xis: tuple[Constraint, ...], *terms: Term):
    """Enter a judgment restricted by extra constraints.

    Returns None when the constraints are unsatisfiable (the judgment holds
    vacuously), otherwise the substituted environment and terms.
    """
    sol = solve_constraints(xis, env.dctx)
    if not sol.consistent:
        return None
    psi = sol.subst
    if psi.is_identity():
        return (env, *terms)
    return (Env(psi.target, ctx_subst_dims(env.ctx, psi)),
            *(subst_dims(t, psi) for t in terms))


def _whnf(env: Env, t: Term) -> Term:
    try:
        return env.converter().whnf(t)
    except (opsem.EvalError, ConversionError) as e:
        raise CheckError("evaluation", f"weak-head reduction failed: {e}") from e


def _conv_terms(env: Env, l: Term, r: Term, ty: Term) -> bool:
    try:
        return env.converter().terms(l, r, ty)
    except (opsem.EvalError, ConversionError) as e:
        raise CheckError("conversion", f"equality undecided: {e}") from e


def _conv_types(env: Env, l: Term, r: Term) -> bool:
    try:
        return env.converter().types(l, r)
    except (opsem.EvalError, ConversionError) as e:
        raise CheckError("conversion", f"type equality undecided: {e}") from e


def _check_dim(env: Env, d, rule: str) -> None:
    if not env.dctx.has(d):
        raise CheckError(rule, f"dimension {d!r} is not in scope", kind="scope")


def _check_constraint(env: Env, xi: Constraint, rule: str) -> None:
    for d in (xi.lhs, xi.rhs):
        _check_dim(env, d, rule)


# ---------------------------------------------------------------------------
# Well-formed types


def equiv_type(a: Term, b: Term) -> Term:
    """The type of equivalences between a and b (contractible fibers)."""
    f, bb, aa, pv = fresh("f"), fresh("b"), fresh("a"), fresh("c")

    def pathty(ty: Term, l: Term, r: Term) -> Term:
        return PathTy(fresh("_"), ty, l, r)

    def is_contr(ty: Term) -> Term:
        u, v = fresh("u"), fresh("v")
        return Sigma(u, ty, Pi(v, ty, pathty(ty, Var(v), Var(u))))

    fiber = Sigma(aa, a, pathty(b, App(Var(f), Var(aa)), Var(bb)))
    return Sigma(f, Pi(fresh("_"), a, b), Pi(bb, b, is_contr(fiber)))


def check_is_type(env: Env, a: Term) -> None:
    """The type well-formedness judgment (all in-scope formers are Kan).

    Analyzes the term as written: reducing first is wrong for operators
    like extent whose reducts capture dimensions and are only semantically
    well-typed.  Terms that are not formers go through inference.
    """
    match a:
        case Univ() | Bool() | Unit() | Void():
            return
        case Pi(var, dom, cod) | Sigma(var, dom, cod):
            check_is_type(env, dom)
            v = fresh(var)
            check_is_type(env.hyp(v, dom), subst_term(cod, var, Var(v)))
            return
        case PathTy(var, line, left, right):
            x = fresh(var)
            check_is_type(env.path(x), dsubst(line, PVar(x), var))
            check(env, left, dsubst(line, P0, var))
            check(env, right, dsubst(line, P1, var))
            return
        case BridgeTy(var, line, left, right):
            x = fresh(var)
            check_is_type(env.bridge(x), bsubst(line, BVar(x), var))
            check(env, left, bsubst(line, B0, var))
            check(env, right, bsubst(line, B1, var))
            return
        case GelTy(dim, left, right, va, vb, rel):
            _check_dim(env, dim, "Gel-F")
            if isinstance(dim, BConst):
                check_is_type(env, left if dim == B0 else right)
                return
            inner = env.apart(dim)
            _apartness_guard(inner, left, "Gel-F", 1)
            _apartness_guard(inner, right, "Gel-F", 2)
            check_is_type(inner, left)
            check_is_type(inner, right)
            a2, b2 = fresh(va), fresh(vb)
            renamed = subst(rel, tmap={va: Var(a2), vb: Var(b2)})
            _apartness_guard(inner, renamed, "Gel-F", 3, extra={a2, b2})
            check_is_type(inner.hyp(a2, left).hyp(b2, right), renamed)
            return
        case VTy(dim, left, right, equiv):
            _check_dim(env, dim, "V-F")
            check_is_type(env, right)
            at0 = _under(env, (PathEq(dim, P0),), left, right, equiv)
            if at0 is not None:
                env0, left0, right0, equiv0 = at0
                check_is_type(env0, left0)
                check(env0, equiv0, equiv_type(left0, right0))
            return
        case Ann(ty, tm):
            w = _whnf(env, ty)
            if isinstance(w, Univ):
                check(env, tm, ty)
                return
            check_is_type(env, tm)
            return
        case _:
            try:
                ty = infer(env, a)
            except CheckError as e:
                if e.rule != "annotation":
                    raise
                reduct = _whnf(env, a)
                if reduct == a:
                    raise
                check_is_type(env, reduct)
                return
            if not isinstance(_whnf(env, ty), Univ):
                raise CheckError("type-wf", "not a type", actual=a)


def _apartness_guard(inner: Env, t: Term, rule: str, premise: int,
                     extra: set[str] = frozenset()) -> None:
    """Fail fast when a term uses variables removed by an apartness step."""
    fv = free_vars(t)
    have = ctx_names(inner.ctx) | set(extra)
    bad_t = fv.terms - have
    bad_b = fv.bridges - inner.dctx.bridge_vars
    bad_p = fv.paths - inner.dctx.path_vars
    if bad_t or bad_b or bad_p:
        bad = sorted(bad_t | bad_b | bad_p)
        raise CheckError(rule, f"premise must live apart: {bad} not available "
                         "in the restricted context", premise=premise, kind="apartness")


# ---------------------------------------------------------------------------
# Inference


def infer(env: Env, t: Term) -> Term:
    match t:
        case Var(name):
            ty = ctx_lookup(env.ctx, name)
            if ty is None:
                raise CheckError("var", f"unknown variable {name}", kind="unbound")
            return ty
        case Bool() | Unit() | Void():
            return Univ()
        case TrueTm() | FalseTm():
            return Bool()
        case Star():
            return Unit()
        case Univ():
            raise CheckError("universe", "U is a type but not an element of any type")
        case Pi(var, dom, cod) | Sigma(var, dom, cod):
            rule = "Pi-F" if isinstance(t, Pi) else "Sigma-F"
            check(env, dom, Univ(), rule=rule)
            v = fresh(var)
            check(env.hyp(v, dom), subst_term(cod, var, Var(v)), Univ(), rule=rule)
            return Univ()
        case PathTy(var, line, left, right):
            x = fresh(var)
            check(env.path(x), dsubst(line, PVar(x), var), Univ(), rule="Path-F")
            check(env, left, dsubst(line, P0, var))
            check(env, right, dsubst(line, P1, var))
            return Univ()
        case BridgeTy(var, line, left, right):
            x = fresh(var)
            check(env.bridge(x), bsubst(line, BVar(x), var), Univ(), rule="Bridge-F")
            check(env, left, bsubst(line, B0, var))
            check(env, right, bsubst(line, B1, var))
            return Univ()
        case GelTy(dim, left, right, va, vb, rel):
            _check_dim(env, dim, "Gel-F")
            if isinstance(dim, BConst):
                return infer(env, left if dim == B0 else right)
            inner = env.apart(dim)
            _apartness_guard(inner, left, "Gel-F", 1)
            _apartness_guard(inner, right, "Gel-F", 2)
            check(inner, left, Univ(), rule="Gel-F")
            check(inner, right, Univ(), rule="Gel-F")
            a2, b2 = fresh(va), fresh(vb)
            renamed = subst(rel, tmap={va: Var(a2), vb: Var(b2)})
            _apartness_guard(inner, renamed, "Gel-F", 3, extra={a2, b2})
            check(inner.hyp(a2, left).hyp(b2, right), renamed, Univ(), rule="Gel-F")
            return Univ()
        case VTy():
            check_is_type(env, t)  # includes the small checks at endpoints
            return Univ()
        case Lam():
            raise CheckError("annotation", "cannot infer an unannotated function; "
                             "wrap it as (the TYPE TERM)")
        case Pair():
            raise CheckError("annotation", "cannot infer an unannotated pair; "
                             "wrap it as (the TYPE TERM)")
        case PLam(var, body):
            x = fresh(var)
            body_x = dsubst(body, PVar(x), var)
            ty = infer(env.path(x), body_x)
            return PathTy(x, ty, dsubst(body, P0, var), dsubst(body, P1, var))
        case BLam(var, body):
            x = fresh(var)
            body_x = bsubst(body, BVar(x), var)
            ty = infer(env.bridge(x), body_x)
            return BridgeTy(x, ty, bsubst(body, B0, var), bsubst(body, B1, var))
        case App(fn, arg):
            fn_ty = _whnf(env, infer(env, fn))
            if not isinstance(fn_ty, Pi):
                raise CheckError("Pi-E", "application of a non-function",
                                 actual=fn_ty)
            check(env, arg, fn_ty.dom, rule="Pi-E")
            return subst_term(fn_ty.cod, fn_ty.var, arg)
        case Fst(arg):
            ty = _whnf(env, infer(env, arg))
            if not isinstance(ty, Sigma):
                raise CheckError("Sigma-E", "projection from a non-pair", actual=ty)
            return ty.dom
        case Snd(arg):
            ty = _whnf(env, infer(env, arg))
            if not isinstance(ty, Sigma):
                raise CheckError("Sigma-E", "projection from a non-pair", actual=ty)
            return subst_term(ty.cod, ty.var, Fst(arg))
        case PApp(fn, dim):
            _check_dim(env, dim, "Path-E")
            ty = _whnf(env, infer(env, fn))
            if not isinstance(ty, PathTy):
                raise CheckError("Path-E", "path application of a non-path", actual=ty)
            return dsubst(ty.ty, dim, ty.var)
        case BApp(fn, dim):
            return _infer_bapp(env, fn, dim)
        case If(var, motive, scrut, on_true, on_false):
            v = fresh(var)
            check_is_type(env.hyp(v, Bool()), subst_term(motive, var, Var(v)))
            check(env, scrut, Bool(), rule="bool-E")
            check(env, on_true, subst_term(motive, var, TrueTm()), rule="bool-E")
            check(env, on_false, subst_term(motive, var, FalseTm()), rule="bool-E")
            return subst_term(motive, var, scrut)
        case VoidElim(var, motive, scrut):
            v = fresh(var)
            check_is_type(env.hyp(v, Void()), subst_term(motive, var, Var(v)))
            check(env, scrut, Void(), rule="void-E")
            return subst_term(motive, var, scrut)
        case Ungel(var, body):
            return _infer_ungel(env, var, body)
        case GelIntro(dim, left, right, _) as g:
            _check_dim(env, dim, "Gel-I")
            if isinstance(dim, BConst):
                return infer(env, left if dim == B0 else right)
            raise CheckError("annotation", "cannot infer a gel introduction at a "
                             "variable; wrap it as (the TYPE TERM)")
        case Extent():
            return _infer_extent(env, t)
        case Hcom():
            return _infer_hcom(env, t)
        case Coe(var, ty, src, dst, arg):
            _check_dim(env, src, "coe")
            _check_dim(env, dst, "coe")
            x = fresh(var)
            check_is_type(env.path(x), dsubst(ty, PVar(x), var))
            check(env, arg, dsubst(ty, src, var), rule="coe")
            return dsubst(ty, dst, var)
        case Com():
            return _infer_com(env, t)
        case Vin(dim, left, right):
            if isinstance(dim, PConst):
                return infer(env, left if dim == P0 else right)
            raise CheckError("V-I", "vin is supported at endpoint dimensions only")
        case Vproj(dim, arg, fn):
            if dim == P0:
                return infer(env, App(fn, arg))
            if dim == P1:
                return infer(env, arg)
            raise CheckError("V-E", "vproj is supported at endpoint dimensions only")
        case Fcom():
            raise CheckError("fcom", "fcom is reserved syntax with no typing rules")
        case Ann(ty, tm):
            check_is_type(env, ty)
            check(env, tm, ty)
            return ty
    raise CheckError("infer", f"no inference rule for {type(t).__name__}")


def _infer_bapp(env: Env, fn: Term, dim: BridgeDim) -> Term:
    _check_dim(env, dim, "Bridge-E")
    inner = env.apart(dim)
    try:
        fn_ty = _whnf(inner, infer(inner, fn))
    except CheckError as e:
        if e.kind == "unbound" and isinstance(dim, BVar):
            raise CheckError(
                "Bridge-E",
                f"the applied term must live apart from {dim.name}: {e.args[0] if e.args else e}",
                premise=1, kind="apartness") from e
        raise
    if isinstance(dim, BVar):
        fv = free_vars(fn)
        if dim.name in fv.bridges:
            raise CheckError("Bridge-E", f"the applied term mentions {dim.name}; "
                             "a bridge may only be applied to a fresh dimension",
                             premise=1, kind="apartness")
    if not isinstance(fn_ty, BridgeTy):
        raise CheckError("Bridge-E", "bridge application of a non-bridge", actual=fn_ty)
    return bsubst(fn_ty.ty, dim, fn_ty.var)


def _infer_ungel(env: Env, var: str, body: Term) -> Term:
    x = fresh(var)
    inner = env.bridge(x)
    body_x = bsubst(body, BVar(x), var)
    body_w = _whnf(inner, body_x)
    if isinstance(body_w, GelIntro) and body_w.dim == BVar(x):
        # beta-redex: the eliminated dimension is gone from the components,
        # and the result type is the witness's type (rule Gel-beta)
        fv = (free_vars(body_w.left).bridges | free_vars(body_w.right).bridges
              | free_vars(body_w.witness).bridges)
        if x in fv:
            raise CheckError("Gel-beta", "gel components must be apart from the "
                             "eliminated dimension", kind="apartness")
        infer(env, body_w.left)
        infer(env, body_w.right)
        return infer(env, body_w.witness)
    ty = _whnf(inner, infer(inner, body_w))
    if not (isinstance(ty, GelTy) and ty.dim == BVar(x)):
        raise CheckError("Gel-E", "ungel requires a term in a gel type over its "
                         "bound dimension", actual=ty)
    for part, idx in ((ty.left, 1), (ty.right, 2), (ty.rel, 3)):
        if x in free_vars(part).bridges:
            raise CheckError("Gel-E", "gel components must be apart from the "
                             "eliminated dimension", premise=idx, kind="apartness")
    return subst(ty.rel, tmap={
        ty.var_a: bsubst(body_w, B0, x),
        ty.var_b: bsubst(body_w, B1, x),
    })


def _replace_subterm(t: Term, pattern: Term, replacement: Term,
                     pattern_free: frozenset[str]) -> Term:
    """Syntactic replacement of an exact subterm, stopping under binders
    that shadow the pattern's free variables."""
    from .syntax import _NODES, _T, _TU  # traversal table
    from dataclasses import fields as dc_fields

    def go(t: Term) -> Term:
        if t == pattern:
            return replacement
        if isinstance(t, Var):
            return t
        kw = {}
        changed = False
        for spec in _NODES[type(t)]:
            kind, f = spec[0], spec[1]
            old = getattr(t, f)
            if kind == _T:
                shadowed = any(getattr(t, nf) in pattern_free for _, nf in spec[2])
                new = old if shadowed else go(old)
            elif kind == _TU:
                new = tuple(
                    tube if tube.var in pattern_free
                    else type(tube)(tube.constraint, tube.var, go(tube.body))
                    for tube in old
                )
            else:
                new = old
            kw[f] = new
            changed = changed or new != old
        if not changed:
            return t
        for fld in dc_fields(t):
            if fld.name not in kw:
                kw[fld.name] = getattr(t, fld.name)
        return type(t)(**kw)

    return go(t)


def _infer_extent(env: Env, t: Extent) -> Term:
    _check_dim(env, t.dim, "extent")
    arg_ty = infer(env, t.arg)
    inner = env.apart(t.dim)
    x = fresh("x")
    if isinstance(t.dim, BVar):
        line = subst(arg_ty, bmap={t.dim.name: BVar(x)})
        _apartness_guard(inner, bsubst(line, B0, x), "extent", 1)
    else:
        line = arg_ty
    envx = inner.bridge(x)
    check_is_type(envx, line)
    a0_ty, a1_ty = bsubst(line, B0, x), bsubst(line, B1, x)

    # recover the codomain family from the bridge branch's type
    a, a1, c, d = fresh(t.var_a), fresh(t.var_b), fresh(t.var_c), fresh("d")
    qbody = subst(t.branchq, tmap={t.var_a: Var(a), t.var_b: Var(a1), t.var_c: Var(c)})
    env_q = inner.hyp(a, a0_ty).hyp(a1, a1_ty).hyp(
        c, BridgeTy(x, line, Var(a), Var(a1)))
    q_ty = _whnf(env_q, infer(env_q, qbody))
    if not isinstance(q_ty, BridgeTy):
        raise CheckError("extent", "the bridge branch must form a bridge",
                         premise=6, actual=q_ty)
    opened = bsubst(q_ty.ty, BVar(x), q_ty.var)
    cod = _replace_subterm(opened, BApp(Var(c), BVar(x)), Var(d),
                           frozenset({c, x}))
    if c in free_vars(cod).terms:
        raise CheckError("extent", "cannot reconstruct the codomain family from "
                         "the bridge branch; annotate the branch with (the ...)",
                         premise=6)
    envxd = envx.hyp(d, line)
    check_is_type(envxd, cod)

    # branch premises, all apart from the principal dimension
    n_a = subst(t.branch0, tmap={t.var0: Var(a)})
    _apartness_guard(inner, n_a, "extent", 4, extra={a})
    check(inner.hyp(a, a0_ty), n_a,
          subst_term(bsubst(cod, B0, x), d, Var(a)), rule="extent")
    p_a1 = subst(t.branch1, tmap={t.var1: Var(a1)})
    _apartness_guard(inner, p_a1, "extent", 5, extra={a1})
    check(inner.hyp(a1, a1_ty), p_a1,
          subst_term(bsubst(cod, B1, x), d, Var(a1)), rule="extent")
    _apartness_guard(env_q, qbody, "extent", 6)
    expected_q = BridgeTy(x, subst_term(cod, d, BApp(Var(c), BVar(x))), n_a, p_a1)
    check(env_q, qbody, expected_q, rule="extent")

    check(env, t.arg, bsubst(line, t.dim, x), rule="extent")
    return subst_term(bsubst(cod, t.dim, x), d, t.arg)


def _align_tube(tube: Tube, w: str) -> Term:
    return dsubst(tube.body, PVar(w), tube.var)


def _infer_hcom(env: Env, t: Hcom) -> Term:
    _check_dim(env, t.src, "hcom")
    _check_dim(env, t.dst, "hcom")
    check_is_type(env, t.ty)
    check(env, t.cap, t.ty, rule="hcom")
    for u in t.tubes:
        _check_constraint(env, u.constraint, "hcom")
    w = fresh("y")
    for i, ui in enumerate(t.tubes):
        for j, uj in enumerate(t.tubes):
            entered = _under(Env(env.dctx.add_path(w), env.ctx),
                             (ui.constraint, uj.constraint),
                             _align_tube(ui, w), _align_tube(uj, w), t.ty)
            if entered is None:
                continue
            env2, ni, nj, ty2 = entered
            if not _conv_terms(env2, ni, nj, ty2):
                raise CheckError("hcom", f"tube faces {i} and {j} disagree on "
                                 "their overlap", premise=2)
        entered = _under(env, (ui.constraint,),
                         dsubst(ui.body, t.src, ui.var), t.cap, t.ty)
        if entered is not None:
            env2, face, cap2, ty2 = entered
            if not _conv_terms(env2, face, cap2, ty2):
                raise CheckError("hcom", f"tube face {i} disagrees with the cap "
                                 "on its source side", premise=3)
    return t.ty


def _infer_com(env: Env, t: Com) -> Term:
    _check_dim(env, t.src, "com")
    _check_dim(env, t.dst, "com")
    x = fresh(t.var)
    line = dsubst(t.ty, PVar(x), t.var)
    check_is_type(env.path(x), line)
    check(env, t.cap, dsubst(t.ty, t.src, t.var), rule="com")
    for u in t.tubes:
        _check_constraint(env, u.constraint, "com")
    for i, ui in enumerate(t.tubes):
        for j, uj in enumerate(t.tubes):
            entered = _under(Env(env.dctx.add_path(x), env.ctx),
                             (ui.constraint, uj.constraint),
                             _align_tube(ui, x), _align_tube(uj, x), line)
            if entered is None:
                continue
            env2, ni, nj, ty2 = entered
            if not _conv_terms(env2, ni, nj, ty2):
                raise CheckError("com", f"tube faces {i} and {j} disagree on "
                                 "their overlap", premise=2)
        entered = _under(env, (ui.constraint,),
                         dsubst(ui.body, t.src, ui.var),
                         t.cap, dsubst(t.ty, t.src, t.var))
        if entered is not None:
            env2, face, cap2, ty2 = entered
            if not _conv_terms(env2, face, cap2, ty2):
                raise CheckError("com", f"tube face {i} disagrees with the cap "
                                 "on its source side", premise=3)
    return dsubst(t.ty, t.dst, t.var)


# ---------------------------------------------------------------------------
# Checking


def check(env: Env, t: Term, ty: Term, rule: str | None = None) -> None:
    w = _whnf(env, ty)
    match (t, w):
        case (Lam(var, body), Pi(pvar, dom, cod)):
            v = fresh(var)
            check(env.hyp(v, dom), subst_term(body, var, Var(v)),
                  subst_term(cod, pvar, Var(v)))
            return
        case (Lam(), _):
            raise CheckError(rule or "Pi-I", "function against a non-function type",
                             expected=w, actual=t)
        case (Pair(a, b), Sigma(svar, dom, cod)):
            check(env, a, dom)
            check(env, b, subst_term(cod, svar, a))
            return
        case (Pair(), _):
            raise CheckError(rule or "Sigma-I", "pair against a non-pair type",
                             expected=w, actual=t)
        case (PLam(var, body), PathTy(pvar, line, left, right)):
            x = fresh(var)
            body_x = dsubst(body, PVar(x), var)
            check(env.path(x), body_x, dsubst(line, PVar(x), pvar))
            for e, endpoint, idx in ((P0, left, 2), (P1, right, 3)):
                if not _conv_terms(env, dsubst(body, e, var), endpoint,
                                   dsubst(line, e, pvar)):
                    raise CheckError("Path-I", "endpoint mismatch", premise=idx,
                                     expected=endpoint, actual=dsubst(body, e, var))
            return
        case (BLam(var, body), BridgeTy(bvar, line, left, right)):
            x = fresh(var)
            body_x = bsubst(body, BVar(x), var)
            check(env.bridge(x), body_x, bsubst(line, BVar(x), bvar))
            for e, endpoint, idx in ((B0, left, 2), (B1, right, 3)):
                if not _conv_terms(env, bsubst(body, e, var), endpoint,
                                   bsubst(line, e, bvar)):
                    raise CheckError("Bridge-I", "endpoint mismatch", premise=idx,
                                     expected=endpoint, actual=bsubst(body, e, var))
            return
        case (GelIntro(dim, left, right, witness), _):
            _check_dim(env, dim, "Gel-I")
            if isinstance(dim, BConst):
                # gel at an endpoint is judgmentally its endpoint component
                check(env, left if dim == B0 else right, ty)
                return
            if not (isinstance(w, GelTy) and w.dim == dim):
                raise CheckError("Gel-I", "gel introduction against a type that "
                                 "is not a gel over the same dimension",
                                 expected=w, actual=t)
            inner = env.apart(dim)
            for part, idx in ((left, 1), (right, 2), (witness, 3)):
                _apartness_guard(inner, part, "Gel-I", idx)
            check(inner, left, w.left, rule="Gel-I")
            check(inner, right, w.right, rule="Gel-I")
            check(inner, witness,
                  subst(w.rel, tmap={w.var_a: left, w.var_b: right}), rule="Gel-I")
            return
        case (Vin(dim, left, right), _):
            if isinstance(dim, PConst):
                check(env, left if dim == P0 else right, ty)
                return
            raise CheckError("V-I", "vin is supported at endpoint dimensions only")
    try:
        actual = infer(env, t)
    except CheckError as e:
        if e.rule != "annotation":
            raise
        # beta-redexes reaching an inferring position: infer the reduct
        reduct = _whnf(env, t)
        if reduct == t:
            raise
        actual = infer(env, reduct)
    if not _conv_types(env, actual, ty):
        raise CheckError(rule or "conversion", "type mismatch",
                         expected=ty, actual=actual)


# ---------------------------------------------------------------------------
# Judgment interface (constraint entry points)


@dataclass(frozen=True)
class TypeWF:
    dim_ctx: DimCtx
    constraints: ConstraintSet
    typing_ctx: TypingCtx
    ty: Term
    kind: str = "Kan"  # every in-scope former is Kan; 'pre' reserved


@dataclass(frozen=True)
class TypeEq:
    dim_ctx: DimCtx
    constraints: ConstraintSet
    typing_ctx: TypingCtx
    lhs: Term
    rhs: Term
    kind: str = "Kan"


@dataclass(frozen=True)
class ElemOf:
    dim_ctx: DimCtx
    constraints: ConstraintSet
    typing_ctx: TypingCtx
    tm: Term
    ty: Term


@dataclass(frozen=True)
class ElemEq:
    dim_ctx: DimCtx
    constraints: ConstraintSet
    typing_ctx: TypingCtx
    lhs: Term
    rhs: Term
    ty: Term


def _enter(j, *terms):
    env = Env(j.dim_ctx, j.typing_ctx)
    return _under(env, tuple(j.constraints), *terms)


def check_type(j: TypeWF) -> None:
    entered = _enter(j, j.ty)
    if entered is None:
        return
    env, ty = entered
    check_is_type(env, ty)


def check_type_eq(j: TypeEq) -> None:
    entered = _enter(j, j.lhs, j.rhs)
    if entered is None:
        return
    env, lhs, rhs = entered
    check_is_type(env, lhs)
    check_is_type(env, rhs)
    if not _conv_types(env, lhs, rhs):
        raise CheckError("type-eq", "types are not equal", expected=lhs, actual=rhs)


def check_elem(j: ElemOf) -> None:
    entered = _enter(j, j.tm, j.ty)
    if entered is None:
        return
    env, tm, ty = entered
    check_is_type(env, ty)
    check(env, tm, ty)


def check_eq(j: ElemEq) -> None:
    entered = _enter(j, j.lhs, j.rhs, j.ty)
    if entered is None:
        return
    env, lhs, rhs, ty = entered
    check_is_type(env, ty)
    check(env, lhs, ty)
    check(env, rhs, ty)
    if not _conv_terms(env, lhs, rhs, ty):
        raise CheckError("elem-eq", "terms are not equal at this type",
                         expected=lhs, actual=rhs)


# ---------------------------------------------------------------------------
# Declarations and files


@dataclass
class Definitions:
    """Transparent definitions: fully unfolded at insertion time, so every
    later use is resolved by one simultaneous substitution.  Bodies are
    annotated with their types so unfolded heads stay inferable."""

    table: dict[str, tuple[Term, Term]] = field(default_factory=dict)

    def resolve(self, t: Term) -> Term:
        names = free_vars(t).terms & self.table.keys()
        if not names:
            return t
        return subst(t, tmap={n: Ann(*self.table[n]) for n in names})

    def add(self, name: str, ty: Term, tm: Term) -> None:
        self.table[name] = (ty, tm)


@dataclass
class DeclResult:
    name: str
    ok: bool
    message: str = ""
    line: int = 0


def check_decl(defs: Definitions, decl) -> DeclResult:
    """Check one parsed declaration, extending the definition table."""
    from .surface import Decl  # local import to keep module layering one-way

    name = decl.name or f"{decl.kind}@{decl.line}"
    empty = Env(DimCtx())
    try:
        match decl.kind:
            case "def":
                ty = defs.resolve(decl.ty)
                tm = defs.resolve(decl.lhs)
                check_is_type(empty, ty)
                check(empty, tm, ty)
                defs.add(decl.name, ty, tm)
            case "eq" | "neq":
                ty = defs.resolve(decl.ty)
                lhs, rhs = defs.resolve(decl.lhs), defs.resolve(decl.rhs)
                check_is_type(empty, ty)
                check(empty, lhs, ty)
                check(empty, rhs, ty)
                equal = _conv_terms(empty, lhs, rhs, ty)
                if decl.kind == "eq" and not equal:
                    raise CheckError("elem-eq", "declared equation does not hold",
                                     expected=lhs, actual=rhs)
                if decl.kind == "neq" and equal:
                    raise CheckError("elem-neq", "terms declared distinct are "
                                     "convertible", expected=lhs, actual=rhs)
            case "normalize":
                tm = defs.resolve(decl.lhs)
                expected = defs.resolve(decl.rhs)
                value, _ = opsem.eval_term(tm)
                from .syntax import alpha_equal
                if not alpha_equal(value, expected):
                    raise CheckError("normalize", "normal form mismatch",
                                     expected=expected, actual=value)
            case "claim":
                check_is_type(empty, defs.resolve(decl.ty))
            case other:
                raise CheckError("decl", f"unknown declaration kind {other}")
    except (CheckError, opsem.EvalError, ConversionError) as e:
        if isinstance(e, CheckError) and e.loc is None:
            e.loc = f"{name}:{decl.line}"
        return DeclResult(name, False, str(e), decl.line)
    return DeclResult(name, True, "", decl.line)


def check_file(path: str, defs: Definitions | None = None) -> list[DeclResult]:
    from .surface import parse_file_text

    defs = defs if defs is not None else Definitions()
    with open(path) as f:
        decls = parse_file_text(f.read())
    return [check_decl(defs, d) for d in decls]
