import random

from hypothesis import given, settings, strategies as st

from ptt.dims import B0, B1, BVar, DimCtx, DimSubst, P0, P1, PVar
from ptt.syntax import (
    App, BApp, BLam, Bool, FalseTm, GelTy, If, Marker, PApp, PLam, Star,
    TermHyp, TrueTm, Var, alpha_equal, bsubst, ctx_apart, dsubst, free_vars,
    subst, subst_dims, subst_term,
)
from _gen import gen_term


def bctx(*bs, ps=()):
    return DimCtx(frozenset(bs), frozenset(ps))


class TestSubstDims:
    def test_closed_term(self):
        psi = DimSubst({"x": B0}, {}, bctx("x"), bctx())
        assert subst_dims(Star(), psi) == Star()

    def test_capture_avoided(self):
        # substituting y := x under a binder for x renames the binder
        t = BLam("x", BApp(Var("q"), BVar("y")))
        psi = DimSubst({"y": BVar("x")}, {}, bctx("y"), bctx("x"))
        out = subst_dims(t, psi)
        assert isinstance(out, BLam) and out.var != "x"
        assert out.body == BApp(Var("q"), BVar("x"))

    def test_head_substitution_no_reduction(self):
        t = GelTy(BVar("x"), Var("A"), Var("B"), "a", "b", Var("R"))
        psi = DimSubst({"x": B0}, {}, bctx("x"), bctx())
        assert subst_dims(t, psi) == GelTy(B0, Var("A"), Var("B"), "a", "b", Var("R"))


class TestSingleVariable:
    def test_structural(self):
        t = BApp(Var("c"), BVar("x"))
        assert bsubst(t, B0, "x") == BApp(Var("c"), B0)

    def test_bound_occurrence_shadowed(self):
        t = PLam("x", PApp(Var("m"), PVar("x")))
        assert dsubst(t, P0, "x") == t

    def test_no_occurrence(self):
        t = If("b", Bool(), Var("b0"), TrueTm(), FalseTm())
        assert dsubst(t, P0, "y") == t


class TestCtxApart:
    def test_drops_suffix(self):
        ctx = (TermHyp("c", Var("C")), Marker(BVar("x")), TermHyp("d", Var("D")))
        assert ctx_apart(ctx, BVar("x")) == (TermHyp("c", Var("C")),)

    def test_constant_keeps_all(self):
        ctx = (TermHyp("c", Var("C")),)
        assert ctx_apart(ctx, B0) == ctx

    def test_empty(self):
        assert ctx_apart((), BVar("x")) == ()

    @given(st.integers(0, 2**32))
    def test_never_drops_on_constants(self, seed):
        rng = random.Random(seed)
        entries = []
        for i in range(rng.randint(0, 5)):
            if rng.random() < 0.5:
                entries.append(TermHyp(f"v{i}", Bool()))
            else:
                entries.append(Marker(BVar(f"x{i}")))
        ctx = tuple(entries)
        assert ctx_apart(ctx, B0) == ctx
        assert ctx_apart(ctx, B1) == ctx


class TestAlpha:
    def test_bound_rename(self):
        assert alpha_equal(BLam("x", Star()), BLam("y", Star()))

    def test_distinct_constants(self):
        assert not alpha_equal(TrueTm(), FalseTm())

    def test_path_lambdas(self):
        assert alpha_equal(PLam("x", PApp(Var("p"), PVar("x"))),
                           PLam("y", PApp(Var("p"), PVar("y"))))


def random_term(seed: int):
    rng = random.Random(seed)
    return gen_term(rng, rng.randint(0, 5), tvars=("f", "g"),
                    bvars=("bx", "by"), pvars=("px", "py"))


def random_subst(seed: int) -> DimSubst:
    rng = random.Random(seed)
    src = bctx("bx", "by", ps=("px", "py"))
    bmap = {}
    images = rng.sample([B0, B1, BVar("bz"), BVar("bw")], 2)
    for v, img in zip(("bx", "by"), images):
        if rng.random() < 0.8:
            bmap[v] = img
    pmap = {}
    for v in ("px", "py"):
        if rng.random() < 0.8:
            pmap[v] = rng.choice([P0, PVar("pz"), PVar("px")])
    tgt = bctx("bz", "bw", "bx", "by", ps=("pz", "px", "py"))
    return DimSubst(bmap, pmap, src, tgt)


@given(st.integers(0, 2**32))
def test_identity_substitution_is_alpha_identity(seed):
    t = random_term(seed)
    psi = DimSubst({}, {}, bctx("bx", "by", ps=("px", "py")),
                   bctx("bx", "by", ps=("px", "py")))
    assert alpha_equal(subst_dims(t, psi), t)


@settings(max_examples=300)
@given(st.integers(0, 2**32), st.integers(0, 2**32), st.integers(0, 2**32))
def test_substitution_composes(s1, s2, s3):
    t = random_term(s1)
    p1 = random_subst(s2)
    rng = random.Random(s3)
    bmap, pmap = {}, {}
    for v in sorted(p1.target.bridge_vars):
        if rng.random() < 0.5:
            bmap[v] = rng.choice([B0, B1])
    for v in sorted(p1.target.path_vars):
        if rng.random() < 0.5:
            pmap[v] = rng.choice([P0, P1])
    p2 = DimSubst(bmap, pmap, p1.target, p1.target)
    from ptt.dims import compose_subst
    lhs = subst_dims(subst_dims(t, p1), p2)
    rhs = subst_dims(t, compose_subst(p1, p2))
    assert alpha_equal(lhs, rhs)


@given(st.integers(0, 2**32), st.integers(0, 2**32))
def test_free_dims_shrink_along_images(s1, s2):
    t = random_term(s1)
    psi = random_subst(s2)
    fv = free_vars(t)
    out = free_vars(subst_dims(t, psi))
    allowed_b = set()
    allowed_p = set()
    for v in fv.bridges:
        img = psi.apply_bridge(BVar(v))
        if isinstance(img, BVar):
            allowed_b.add(img.name)
    for v in fv.paths:
        img = psi.apply_path(PVar(v))
        if isinstance(img, PVar):
            allowed_p.add(img.name)
    assert out.bridges <= allowed_b
    assert out.paths <= allowed_p


@given(st.integers(0, 2**32))
def test_term_substitution_avoids_dimension_capture(seed):
    # substituting a term with a free bridge var under a blam binder of the
    # same name must rename the binder
    t = BLam("bx", App(Var("f"), Var("hole")))
    out = subst_term(t, "hole", BApp(Var("c"), BVar("bx")))
    assert isinstance(out, BLam) and out.var != "bx"
    assert BVar("bx") != out.var
    fv = free_vars(out)
    assert "bx" in fv.bridges  # stays free, not captured
