import itertools
import random

import pytest
from hypothesis import given, strategies as st

from ptt.dims import (
    B0, B1, BridgeEq, BVar, DimCtx, DimError, DimSubst, P0, P1, PathEq, PVar,
    apart_ctx, apply_subst_dim, compose_subst, constraint_true, identity_subst,
    restrict_constraints, solve_constraints,
)


def bctx(*bs, ps=()):
    return DimCtx(frozenset(bs), frozenset(ps))


class TestApplySubst:
    def test_identity(self):
        psi = identity_subst(bctx("x"))
        assert apply_subst_dim(BVar("x"), psi) == BVar("x")

    def test_constant_assignment(self):
        psi = DimSubst({"x": B0}, {}, bctx("x"), bctx())
        assert apply_subst_dim(BVar("x"), psi) == B0

    def test_constants_untouched(self):
        psi = DimSubst({}, {"x": PVar("y")}, bctx(ps=("x",)), bctx(ps=("y",)))
        assert apply_subst_dim(P0, psi) == P0

    def test_unknown_variable_rejected(self):
        psi = identity_subst(bctx("x"))
        with pytest.raises(DimError):
            apply_subst_dim(BVar("zz"), psi)


class TestCompose:
    def test_identity_law(self):
        psi = DimSubst({"x": B1}, {}, bctx("x"), bctx())
        out = compose_subst(identity_subst(bctx("x")), psi)
        assert out.bridge_map == {"x": B1}

    def test_functional_composition(self):
        p1 = DimSubst({"x": BVar("y")}, {}, bctx("x"), bctx("y"))
        p2 = DimSubst({"y": B1}, {}, bctx("y"), bctx())
        assert compose_subst(p1, p2).bridge_map == {"x": B1}

    def test_injectivity_constants_absorb(self):
        p1 = DimSubst({"x": BVar("z"), "y": BVar("w")}, {},
                      bctx("x", "y"), bctx("z", "w"))
        p2 = DimSubst({"z": B0, "w": B0}, {}, bctx("z", "w"), bctx())
        out = compose_subst(p1, p2)
        assert out.bridge_map == {"x": B0, "y": B0}

    def test_diagonal_statically_impossible(self):
        with pytest.raises(DimError):
            DimSubst({"x": BVar("y")}, {}, bctx("x", "y"), bctx("y"))


@st.composite
def bridge_substs(draw):
    n = draw(st.integers(1, 4))
    src = [f"b{i}" for i in range(n)]
    tgt_pool = [f"c{i}" for i in range(4)]
    used = set()
    bmap = {}
    for v in src:
        kind = draw(st.sampled_from(["const", "var", "id"]))
        if kind == "const":
            bmap[v] = draw(st.sampled_from([B0, B1]))
        elif kind == "var":
            free = [w for w in tgt_pool if w not in used]
            if not free:
                bmap[v] = B0
            else:
                w = draw(st.sampled_from(free))
                used.add(w)
                bmap[v] = BVar(w)
    tgt = {d.name for d in bmap.values() if isinstance(d, BVar)}
    tgt |= {v for v in src if v not in bmap}
    return DimSubst(bmap, {}, bctx(*src), bctx(*tgt))


@given(bridge_substs(), st.data())
def test_injectivity_preserved_by_composition(p1, data):
    # build a second substitution out of p1's target
    tgt = sorted(p1.target.bridge_vars)
    bmap = {}
    used = set()
    for v in tgt:
        kind = data.draw(st.sampled_from(["const", "var", "id"]))
        if kind == "const":
            bmap[v] = data.draw(st.sampled_from([B0, B1]))
        elif kind == "var":
            w = f"d{len(used)}"
            used.add(w)
            bmap[v] = BVar(w)
    p2 = DimSubst(bmap, {}, p1.target, bctx(*(used | {v for v in tgt if v not in bmap})))
    out = compose_subst(p1, p2)  # constructor re-checks injectivity
    for v in p1.source.bridge_vars:
        assert out.apply_bridge(BVar(v)) == p2.apply_bridge(p1.apply_bridge(BVar(v)))


class TestApart:
    def test_removes_variable(self):
        assert apart_ctx(bctx("x", "y", ps=("p",)), BVar("x")) == bctx("y", ps=("p",))

    def test_constants_remove_nothing(self):
        c = bctx("x", ps=("p",))
        assert apart_ctx(c, B0) == c

    def test_iterated_list(self):
        c = bctx("x", "y", "z")
        for r in (BVar("x"), BVar("y")):
            c = apart_ctx(c, r)
        assert c == bctx("z")

    @given(st.sets(st.sampled_from("abcde")), st.sampled_from("abcde"))
    def test_idempotent(self, names, r):
        c = DimCtx(frozenset(names))
        once = apart_ctx(c, BVar(r))
        assert apart_ctx(once, BVar(r)) == once


class TestRestrict:
    def test_quoted_clause(self):
        cs = (BridgeEq(BVar("x"), B0), PathEq(PVar("y"), P0))
        assert restrict_constraints(cs, BVar("x")) == (PathEq(PVar("y"), P0),)

    def test_empty(self):
        assert restrict_constraints((), BVar("x")) == ()

    def test_no_mention(self):
        cs = (BridgeEq(BVar("y"), B1),)
        assert restrict_constraints(cs, BVar("x")) == cs

    @given(st.lists(st.sampled_from("wxyz"), max_size=5), st.sampled_from("wxyz"))
    def test_never_mentions_removed(self, names, r):
        cs = tuple(BridgeEq(BVar(n), B0) for n in names)
        for xi in restrict_constraints(cs, BVar(r)):
            assert not xi.mentions(BVar(r))


def brute_force_satisfiable(cs) -> bool:
    """Oracle: enumerate constant assignments to all mentioned variables."""
    bs, ps = set(), set()
    for xi in cs:
        for d in (xi.lhs, xi.rhs):
            if isinstance(d, BVar):
                bs.add(d.name)
            elif isinstance(d, PVar):
                ps.add(d.name)
    bs, ps = sorted(bs), sorted(ps)

    def value(d, env):
        if isinstance(d, (BVar, PVar)):
            return env[d.name]
        return d.value

    for assign in itertools.product((0, 1), repeat=len(bs) + len(ps)):
        env = dict(zip(bs + ps, assign))
        if all(value(xi.lhs, env) == value(xi.rhs, env) for xi in cs):
            return True
    return False


class TestSolve:
    def test_path_clash_inconsistent(self):
        sol = solve_constraints((PathEq(PVar("x"), P0), PathEq(PVar("x"), P1)))
        assert not sol.consistent

    def test_direct_assignment(self):
        sol = solve_constraints((BridgeEq(BVar("x"), B0),))
        assert sol.consistent and sol.subst.bridge_map == {"x": B0}

    def test_union_then_pin(self):
        # frozen from the brute-force oracle below: {x -> 1, y -> 1}
        cs = (PathEq(PVar("x"), PVar("y")), PathEq(PVar("y"), P1))
        assert brute_force_satisfiable(cs)
        sol = solve_constraints(cs)
        assert sol.consistent
        assert sol.subst.path_map == {"x": P1, "y": P1}

    @given(st.data())
    def test_against_brute_force(self, data):
        names_b = ["u", "v"]
        names_p = ["x", "y"]
        cs = []
        for _ in range(data.draw(st.integers(0, 5))):
            if data.draw(st.booleans()):
                cs.append(BridgeEq(
                    data.draw(st.sampled_from([BVar(n) for n in names_b] + [B0, B1])),
                    data.draw(st.sampled_from([B0, B1]))))
            else:
                pool = [PVar(n) for n in names_p] + [P0, P1]
                cs.append(PathEq(data.draw(st.sampled_from(pool)),
                                 data.draw(st.sampled_from(pool))))
        cs = tuple(cs)
        sol = solve_constraints(cs)
        assert sol.consistent == brute_force_satisfiable(cs)
        if sol.consistent:
            psi = sol.subst
            from ptt.dims import constraint_subst
            for xi in cs:
                assert constraint_true(constraint_subst(xi, psi))
            # every satisfying constant assignment factors through the mgu
            bs = [n for n in names_b]
            ps = [n for n in names_p]
            for assign in itertools.product((0, 1), repeat=4):
                env = dict(zip(bs + ps, assign))

                def ev(d):
                    if isinstance(d, (BVar, PVar)):
                        return env[d.name]
                    return d.value

                if all(ev(xi.lhs) == ev(xi.rhs) for xi in cs):
                    for n in bs:
                        assert ev(psi.apply_bridge(BVar(n))) == env[n]
                    for n in ps:
                        assert ev(psi.apply_path(PVar(n))) == env[n]
