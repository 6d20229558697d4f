"""Seeded generator of arbitrary well-scoped terms.

Terms are well-scoped (every free dimension drawn from the ambient sets,
every term variable from the given pool) but deliberately not well-typed:
the determinism and scope-preservation properties quantify over raw syntax.
"""

from __future__ import annotations

import random

from ptt.dims import B0, B1, BridgeEq, BVar, P0, P1, PathEq, PVar
from ptt import syntax as S

GROUND = (S.Bool(), S.Unit(), S.Void(), S.Univ(), S.TrueTm(), S.FalseTm(), S.Star())


def gen_term(rng: random.Random, depth: int, tvars=(), bvars=(), pvars=()) -> S.Term:
    if depth <= 0:
        if tvars and rng.random() < 0.4:
            return S.Var(rng.choice(tvars))
        return rng.choice(GROUND)

    def t(tv=None, bv=None, pv=None, d=None):
        return gen_term(
            rng,
            rng.randint(0, depth - 1) if d is None else d,
            tuple(tv) if tv is not None else tvars,
            tuple(bv) if bv is not None else bvars,
            tuple(pv) if pv is not None else pvars,
        )

    def bdim():
        return rng.choice([B0, B1] + [BVar(b) for b in bvars])

    def pdim():
        return rng.choice([P0, P1] + [PVar(p) for p in pvars])

    def name(base):
        return f"{base}{rng.randrange(100)}"

    def constraint():
        if bvars and rng.random() < 0.5:
            return BridgeEq(rng.choice([BVar(b) for b in bvars]),
                            rng.choice([B0, B1]))
        return PathEq(pdim(), pdim())

    def tubes():
        out = []
        for _ in range(rng.randint(0, 2)):
            y = name("y")
            out.append(S.Tube(constraint(), y, t(pv=pvars + (y,))))
        return tuple(out)

    match rng.randrange(24):
        case 0:
            return rng.choice(GROUND) if not tvars else S.Var(rng.choice(tvars))
        case 1:
            v = name("a")
            return S.Pi(v, t(), t(tv=tvars + (v,)))
        case 2:
            v = name("a")
            return S.Sigma(v, t(), t(tv=tvars + (v,)))
        case 3:
            v = name("a")
            return S.Lam(v, t(tv=tvars + (v,)))
        case 4:
            return S.App(t(), t())
        case 5:
            return S.Pair(t(), t())
        case 6:
            return S.Fst(t()) if rng.random() < 0.5 else S.Snd(t())
        case 7:
            x = name("px")
            return S.PathTy(x, t(pv=pvars + (x,)), t(), t())
        case 8:
            x = name("px")
            return S.PLam(x, t(pv=pvars + (x,)))
        case 9:
            return S.PApp(t(), pdim())
        case 10:
            x = name("bx")
            return S.BridgeTy(x, t(bv=bvars + (x,)), t(), t())
        case 11:
            x = name("bx")
            return S.BLam(x, t(bv=bvars + (x,)))
        case 12:
            return S.BApp(t(), bdim())
        case 13:
            a, b = name("a"), name("b")
            return S.GelTy(bdim(), t(), t(), a, b, t(tv=tvars + (a, b)))
        case 14:
            return S.GelIntro(bdim(), t(), t(), t())
        case 15:
            x = name("bx")
            return S.Ungel(x, t(bv=bvars + (x,)))
        case 16:
            a, a1, va, vb, vc = (name("a"), name("a1"), name("a"), name("b"),
                                 name("c"))
            return S.Extent(bdim(), t(), a, t(tv=tvars + (a,)),
                            a1, t(tv=tvars + (a1,)),
                            va, vb, vc, t(tv=tvars + (va, vb, vc)))
        case 17:
            return S.Hcom(t(), pdim(), pdim(), t(), tubes())
        case 18:
            z = name("z")
            return S.Coe(z, t(pv=pvars + (z,)), pdim(), pdim(), t())
        case 19:
            z = name("z")
            return S.Com(z, t(pv=pvars + (z,)), pdim(), pdim(), t(), tubes())
        case 20:
            return S.Fcom(pdim(), pdim(), t(), tubes())
        case 21:
            v = name("w")
            return S.If(v, t(tv=tvars + (v,)), t(), t(), t())
        case 22:
            v = name("w")
            return S.VoidElim(v, t(tv=tvars + (v,)), t())
        case 23:
            if rng.random() < 0.5:
                return S.Vin(pdim(), t(), t())
            return S.Vproj(pdim(), t(), t())
    raise AssertionError
