"""Surface syntax: an s-expression reader and printer for the term language.

One form per constructor; brackets group binders with the subterm they scope
over.  Dimension occurrences are resolved by sort from the binding site, so
`0`/`1` denote path or bridge endpoints according to position.  Comments run
from `;` to end of line.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .dims import (
    B0, B1, P0, P1, BConst, BridgeDim, BridgeEq, BVar, Constraint,
    PathDim, PathEq, PConst, PVar,
)
from . import syntax as S
from .syntax import Term, Tube


class ParseError(Exception):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {msg}" if line else msg)
        self.line, self.col = line, col


@dataclass(frozen=True)
class Atom:
    text: str
    line: int
    col: int


@dataclass(frozen=True)
class SList:
    items: tuple
    bracket: bool
    line: int
    col: int


Sexp = Union[Atom, SList]

_DELIMS = "()[];"


def tokenize(src: str):
    line, col = 1, 0
    i = 0
    toks = []
    while i < len(src):
        c = src[i]
        col += 1
        if c == "\n":
            line += 1
            col = 0
            i += 1
        elif c.isspace():
            i += 1
        elif c == ";":
            while i < len(src) and src[i] != "\n":
                i += 1
        elif c in "()[]":
            toks.append((c, line, col))
            i += 1
        else:
            j = i
            while j < len(src) and not src[j].isspace() and src[j] not in _DELIMS:
                j += 1
            text = src[i:j]
            if "%" in text:
                S.reserve_name(text)
            toks.append((text, line, col))
            col += j - i - 1
            i = j
    return toks


def read_sexprs(src: str) -> list[Sexp]:
    toks = tokenize(src)
    pos = 0

    def read() -> Sexp:
        nonlocal pos
        if pos >= len(toks):
            raise ParseError("unexpected end of input")
        text, line, col = toks[pos]
        pos += 1
        if text in "([":
            closer = ")" if text == "(" else "]"
            items = []
            while True:
                if pos >= len(toks):
                    raise ParseError(f"missing '{closer}'", line, col)
                if toks[pos][0] in ")]":
                    if toks[pos][0] != closer:
                        raise ParseError(f"mismatched '{toks[pos][0]}'", toks[pos][1], toks[pos][2])
                    pos += 1
                    return SList(tuple(items), text == "[", line, col)
                items.append(read())
        if text in ")]":
            raise ParseError(f"unexpected '{text}'", line, col)
        return Atom(text, line, col)

    out = []
    while pos < len(toks):
        out.append(read())
    return out


# ---------------------------------------------------------------------------
# Terms

_ATOMS: dict[str, Term] = {
    "U": S.Univ(),
    "bool": S.Bool(),
    "true": S.TrueTm(),
    "false": S.FalseTm(),
    "unit": S.Unit(),
    "star": S.Star(),
    "void": S.Void(),
}

KEYWORDS = frozenset(_ATOMS) | {
    "pi", "->", "lam", "sigma", "prod", "pair", "fst", "snd",
    "path", "plam", "papp", "bridge", "blam", "bapp",
    "Gel", "gel", "ungel", "extent",
    "hcom", "coe", "com", "fcom", "vty", "vin", "vproj",
    "if", "void-elim", "the",
    "def", "eq", "neq", "normalize", "claim", "tube", "=",
}


@dataclass
class _Env:
    bridge: frozenset[str]
    path: frozenset[str]

    def with_bridge(self, n: str) -> "_Env":
        return _Env(self.bridge | {n}, self.path)

    def with_path(self, n: str) -> "_Env":
        return _Env(self.bridge, self.path | {n})


def _err(sx: Sexp, msg: str) -> ParseError:
    return ParseError(msg, sx.line, sx.col)


def _atom(sx: Sexp, what: str) -> str:
    if not isinstance(sx, Atom):
        raise _err(sx, f"expected {what}")
    if sx.text in KEYWORDS:
        raise _err(sx, f"keyword '{sx.text}' used as {what}")
    return sx.text


def _bracket(sx: Sexp, n: int, what: str) -> tuple:
    if not (isinstance(sx, SList) and sx.bracket and len(sx.items) == n):
        raise _err(sx, f"expected {what}")
    return sx.items


def _bdim(sx: Sexp, env: _Env) -> BridgeDim:
    if isinstance(sx, Atom):
        if sx.text == "0":
            return B0
        if sx.text == "1":
            return B1
        if sx.text in env.bridge:
            return BVar(sx.text)
        if sx.text in env.path:
            raise _err(sx, f"'{sx.text}' is a path dimension, bridge expected")
        raise _err(sx, f"unbound bridge dimension '{sx.text}'")
    raise _err(sx, "expected a bridge dimension")


def _pdim(sx: Sexp, env: _Env) -> PathDim:
    if isinstance(sx, Atom):
        if sx.text == "0":
            return P0
        if sx.text == "1":
            return P1
        if sx.text in env.path:
            return PVar(sx.text)
        if sx.text in env.bridge:
            raise _err(sx, f"'{sx.text}' is a bridge dimension, path expected")
        raise _err(sx, f"unbound path dimension '{sx.text}'")
    raise _err(sx, "expected a path dimension")


def _constraint(sx: Sexp, env: _Env) -> Constraint:
    if not (isinstance(sx, SList) and not sx.bracket and len(sx.items) == 3):
        raise _err(sx, "expected a constraint (= d e)")
    head, lhs, rhs = sx.items
    if not (isinstance(head, Atom) and head.text == "="):
        raise _err(sx, "expected a constraint (= d e)")
    if isinstance(lhs, Atom) and lhs.text in env.bridge:
        r = _bdim(rhs, env)
        if not isinstance(r, BConst):
            raise _err(rhs, "bridge equations may only equate to an endpoint")
        return BridgeEq(BVar(lhs.text), r)
    return PathEq(_pdim(lhs, env), _pdim(rhs, env))


def _tube(sx: Sexp, env: _Env) -> Tube:
    if not (isinstance(sx, SList) and not sx.bracket and sx.items
            and isinstance(sx.items[0], Atom) and sx.items[0].text == "tube"):
        raise _err(sx, "expected (tube (= d e) [y N])")
    if len(sx.items) != 3:
        raise _err(sx, "tube takes a constraint and a bound face")
    xi = _constraint(sx.items[1], env)
    y, body = _bracket(sx.items[2], 2, "[y N]")
    yn = _atom(y, "path dimension binder")
    return Tube(xi, yn, parse_term(body, env.with_path(yn)))


def parse_term(sx: Sexp, env: _Env | None = None) -> Term:
    env = env or _Env(frozenset(), frozenset())
    if isinstance(sx, Atom):
        if sx.text in _ATOMS:
            return _ATOMS[sx.text]
        if sx.text in KEYWORDS:
            raise _err(sx, f"keyword '{sx.text}' is not a term")
        if sx.text in env.bridge or sx.text in env.path:
            raise _err(sx, f"dimension '{sx.text}' used as a term")
        return S.Var(sx.text)
    if sx.bracket:
        raise _err(sx, "unexpected bracket")
    if not sx.items:
        raise _err(sx, "empty form")
    head = sx.items[0]
    args = sx.items[1:]
    if not isinstance(head, Atom) or head.text not in KEYWORDS:
        # bare application, left-associated
        if len(args) < 1:
            raise _err(sx, "application needs an argument")
        t = parse_term(head, env)
        for a in args:
            t = S.App(t, parse_term(a, env))
        return t

    def arity(n: int) -> None:
        if len(args) != n:
            raise _err(sx, f"'{head.text}' takes {n} arguments, got {len(args)}")

    match head.text:
        case "pi" | "sigma":
            if len(args) < 2:
                raise _err(sx, f"'{head.text}' needs binders and a body")
            body = parse_term(args[-1], env)
            for b in reversed(args[:-1]):
                v, dom = _bracket(b, 2, "[a A]")
                vn = _atom(v, "variable")
                cls = S.Pi if head.text == "pi" else S.Sigma
                body = cls(vn, parse_term(dom, env), body)
            return body
        case "->":
            if len(args) < 2:
                raise _err(sx, "'->' needs at least two types")
            tys = [parse_term(a, env) for a in args]
            out = tys[-1]
            for dom in reversed(tys[:-1]):
                out = S.Pi(S.fresh("_"), dom, out)
            return out
        case "prod":
            arity(2)
            return S.Sigma(S.fresh("_"), parse_term(args[0], env), parse_term(args[1], env))
        case "lam" | "plam" | "blam":
            if len(args) != 2:
                raise _err(sx, f"'{head.text}' takes a binder list and a body")
            if not (isinstance(args[0], SList) and args[0].bracket and args[0].items):
                raise _err(args[0], "expected a binder list [a ...]")
            names = [_atom(a, "binder") for a in args[0].items]
            env2 = env
            for n in names:
                if head.text == "plam":
                    env2 = env2.with_path(n)
                elif head.text == "blam":
                    env2 = env2.with_bridge(n)
            body = parse_term(args[1], env2)
            cls = {"lam": S.Lam, "plam": S.PLam, "blam": S.BLam}[head.text]
            for n in reversed(names):
                body = cls(n, body)
            return body
        case "pair":
            arity(2)
            return S.Pair(parse_term(args[0], env), parse_term(args[1], env))
        case "fst":
            arity(1)
            return S.Fst(parse_term(args[0], env))
        case "snd":
            arity(1)
            return S.Snd(parse_term(args[0], env))
        case "papp" | "bapp":
            if len(args) < 2:
                raise _err(sx, f"'{head.text}' takes a term and dimensions")
            t = parse_term(args[0], env)
            for d in args[1:]:
                if head.text == "papp":
                    t = S.PApp(t, _pdim(d, env))
                else:
                    t = S.BApp(t, _bdim(d, env))
            return t
        case "path" | "bridge":
            if len(args) == 3 and not (isinstance(args[0], SList) and args[0].bracket):
                v = S.fresh("_")
                line = parse_term(args[0], env)
            elif len(args) == 3:
                b, ty = _bracket(args[0], 2, "[x A]")
                v = _atom(b, "dimension binder")
                env2 = env.with_path(v) if head.text == "path" else env.with_bridge(v)
                line = parse_term(ty, env2)
            else:
                raise _err(sx, f"'{head.text}' takes [x A] (or A) and two endpoints")
            cls = S.PathTy if head.text == "path" else S.BridgeTy
            return cls(v, line, parse_term(args[1], env), parse_term(args[2], env))
        case "Gel":
            arity(4)
            r = _bdim(args[0], env)
            a, b, rel = _bracket(args[3], 3, "[a b R]")
            an, bn = _atom(a, "variable"), _atom(b, "variable")
            return S.GelTy(r, parse_term(args[1], env), parse_term(args[2], env),
                           an, bn, parse_term(rel, env))
        case "gel":
            arity(4)
            return S.GelIntro(_bdim(args[0], env), parse_term(args[1], env),
                              parse_term(args[2], env), parse_term(args[3], env))
        case "ungel":
            arity(2)
            x, = _bracket(args[0], 1, "[x]")
            xn = _atom(x, "bridge dimension binder")
            return S.Ungel(xn, parse_term(args[1], env.with_bridge(xn)))
        case "extent":
            arity(5)
            r = _bdim(args[0], env)
            m = parse_term(args[1], env)
            a0, n = _bracket(args[2], 2, "[a N]")
            a0n = _atom(a0, "variable")
            a1, p = _bracket(args[3], 2, "[a' P]")
            a1n = _atom(a1, "variable")
            va, vb, vc, q = _bracket(args[4], 4, "[a a' c Q]")
            return S.Extent(
                r, m,
                a0n, parse_term(n, env),
                a1n, parse_term(p, env),
                _atom(va, "variable"), _atom(vb, "variable"), _atom(vc, "variable"),
                parse_term(q, env),
            )
        case "hcom" | "fcom":
            base = 4 if head.text == "hcom" else 3
            if len(args) < base:
                raise _err(sx, f"'{head.text}' is missing arguments")
            tubes = tuple(_tube(t, env) for t in args[base:])
            r, s = _pdim(args[base - 3], env), _pdim(args[base - 2], env)
            cap = parse_term(args[base - 1], env)
            if head.text == "hcom":
                return S.Hcom(parse_term(args[0], env), r, s, cap, tubes)
            return S.Fcom(r, s, cap, tubes)
        case "coe" | "com":
            if len(args) < 4:
                raise _err(sx, f"'{head.text}' is missing arguments")
            z, ty = _bracket(args[0], 2, "[z A]")
            zn = _atom(z, "path dimension binder")
            line = parse_term(ty, env.with_path(zn))
            r, s = _pdim(args[1], env), _pdim(args[2], env)
            m = parse_term(args[3], env)
            if head.text == "coe":
                arity(4)
                return S.Coe(zn, line, r, s, m)
            tubes = tuple(_tube(t, env) for t in args[4:])
            return S.Com(zn, line, r, s, m, tubes)
        case "vty":
            arity(4)
            return S.VTy(_pdim(args[0], env), parse_term(args[1], env),
                         parse_term(args[2], env), parse_term(args[3], env))
        case "vin":
            arity(3)
            return S.Vin(_pdim(args[0], env), parse_term(args[1], env), parse_term(args[2], env))
        case "vproj":
            arity(3)
            return S.Vproj(_pdim(args[0], env), parse_term(args[1], env), parse_term(args[2], env))
        case "if":
            arity(4)
            b, motive = _bracket(args[0], 2, "[b A]")
            bn = _atom(b, "variable")
            return S.If(bn, parse_term(motive, env), parse_term(args[1], env),
                        parse_term(args[2], env), parse_term(args[3], env))
        case "void-elim":
            arity(2)
            b, motive = _bracket(args[0], 2, "[b A]")
            bn = _atom(b, "variable")
            return S.VoidElim(bn, parse_term(motive, env), parse_term(args[1], env))
        case "the":
            arity(2)
            return S.Ann(parse_term(args[0], env), parse_term(args[1], env))
        case _:
            raise _err(sx, f"'{head.text}' cannot start a term")


# ---------------------------------------------------------------------------
# Declarations


@dataclass(frozen=True)
class Decl:
    kind: str  # def | eq | neq | normalize | claim
    name: str | None
    ty: Term | None
    lhs: Term | None
    rhs: Term | None
    line: int


def parse_decl(sx: Sexp) -> Decl:
    if not (isinstance(sx, SList) and not sx.bracket and sx.items
            and isinstance(sx.items[0], Atom)):
        raise _err(sx, "expected a declaration")
    head = sx.items[0].text
    args = sx.items[1:]
    match head:
        case "def":
            if len(args) != 3:
                raise _err(sx, "def takes a name, a type, and a term")
            name = _atom(args[0], "name")
            return Decl("def", name, parse_term(args[1]), parse_term(args[2]), None, sx.line)
        case "eq" | "neq":
            if len(args) != 3:
                raise _err(sx, f"{head} takes a type and two terms")
            return Decl(head, None, parse_term(args[0]), parse_term(args[1]),
                        parse_term(args[2]), sx.line)
        case "normalize":
            if len(args) != 2:
                raise _err(sx, "normalize takes a term and its expected value")
            return Decl("normalize", None, None, parse_term(args[0]), parse_term(args[1]), sx.line)
        case "claim":
            if len(args) != 2:
                raise _err(sx, "claim takes a name and a type")
            name = _atom(args[0], "name")
            return Decl("claim", name, parse_term(args[1]), None, None, sx.line)
        case _:
            raise _err(sx, f"unknown declaration '{head}'")


def parse_file_text(src: str) -> list[Decl]:
    return [parse_decl(sx) for sx in read_sexprs(src)]


# ---------------------------------------------------------------------------
# Printing


def print_dim(d: BridgeDim | PathDim) -> str:
    match d:
        case BVar(n) | PVar(n):
            return n
        case BConst(v) | PConst(v):
            return str(v)
    raise TypeError(d)


def _print_constraint(xi: Constraint) -> str:
    return f"(= {print_dim(xi.lhs)} {print_dim(xi.rhs)})"


def _print_tubes(tubes: TubeSystemLike) -> str:
    return "".join(
        f" (tube {_print_constraint(t.constraint)} [{t.var} {print_term(t.body)}])"
        for t in tubes
    )


TubeSystemLike = tuple


def print_term(t: Term) -> str:
    match t:
        case S.Var(n):
            return n
        case S.Univ():
            return "U"
        case S.Bool():
            return "bool"
        case S.TrueTm():
            return "true"
        case S.FalseTm():
            return "false"
        case S.Unit():
            return "unit"
        case S.Star():
            return "star"
        case S.Void():
            return "void"
        case S.Pi(v, dom, cod):
            return f"(pi [{v} {print_term(dom)}] {print_term(cod)})"
        case S.Lam(v, body):
            return f"(lam [{v}] {print_term(body)})"
        case S.App(fn, arg):
            return f"({print_term(fn)} {print_term(arg)})"
        case S.Sigma(v, dom, cod):
            return f"(sigma [{v} {print_term(dom)}] {print_term(cod)})"
        case S.Pair(a, b):
            return f"(pair {print_term(a)} {print_term(b)})"
        case S.Fst(a):
            return f"(fst {print_term(a)})"
        case S.Snd(a):
            return f"(snd {print_term(a)})"
        case S.PathTy(v, ty, l, r):
            return f"(path [{v} {print_term(ty)}] {print_term(l)} {print_term(r)})"
        case S.PLam(v, body):
            return f"(plam [{v}] {print_term(body)})"
        case S.PApp(fn, d):
            return f"(papp {print_term(fn)} {print_dim(d)})"
        case S.BridgeTy(v, ty, l, r):
            return f"(bridge [{v} {print_term(ty)}] {print_term(l)} {print_term(r)})"
        case S.BLam(v, body):
            return f"(blam [{v}] {print_term(body)})"
        case S.BApp(fn, d):
            return f"(bapp {print_term(fn)} {print_dim(d)})"
        case S.VTy(d, a, b, e):
            return f"(vty {print_dim(d)} {print_term(a)} {print_term(b)} {print_term(e)})"
        case S.Vin(d, a, b):
            return f"(vin {print_dim(d)} {print_term(a)} {print_term(b)})"
        case S.Vproj(d, a, f):
            return f"(vproj {print_dim(d)} {print_term(a)} {print_term(f)})"
        case S.GelTy(d, a, b, va, vb, rel):
            return (f"(Gel {print_dim(d)} {print_term(a)} {print_term(b)}"
                    f" [{va} {vb} {print_term(rel)}])")
        case S.GelIntro(d, m, n, p):
            return f"(gel {print_dim(d)} {print_term(m)} {print_term(n)} {print_term(p)})"
        case S.Ungel(v, body):
            return f"(ungel [{v}] {print_term(body)})"
        case S.Extent(d, m, v0, n, v1, p, va, vb, vc, q):
            return (f"(extent {print_dim(d)} {print_term(m)} [{v0} {print_term(n)}]"
                    f" [{v1} {print_term(p)}] [{va} {vb} {vc} {print_term(q)}])")
        case S.Hcom(ty, r, s, cap, tubes):
            return (f"(hcom {print_term(ty)} {print_dim(r)} {print_dim(s)}"
                    f" {print_term(cap)}{_print_tubes(tubes)})")
        case S.Coe(v, ty, r, s, arg):
            return (f"(coe [{v} {print_term(ty)}] {print_dim(r)} {print_dim(s)}"
                    f" {print_term(arg)})")
        case S.Com(v, ty, r, s, cap, tubes):
            return (f"(com [{v} {print_term(ty)}] {print_dim(r)} {print_dim(s)}"
                    f" {print_term(cap)}{_print_tubes(tubes)})")
        case S.Fcom(r, s, cap, tubes):
            return f"(fcom {print_dim(r)} {print_dim(s)} {print_term(cap)}{_print_tubes(tubes)})"
        case S.If(v, motive, scrut, a, b):
            return (f"(if [{v} {print_term(motive)}] {print_term(scrut)}"
                    f" {print_term(a)} {print_term(b)})")
        case S.VoidElim(v, motive, scrut):
            return f"(void-elim [{v} {print_term(motive)}] {print_term(scrut)})"
        case S.Ann(ty, tm):
            return f"(the {print_term(ty)} {print_term(tm)})"
    raise TypeError(f"unprintable term: {t!r}")
