"""One golden test per reduction rule of the four operational-semantics
figures: the generic Kan rules, bridge types, extent, and gel types.  Each
test feeds one input term to `step` and alpha-compares the one-step reduct
against a hand-built expectation."""

from ptt.dims import B0, B1, BridgeEq, BVar, P0, P1, PathEq, PVar
from ptt.opsem import VALUE, Stepped, isval, step
from ptt.syntax import (
    App, BApp, BLam, Bool, BridgeTy, Coe, Com, Extent, Fst, GelIntro, GelTy,
    Hcom, Lam, PApp, Pair, PLam, Star, TrueTm, Tube, Ungel, Unit, Var,
    alpha_equal,
)


def stepped(t):
    r = step(t)
    assert isinstance(r, Stepped), r
    return r.term


def assert_steps_to(t, expected):
    assert alpha_equal(stepped(t), expected)


LINE = PApp(Var("X"), PVar("z"))  # a type line in z, kept neutral


class TestGenericKan:
    """The three non-type-specific rules."""

    def test_coe_steps_its_type(self):
        ty = Fst(Pair(Bool(), Unit()))
        t = Coe("z", ty, P0, P1, Var("m"))
        assert_steps_to(t, Coe("z", Bool(), P0, P1, Var("m")))

    def test_hcom_steps_its_type(self):
        ty = Fst(Pair(Bool(), Unit()))
        t = Hcom(ty, P0, P1, Var("m"), ())
        assert_steps_to(t, Hcom(Bool(), P0, P1, Var("m"), ()))

    def test_com_expands_to_hcom_of_coe(self):
        tube = Tube(PathEq(PVar("w"), P0), "y", PApp(Var("n"), PVar("y")))
        t = Com("z", LINE, P0, P1, Var("m"), (tube,))
        expected = Hcom(
            PApp(Var("X"), P1), P0, P1,
            Coe("z", LINE, P0, P1, Var("m")),
            (Tube(PathEq(PVar("w"), P0), "y",
                  Coe("z", LINE, PVar("y"), P1, PApp(Var("n"), PVar("y")))),),
        )
        assert_steps_to(t, expected)


BRIDGE = BridgeTy("x", BApp(Var("A"), BVar("x")), Var("m0"), Var("m1"))


class TestBridgeFigure:
    def test_bridge_type_is_value(self):
        assert isval(BRIDGE) and step(BRIDGE) is VALUE

    def test_bridge_lambda_is_value(self):
        t = BLam("x", Var("m"))
        assert isval(t) and step(t) is VALUE

    def test_application_steps_its_head(self):
        t = BApp(Fst(Pair(Var("q"), Var("r"))), B0)
        assert_steps_to(t, BApp(Var("q"), B0))

    def test_beta_substitutes_the_dimension(self):
        t = BApp(BLam("x", BApp(Var("q"), BVar("x"))), BVar("y"))
        assert_steps_to(t, BApp(Var("q"), BVar("y")))

    def test_hcom_in_bridge(self):
        tube = Tube(PathEq(PVar("w"), P0), "y", Var("n"))
        t = Hcom(BRIDGE, P0, P1, Var("m"), (tube,))
        expected = BLam("x", Hcom(
            BApp(Var("A"), BVar("x")), P0, P1,
            BApp(Var("m"), BVar("x")),
            (Tube(PathEq(PVar("w"), P0), "y", BApp(Var("n"), BVar("x"))),
             Tube(BridgeEq(BVar("x"), B0), "_", Var("m0")),
             Tube(BridgeEq(BVar("x"), B1), "_", Var("m1"))),
        ))
        assert_steps_to(t, expected)

    def test_coe_in_bridge(self):
        line = BridgeTy("x", BApp(Var("A"), BVar("x")),
                        PApp(Var("m0"), PVar("z")), PApp(Var("m1"), PVar("z")))
        t = Coe("z", line, P0, P1, Var("q"))
        expected = BLam("x", Com(
            "z", BApp(Var("A"), BVar("x")), P0, P1,
            BApp(Var("q"), BVar("x")),
            (Tube(BridgeEq(BVar("x"), B0), "z", PApp(Var("m0"), PVar("z"))),
             Tube(BridgeEq(BVar("x"), B1), "z", PApp(Var("m1"), PVar("z")))),
        ))
        assert_steps_to(t, expected)


def make_extent(dim, arg):
    return Extent(dim, arg,
                  "a", App(Var("n"), Var("a")),
                  "a1", App(Var("p"), Var("a1")),
                  "a", "a1", "c", App(Var("q"), Var("c")))


class TestExtentFigure:
    def test_left_endpoint(self):
        assert_steps_to(make_extent(B0, Var("m")), App(Var("n"), Var("m")))

    def test_right_endpoint(self):
        assert_steps_to(make_extent(B1, Var("m")), App(Var("p"), Var("m")))

    def test_variable_captures_the_dimension(self):
        arg = BApp(Var("m"), BVar("x"))
        t = make_extent(BVar("x"), arg)
        # the abstraction blam x.arg deliberately captures x
        expected = BApp(
            App(Var("q"), BLam("x", BApp(Var("m"), BVar("x")))), BVar("x"))
        got = stepped(t)
        assert alpha_equal(got, expected)
        # capture really happened: the reduct has no other occurrence of m@x
        # outside the abstraction
        assert got == expected  # names preserved exactly: no renaming of x


GEL = GelTy(BVar("x"), Var("A"), Var("B"), "a", "b",
            App(App(Var("R"), Var("a")), Var("b")))


class TestGelFigure:
    def test_gel_type_left_endpoint(self):
        t = GelTy(B0, Bool(), Unit(), "a", "b", Var("R"))
        assert_steps_to(t, Bool())

    def test_gel_type_right_endpoint(self):
        t = GelTy(B1, Bool(), Unit(), "a", "b", Var("R"))
        assert_steps_to(t, Unit())

    def test_gel_type_value_at_variable(self):
        assert isval(GEL) and step(GEL) is VALUE

    def test_gel_intro_left_endpoint(self):
        assert_steps_to(GelIntro(B0, Var("m"), Var("n"), Var("p")), Var("m"))

    def test_gel_intro_right_endpoint(self):
        assert_steps_to(GelIntro(B1, Var("m"), Var("n"), Var("p")), Var("n"))

    def test_gel_intro_value_at_variable(self):
        t = GelIntro(BVar("x"), Var("m"), Var("n"), Var("p"))
        assert isval(t) and step(t) is VALUE

    def test_ungel_steps_under_its_binder(self):
        t = Ungel("x", Fst(Pair(Var("m"), Var("n"))))
        assert_steps_to(t, Ungel("x", Var("m")))

    def test_ungel_beta(self):
        t = Ungel("x", GelIntro(BVar("x"), Var("m"), Var("n"), Var("p")))
        assert_steps_to(t, Var("p"))

    def test_ungel_beta_erases_the_dimension(self):
        # the endpoint substitution in the reduct keeps the step
        # context-preserving even on (ill-typed) dimension-using witnesses
        t = Ungel("x", GelIntro(BVar("x"), Var("m"), Var("n"),
                                BApp(Var("p"), BVar("x"))))
        assert_steps_to(t, BApp(Var("p"), B0))

    def test_hcom_in_gel(self):
        cap = Var("o")
        keep = Tube(PathEq(PVar("w"), P0), "y", Var("n"))
        drop = Tube(BridgeEq(BVar("x"), B0), "y", Var("k"))
        t = Hcom(GEL, P0, P1, cap, (keep, drop))

        def side(endpoint, ty, dst):
            return Hcom(ty, P0, dst, cap,
                        (Tube(PathEq(PVar("w"), P0), "y", Var("n")),
                         Tube(BridgeEq(endpoint, B0), "y", Var("k"))))

        rel = App(App(Var("R"), side(B0, Var("A"), PVar("yy"))),
                  side(B1, Var("B"), PVar("yy")))
        expected = GelIntro(
            BVar("x"),
            side(B0, Var("A"), P1),
            side(B1, Var("B"), P1),
            Com("yy", rel, P0, P1, Ungel("x", cap),
                (Tube(PathEq(PVar("w"), P0), "y", Ungel("x", Var("n"))),)),
        )
        assert_steps_to(t, expected)

    def test_coe_in_gel(self):
        gel_line = GelTy(BVar("x"), PApp(Var("A"), PVar("z")),
                         PApp(Var("B"), PVar("z")), "a", "b",
                         App(App(PApp(Var("R"), PVar("z")), Var("a")), Var("b")))
        t = Coe("z", gel_line, P0, P1, Var("o"))

        def side(ty, dst):
            return Coe("z", PApp(ty, PVar("z")), P0, dst, Var("o"))

        rel = App(App(PApp(Var("R"), PVar("yy")),
                      side(Var("A"), PVar("yy"))), side(Var("B"), PVar("yy")))
        expected = GelIntro(
            BVar("x"),
            side(Var("A"), P1),
            side(Var("B"), P1),
            Coe("yy", rel, P0, P1, Ungel("x", Var("o"))),
        )
        assert_steps_to(t, expected)
