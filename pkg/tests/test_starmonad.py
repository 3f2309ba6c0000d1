"""List-monad structure of polymeasure spaces and the Kleisli axioms."""

from fractions import Fraction

import pytest

from finstoch.errors import SpecError
from finstoch.polymeasure import Polymeasure, extend_to_measure, product_polymeasure
from finstoch.starmonad import (
    DiscreteOuterPolymeasure,
    I_CARRIER,
    PolyKernelMorphism,
    StarLawConfig,
    discard_morphism,
    identity_polykernel,
    kappa_strength,
    nu_weaken,
    polykernel_compose,
    polykernel_tensor,
    star_law_suite,
    star_mult,
    star_unit,
)

F = Fraction
X2 = ("a", "b")
Y2 = ("x", "y")


def test_star_unit_shapes():
    u = star_unit(("a", "y"), (X2, Y2))
    assert u.density == {("a", "y"): F(1)}
    assert star_unit((), ()).value(()) == 1
    one = star_unit(("a",), (X2,))
    assert extend_to_measure(one).weight("a") == 1
    with pytest.raises(SpecError):
        star_unit(("z",), (X2,))


def test_star_mult_point_mass_is_product():
    p = Polymeasure((X2,), {("a",): F(1, 3), ("b",): F(2, 3)})
    q = Polymeasure((Y2,), {("x",): F(1, 2), ("y",): F(1, 2)})
    outer = DiscreteOuterPolymeasure(((X2,), (Y2,)), {(p, q): F(1)})
    assert star_mult(outer) == product_polymeasure([p, q])


def test_star_mult_convex_combination():
    da = star_unit(("a",), (X2,))
    db = star_unit(("b",), (X2,))
    outer = DiscreteOuterPolymeasure(
        ((X2,),), {(da,): F(1, 2), (db,): F(1, 2)}
    )
    out = star_mult(outer)
    assert out.density == {("a",): F(1, 2), ("b",): F(1, 2)}


def test_star_mult_nullary():
    outer = DiscreteOuterPolymeasure((), {(): F(1)})
    assert star_mult(outer) == Polymeasure((), {(): F(1)})


def test_kappa_strength_cases():
    dx = star_unit(("a",), (X2,))
    dy = star_unit(("y",), (Y2,))
    assert kappa_strength((dx, dy)) == star_unit(("a", "y"), (X2, Y2))
    u2 = Polymeasure((X2,), {("a",): F(1, 2), ("b",): F(1, 2)})
    paired = kappa_strength((u2, u2))
    assert all(v == F(1, 4) for v in paired.density.values())
    gamma = Polymeasure((X2, Y2), {("a", "x"): F(1, 2), ("b", "y"): F(1, 2)})
    assert kappa_strength((gamma,)) == gamma


def test_nu_weaken_splits_joint_distribution():
    pairs = tuple((x, y) for x in X2 for y in Y2)
    gamma = Polymeasure((pairs,), {(("a", "x"),): F(1, 4), (("b", "y"),): F(3, 4)})
    bimeasure = nu_weaken(gamma, ((X2, Y2),))
    assert bimeasure.carriers == (X2, Y2)
    assert bimeasure.value((("a",), ("x",))) == F(1, 4)
    assert bimeasure.value((X2, Y2)) == 1


def test_nu_weaken_dirac():
    pairs = tuple((x, y) for x in X2 for y in Y2)
    gamma = star_unit(((("a", "x")),), (pairs,))
    assert nu_weaken(gamma, ((X2, Y2),)) == star_unit(("a", "x"), (X2, Y2))


def test_weaken_then_extend_round_trip():
    from finstoch.finprob import Distribution, grid_distributions

    pairs = tuple((x, y) for x in X2 for y in Y2)
    for dist in grid_distributions(pairs, 3):
        gamma = Polymeasure((pairs,), {(t,): v for t, v in dist.weights.items()})
        bim = nu_weaken(gamma, ((X2, Y2),))
        assert extend_to_measure(bim) == dist


def test_identity_and_compose_unit_laws():
    f = PolyKernelMorphism(
        ("p", "q"),
        (X2, Y2),
        {
            "p": Polymeasure((X2, Y2), {("a", "x"): F(1, 2), ("b", "x"): F(1, 2)}),
            "q": star_unit(("b", "y"), (X2, Y2)),
        },
    )
    assert polykernel_compose([identity_polykernel(X2), identity_polykernel(Y2)], f) == f
    assert polykernel_compose([f], identity_polykernel(("p", "q"))) == f


def test_compose_dirac_rows_give_products():
    f = PolyKernelMorphism(
        ("p",), (X2, Y2), {"p": star_unit(("a", "x"), (X2, Y2))}
    )
    g1 = PolyKernelMorphism(
        X2, ((0, 1),),
        {
            "a": Polymeasure(((0, 1),), {(0,): F(1, 2), (1,): F(1, 2)}),
            "b": star_unit((1,), ((0, 1),)),
        },
    )
    g2 = identity_polykernel(Y2)
    out = polykernel_compose([g1, g2], f)
    assert out.row("p") == product_polymeasure([g1.row("a"), g2.row("x")])


def test_compose_numeric_double_sum():
    half = F(1, 2)
    f = PolyKernelMorphism(
        ("p",),
        (X2,),
        {"p": Polymeasure((X2,), {("a",): half, ("b",): half})},
    )
    g = PolyKernelMorphism(
        X2,
        (Y2,),
        {
            "a": Polymeasure((Y2,), {("x",): half, ("y",): half}),
            "b": Polymeasure((Y2,), {("y",): F(1)}),
        },
    )
    out = polykernel_compose([g], f)
    assert out.row("p").density == {("x",): F(1, 4), ("y",): F(3, 4)}


def test_tensor_with_discard_and_diracs():
    f = identity_polykernel(X2)
    d = discard_morphism()
    fd = polykernel_tensor(f, d)
    assert fd.codomain == f.codomain
    assert fd.row(("a", ())) == f.row("a")
    dd = polykernel_tensor(
        PolyKernelMorphism(("p",), (X2,), {"p": star_unit(("a",), (X2,))}),
        PolyKernelMorphism(("q",), (Y2,), {"q": star_unit(("y",), (Y2,))}),
    )
    assert dd.row(("p", "q")) == star_unit(("a", "y"), (X2, Y2))


def test_tensor_numeric_product_table():
    u = Polymeasure((X2,), {("a",): F(1, 2), ("b",): F(1, 2)})
    v = Polymeasure((Y2,), {("x",): F(1, 4), ("y",): F(3, 4)})
    f = PolyKernelMorphism(("p",), (X2,), {"p": u})
    g = PolyKernelMorphism(("q",), (Y2,), {"q": v})
    out = polykernel_tensor(f, g)
    assert out.row(("p", "q")).density[("a", "y")] == F(3, 8)


def test_star_law_suite_passes():
    config = StarLawConfig(seed=7, draws=25, grid=4, max_carrier=3, max_arity=3)
    report = star_law_suite(config)
    assert report.ok(), report.failures()[:3]


def test_star_law_suite_degenerate_battery():
    report = star_law_suite(StarLawConfig(seed=1, draws=0))
    names = {c.name for c in report.checks}
    assert {"nullary-mult", "singleton-left-unit", "discard-tensor",
            "nullary-compose"} <= names
    assert report.ok()


def test_unnormalized_mutant_fails_associativity_with_witness():
    config = StarLawConfig(seed=7, draws=25, unweighted_mult=True)
    report = star_law_suite(config)
    assoc = [
        c for c in report.checks if c.name == "associativity" and not c.ok
    ]
    assert assoc, "mutant multiplication should fail associativity"
    assert assoc[0].witness is not None
