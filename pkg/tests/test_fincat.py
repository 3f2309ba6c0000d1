"""Category validation, comma categories, limits, natural transformations."""

import pytest

from finstoch.fincat import (
    FiniteCategory,
    FiniteDiagram,
    SetFunctor,
    comma_category,
    limit_of_diagram,
    nat_set,
    representable,
    validate_category,
)

from helpers import discrete_category, end2_category, finite_sets_category


def test_end2_is_valid():
    cat, _ = end2_category()
    assert validate_category(cat) == []


def test_discrete_category_on_three_objects_is_valid():
    cat = discrete_category(["a", "b", "c"])
    assert validate_category(cat) == []


def test_broken_composite_is_named_in_report():
    # g after f points at a morphism with the wrong source
    cat = FiniteCategory(
        ["x", "y"],
        [("ix", "x", "x"), ("iy", "y", "y"), ("f", "x", "y"), ("g", "y", "x")],
        {
            ("ix", "ix"): "ix",
            ("iy", "iy"): "iy",
            ("f", "ix"): "f",
            ("iy", "f"): "f",
            ("g", "iy"): "g",
            ("ix", "g"): "g",
            ("g", "f"): "f",  # should be an endomorphism of x
            ("f", "g"): "iy",
        },
        {"x": "ix", "y": "iy"},
    )
    report = validate_category(cat)
    assert any("(g,f)" in r.replace(" ", "") for r in report)


def test_functor_validation_catches_composition_failure():
    cat, incl = end2_category()
    bad = SetFunctor(
        cat,
        dict(incl.on_objects),
        {**incl.on_morphisms, "swap": {0: 0, 1: 1}},  # no longer matches table
    )
    assert bad.validate()


def test_comma_category_of_end2_at_two_points():
    cat, incl = end2_category()
    comma = comma_category(("a", "b"), incl)
    assert comma.size() == 4  # the four functions 2 -> 2
    assert validate_category(comma.category) == []
    # morphisms: one per (base endomap, source object)
    assert len(comma.category.morphisms) == 16


def test_comma_category_on_empty_carrier():
    cat, incl = finite_sets_category([1, 2])
    comma = comma_category((), incl)
    assert comma.size() == len(cat.objects)


def test_comma_category_discrete_base_singleton_carrier():
    cat = discrete_category(["*"])
    k = SetFunctor(cat, {"*": ("u", "v")}, {"id_*": {"u": "u", "v": "v"}})
    comma = comma_category(("p",), k)
    assert comma.size() == 2
    assert len(comma.category.non_identity_morphisms()) == 0


def test_limit_of_discrete_diagram_is_product():
    shape = discrete_category(["a", "b"])
    value = SetFunctor(
        shape,
        {"a": (0, 1), "b": ("x", "y", "z")},
        {"id_a": {0: 0, 1: 1}, "id_b": {"x": "x", "y": "y", "z": "z"}},
    )
    lim = limit_of_diagram(FiniteDiagram(shape, value))
    assert len(lim) == 6


def test_limit_equalizer_of_parallel_pair():
    shape = FiniteCategory(
        ["s", "t"],
        [("is", "s", "s"), ("it", "t", "t"), ("f", "s", "t"), ("g", "s", "t")],
        {
            ("is", "is"): "is",
            ("it", "it"): "it",
            ("f", "is"): "f",
            ("it", "f"): "f",
            ("g", "is"): "g",
            ("it", "g"): "g",
        },
        {"s": "is", "t": "it"},
    )
    value = SetFunctor(
        shape,
        {"s": ("a", "b"), "t": ("x", "y")},
        {
            "is": {"a": "a", "b": "b"},
            "it": {"x": "x", "y": "y"},
            "f": {"a": "x", "b": "y"},
            "g": {"a": "x", "b": "x"},
        },
    )
    lim = limit_of_diagram(value)
    assert len(lim) == 1
    assert lim.project(lim.families[0], "s") == "a"


def test_limit_of_empty_shape_is_singleton():
    shape = discrete_category([])
    value = SetFunctor(shape, {}, {})
    lim = limit_of_diagram(value)
    assert len(lim) == 1
    assert lim.families[0] == ()


def test_limit_agrees_with_brute_force_filtration():
    from itertools import product as iproduct

    cat, incl = end2_category()
    comma = comma_category(("a", "b", "c"), incl)
    domains = {oid: incl.obj(comma.project(oid)) for oid in comma.objects}
    arrows = [
        (m.src, m.dst, incl.map(comma.base_morphism(mid)))
        for mid, m in comma.category.morphisms.items()
    ]
    objs = list(comma.objects)
    brute = []
    for assignment in iproduct(*(domains[o] for o in objs)):
        fam = dict(zip(objs, assignment))
        if all(table[fam[s]] == fam[t] for s, t, table in arrows):
            brute.append(assignment)
    from finstoch.fincat import comma_diagram_limit

    lim = comma_diagram_limit(comma)
    assert sorted(lim.families) == sorted(brute)


def test_nat_set_yoneda_bijection():
    cat, incl = end2_category()
    rep = representable(cat, "*")
    for g in (incl, rep):
        transformations = nat_set(rep, g)
        assert len(transformations) == len(g.obj("*"))


def test_nat_set_constant_functors_on_trivial_domain():
    cat = discrete_category(["*"])
    one = SetFunctor(cat, {"*": ("u",)}, {"id_*": {"u": "u"}})
    two = SetFunctor(cat, {"*": ("x", "y")}, {"id_*": {"x": "x", "y": "y"}})
    assert len(nat_set(one, two)) == 2
    assert len(nat_set(two, one)) == 1


def test_comma_limit_invariant_under_renaming():
    cat, incl = end2_category()
    renamed = FiniteCategory(
        ["obj"],
        [(m.name, "obj", "obj") for m in cat.morphisms.values()],
        cat.compose,
        {"obj": "id"},
    )
    renamed_incl = SetFunctor(renamed, {"obj": (0, 1)}, incl.on_morphisms)
    from finstoch.fincat import comma_diagram_limit

    lim1 = comma_diagram_limit(comma_category(("a", "b"), incl))
    lim2 = comma_diagram_limit(comma_category(("a", "b"), renamed_incl))
    assert len(lim1) == len(lim2)
    assert sorted(lim1.families) == sorted(lim2.families)


def test_limit_budget_raises_resource_error():
    from finstoch.errors import ResourceError

    cat = discrete_category(["*"])
    k = SetFunctor(cat, {"*": tuple(range(6))}, {"id_*": {i: i for i in range(6)}})
    comma = comma_category(tuple("abcd"), k)
    from finstoch.fincat import comma_diagram_limit

    with pytest.raises(ResourceError):
        comma_diagram_limit(comma, max_steps=100)
