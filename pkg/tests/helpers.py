"""Shared builders for categories used across the test suite."""

from finstoch.fincat import FiniteCategory, SetFunctor


def monoid_category(elements, op, unit):
    """One-object category whose morphisms are the given monoid elements."""
    compose = {(g, f): op(g, f) for g in elements for f in elements}
    return FiniteCategory(["*"], [(e, "*", "*") for e in elements], compose, {"*": unit})


def end2_category():
    """One object, the four endofunctions of a 2-element set."""
    tables = {
        "id": {0: 0, 1: 1},
        "c0": {0: 0, 1: 0},
        "c1": {0: 1, 1: 1},
        "swap": {0: 1, 1: 0},
    }

    def op(g, f):
        composite = {x: tables[g][tables[f][x]] for x in (0, 1)}
        return next(n for n, t in tables.items() if t == composite)

    cat = monoid_category(list(tables), op, "id")
    incl = SetFunctor(cat, {"*": (0, 1)}, {n: dict(t) for n, t in tables.items()})
    return cat, incl


def discrete_category(objects):
    morphisms = [(f"id_{x}", x, x) for x in objects]
    compose = {(f"id_{x}", f"id_{x}"): f"id_{x}" for x in objects}
    return FiniteCategory(objects, morphisms, compose, {x: f"id_{x}" for x in objects})


def finite_sets_category(sizes):
    """Full subcategory of finite sets on canonical carriers of the given sizes.

    Object name "n" carries elements 0..n-1; morphism names encode the
    graph of the function.
    """
    objects = [str(n) for n in sizes]
    carriers = {str(n): tuple(range(n)) for n in sizes}
    morphisms = []
    tables = {}
    for a in sizes:
        for b in sizes:
            src = carriers[str(a)]
            dst = carriers[str(b)]
            for images in _functions(src, dst):
                name = f"f{a}>{b}:" + "".join(str(images[x]) for x in src)
                morphisms.append((name, str(a), str(b)))
                tables[name] = dict(images)
    compose = {}
    for g, gs, gd in morphisms:
        for f, fs, fd in morphisms:
            if fd != gs:
                continue
            composite = {x: tables[g][tables[f][x]] for x in carriers[fs]}
            name = f"f{fs}>{gd}:" + "".join(
                str(composite[x]) for x in carriers[fs]
            )
            compose[(g, f)] = name
    identities = {
        str(n): f"f{n}>{n}:" + "".join(str(x) for x in carriers[str(n)])
        for n in sizes
    }
    cat = FiniteCategory(objects, morphisms, compose, identities)
    incl = SetFunctor(cat, carriers, tables)
    return cat, incl


def _functions(src, dst):
    from itertools import product

    for images in product(dst, repeat=len(src)):
        yield dict(zip(src, images))
