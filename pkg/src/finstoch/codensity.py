"""Codensity monads of finite set-valued functors, computed as limits.

For a functor K from a finite base category into finite sets, T(A) is the
limit of the evaluation diagram over the comma category (A under K).  The
unit, multiplication and functorial action are all pinned down by their
evaluation equations:

    ev_h(eta(x)) = h(x)
    ev_h(mu(Xi)) = ev over the function (ev_h) applied to Xi
    ev_h(T(f)(t)) = ev_{h after f}(t)

T(T(A)) grows violently, so every construction runs behind a hard size
budget and fails with a dedicated resource error, never out-of-memory.
"""

from dataclasses import dataclass, field
from typing import Optional

from .errors import ResourceError, SpecError
from .fincat import (
    DEFAULT_MAX_STEPS,
    comma_category,
    comma_diagram_limit,
    comma_object_count,
)

__all__ = [
    "CodensityInstance",
    "CodensityObject",
    "ConeData",
    "codensity_object",
    "codensity_unit_mult",
    "codensity_map",
    "factor_through_limit",
    "affine_check",
    "subprob_lift_check",
    "AffineReport",
    "SubprobLiftReport",
]

DEFAULT_MAX_COMMA_OBJECTS = 50_000


@dataclass
class CodensityInstance:
    """A finite base category with a set-valued functor, plus designations.

    ``terminal`` names the terminal object of the base when one is
    designated; ``coproduct_with_1`` maps an object X to a triple
    ``(name of 1+X, iota1, iota2)``.  Both are optional preset data, used
    by the affineness and subprobability checks.
    """

    base: object
    k: object
    terminal: Optional[str] = None
    coproduct_with_1: dict = field(default_factory=dict)
    max_comma_objects: int = DEFAULT_MAX_COMMA_OBJECTS
    max_steps: int = DEFAULT_MAX_STEPS
    name: str = ""
    _cache: dict = field(default_factory=dict, repr=False)

    def budget_check(self, carrier):
        count = comma_object_count(carrier, self.k)
        if count > self.max_comma_objects:
            raise ResourceError(
                f"comma category at carrier of size {len(tuple(carrier))} "
                f"would have {count} objects (budget {self.max_comma_objects})",
                cardinality=count,
            )


class CodensityObject:
    """T(A) together with its limit cone.

    Elements are tuples aligned with the comma-object order; ``ev`` reads
    off the coordinate of a comma object, which is exactly the limit
    projection into K(X) for that object (X, h).
    """

    def __init__(self, carrier, comma, limit):
        self.carrier = tuple(carrier)
        self.comma = comma
        self.limit = limit
        self.elements = limit.families

    def ev(self, comma_obj_id, element):
        return self.limit.project(element, comma_obj_id)

    def ev_at(self, x, h, element):
        """Evaluation at the comma object (x, h) with h given as a dict."""
        h_tuple = tuple(h[a] for a in self.comma.carrier)
        return self.ev(self.comma.obj_id(x, h_tuple), element)

    def comma_objects(self):
        return self.comma.objects

    def __len__(self):
        return len(self.elements)

    def __repr__(self):
        return f"CodensityObject(|carrier|={len(self.carrier)}, |T|={len(self.elements)})"


def codensity_object(inst, carrier):
    """Compute T(carrier) as the limit over the comma category; cached."""
    key = tuple(carrier)
    hit = inst._cache.get(key)
    if hit is not None:
        return hit
    inst.budget_check(key)
    comma = comma_category(
        key, inst.k, with_composition=False, max_objects=inst.max_comma_objects
    )
    limit = comma_diagram_limit(comma, max_steps=inst.max_steps)
    result = CodensityObject(key, comma, limit)
    inst._cache[key] = result
    return result


def _family_satisfies_constraints(obj, family_by_oid):
    """Re-check the comma naturality constraints for an explicit family."""
    comma = obj.comma
    k = comma.functor
    base = k.category
    for mid, m in comma.category.morphisms.items():
        name = comma.base_morphism(mid)
        if name == base.identity(base.source(name)):
            continue
        if k.map(name)[family_by_oid[m.src]] != family_by_oid[m.dst]:
            return False
    return True


def codensity_unit_mult(inst, carrier):
    """The unit and multiplication at a carrier, as explicit tables.

    eta maps each carrier point x to the family h |-> h(x).  mu maps each
    element of T(T(carrier)) to the family whose coordinate at (X, h) is
    the coordinate of the input at (X, ev_h); both are verified against
    their defining equations before being returned.
    """
    obj = codensity_object(inst, carrier)
    comma = obj.comma
    eta = {}
    for x in obj.carrier:
        family = []
        for oid in comma.objects:
            _, h = comma.obj_pair(oid)
            family.append(h[obj.carrier.index(x)])
        candidate = tuple(family)
        if candidate not in set(obj.elements):
            raise SpecError(f"unit image at {x!r} violates the cone constraints")
        eta[x] = candidate

    double = codensity_object(inst, obj.elements)
    mu = {}
    index_of = {oid: i for i, oid in enumerate(comma.objects)}
    for xi in double.elements:
        family = []
        for oid in comma.objects:
            x, _h = comma.obj_pair(oid)
            i = index_of[oid]
            ev_h = tuple(t[i] for t in double.carrier)
            family.append(double.ev(double.comma.obj_id(x, ev_h), xi))
        candidate = tuple(family)
        by_oid = dict(zip(comma.objects, candidate))
        if not _family_satisfies_constraints(obj, by_oid):
            raise SpecError("multiplication image violates the cone constraints")
        mu[xi] = candidate

    # defining equations, re-checked explicitly
    for x in obj.carrier:
        for oid in comma.objects:
            _, h = comma.obj_pair(oid)
            assert obj.ev(oid, eta[x]) == h[obj.carrier.index(x)]
    for xi, out in mu.items():
        for oid in comma.objects:
            x, _h = comma.obj_pair(oid)
            i = index_of[oid]
            ev_h = tuple(t[i] for t in double.carrier)
            assert obj.ev(oid, out) == double.ev(double.comma.obj_id(x, ev_h), xi)
    return eta, mu


def codensity_map(inst, f, source_carrier, target_carrier):
    """T on a function between carriers: ev_h(Tf t) = ev_{h after f}(t)."""
    src_obj = codensity_object(inst, source_carrier)
    dst_obj = codensity_object(inst, target_carrier)
    table = {}
    for t in src_obj.elements:
        family = []
        for oid in dst_obj.comma.objects:
            x, h = dst_obj.comma.obj_pair(oid)
            h_dict = dict(zip(dst_obj.carrier, h))
            pulled = tuple(h_dict[f[a]] for a in src_obj.carrier)
            family.append(src_obj.ev(src_obj.comma.obj_id(x, pulled), t))
        table[t] = tuple(family)
    return table


@dataclass
class ConeData:
    """A cone over the evaluation diagram: one leg per comma object.

    ``legs`` maps a comma object id to a dict apex -> K(X) value.
    """

    apex: tuple
    legs: dict


def factor_through_limit(inst, carrier, cone):
    """Factor a cone through T(carrier); returns the unique mediating map.

    Raises on a violated cone condition (naming the failing square) and on
    a missing factorization, which cannot happen for a true limit and
    guards cache corruption.  Uniqueness is asserted by exhaustive
    comparison against every other element.
    """
    obj = codensity_object(inst, carrier)
    comma = obj.comma
    base = inst.k.category
    apex = tuple(cone.apex)
    for mid, m in comma.category.morphisms.items():
        name = comma.base_morphism(mid)
        if name == base.identity(base.source(name)):
            continue
        table = inst.k.map(name)
        src_leg = cone.legs[m.src]
        dst_leg = cone.legs[m.dst]
        for c in apex:
            if table[src_leg[c]] != dst_leg[c]:
                raise SpecError(
                    f"cone condition fails on square {mid} "
                    f"({m.src} -> {m.dst}) at apex point {c!r}"
                )
    element_set = set(obj.elements)
    mediating = {}
    for c in apex:
        family = tuple(cone.legs[oid][c] for oid in comma.objects)
        if family not in element_set:
            raise ResourceError(
                "no factorization exists; limit cache may be corrupted"
            )
        others = [
            t for t in obj.elements if t == family
        ]
        assert others == [family], "factorization is not unique"
        mediating[c] = family
    return mediating


def limit_cone_of(obj):
    """The limit cone of T(carrier) itself, as ConeData."""
    legs = {
        oid: {t: obj.ev(oid, t) for t in obj.elements}
        for oid in obj.comma.objects
    }
    return ConeData(apex=obj.elements, legs=legs)


@dataclass
class AffineReport:
    terminal: str
    point_of_k1: object
    unique_point_condition: bool
    k1_is_singleton: bool
    eta_at_1_bijective: Optional[bool]
    failures: list

    def ok(self):
        return (
            self.k1_is_singleton
            and self.unique_point_condition
            and bool(self.eta_at_1_bijective)
        )


def affine_check(inst):
    """Check the two affineness conditions and the unit at a point.

    (i) K sends the designated terminal object to a one-element set;
    (ii) for every object X, morphisms out of the terminal object
    correspond bijectively to elements of K(X).  When both hold, the unit
    at a one-element carrier is additionally verified to be a bijection.
    """
    if inst.terminal is None:
        raise SpecError("no terminal object designated for this instance")
    term = inst.terminal
    failures = []
    k1 = inst.k.obj(term)
    singleton = len(k1) == 1
    if not singleton:
        failures.append(f"K({term}) has {len(k1)} elements, expected 1")
    point = k1[0] if k1 else None
    unique = True
    for x in inst.base.objects:
        arrows = inst.base.hom(term, x)
        images = {}
        for a in arrows:
            if point is not None:
                images.setdefault(inst.k.map(a)[point], []).append(a)
        elements = inst.k.obj(x)
        for e in elements:
            hits = images.get(e, [])
            if len(hits) != 1:
                unique = False
                failures.append(
                    f"object {x}: element {e!r} of K({x}) is hit by "
                    f"{len(hits)} points ({len(arrows)} morphisms from {term}, "
                    f"{len(elements)} elements)"
                )
    eta_bij = None
    if singleton and unique:
        one = ("<pt>",)
        eta, _mu = codensity_unit_mult(inst, one)
        obj = codensity_object(inst, one)
        eta_bij = len(obj.elements) == 1 and set(eta.values()) == set(obj.elements)
        if not eta_bij:
            failures.append(
                f"unit at the one-element carrier is not bijective: "
                f"|T(1)| = {len(obj.elements)}"
            )
    return AffineReport(term, point, unique, singleton, eta_bij, failures)


@dataclass
class SubprobLiftReport:
    carrier: tuple
    cone_is_natural: bool
    comparison_bijective: bool
    reconstruction_consistent: bool
    lhs_size: int
    rhs_size: int
    failures: list

    def ok(self):
        return (
            self.cone_is_natural
            and self.comparison_bijective
            and self.reconstruction_consistent
        )


def _find_unique_morphism(base, k, src, dst, equations):
    """The unique base morphism src -> dst whose K-image satisfies the
    given pointwise equations; equations is a list of (input, output)."""
    hits = []
    for name in base.hom(src, dst):
        table = k.map(name)
        if all(table[i] == o for i, o in equations):
            hits.append(name)
    if len(hits) != 1:
        raise SpecError(
            f"expected exactly one morphism {src} -> {dst} matching "
            f"{len(equations)} equations, found {len(hits)}"
        )
    return hits[0]


class _Bottom:
    """The added error point of a subprobability carrier."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "<bot>"


BOTTOM = _Bottom()


def subprob_lift_check(inst, carrier):
    """Verify that T(1 + carrier) is the limit of the error-extended diagram.

    The modified diagram is indexed by the comma objects (X, h) of the
    plain carrier whose base object has a designated coproduct 1+X; its
    value there is K(1+X), and the legs evaluate T(1+carrier) at the
    extended function sending the error point through iota1 and the rest
    through iota2 after h.  The check verifies the cone condition, that
    the induced comparison into the limit is a bijection (the universal
    property at finite scale), and that the factorization reconstructed
    pointwise from a cone agrees with the comparison preimage.
    """
    aff = affine_check(inst)
    if not aff.ok():
        raise SpecError(
            f"affineness preconditions fail: {aff.failures or 'unit not bijective'}"
        )
    if not inst.coproduct_with_1:
        raise SpecError("no coproducts with 1 designated for this instance")
    base, k = inst.base, inst.k
    term = inst.terminal
    point = k.obj(term)[0]
    carrier = tuple(carrier)
    extended = (BOTTOM,) + carrier
    failures = []

    lifted = codensity_object(inst, extended)
    plain_comma = comma_category(
        carrier, k, with_composition=False, max_objects=inst.max_comma_objects
    )

    indexed = [
        oid for oid in plain_comma.objects
        if plain_comma.project(oid) in inst.coproduct_with_1
    ]
    # legs: T(1+A) -> K(1+X) at each indexed comma object
    legs = {}
    for oid in indexed:
        x, h = plain_comma.obj_pair(oid)
        oplus, i1, i2 = inst.coproduct_with_1[x]
        t1, t2 = k.map(i1), k.map(i2)
        h_ext = (t1[point],) + tuple(t2[v] for v in h)
        legs[oid] = {
            t: lifted.ev(lifted.comma.obj_id(oplus, h_ext), t)
            for t in lifted.elements
        }

    # arrows of the modified diagram: for f : (X,h) -> (X',h') use 1+f,
    # found as the unique morphism commuting with both injections
    arrows = []
    natural = True
    for mid, m in plain_comma.category.morphisms.items():
        if m.src not in legs or m.dst not in legs:
            continue
        name = plain_comma.base_morphism(mid)
        x = base.source(name)
        if name == base.identity(x):
            continue
        x2 = base.target(name)
        oplus, i1, i2 = inst.coproduct_with_1[x]
        oplus2, j1, j2 = inst.coproduct_with_1[x2]
        t_i1, t_i2 = k.map(i1), k.map(i2)
        t_j1, t_j2 = k.map(j1), k.map(j2)
        t_f = k.map(name)
        equations = [(t_i1[e], t_j1[e]) for e in k.obj(term)]
        equations += [(t_i2[e], t_j2[t_f[e]]) for e in k.obj(x)]
        lifted_f = _find_unique_morphism(base, k, oplus, oplus2, equations)
        arrows.append((m.src, m.dst, k.map(lifted_f)))
        table = k.map(lifted_f)
        for t in lifted.elements:
            if table[legs[m.src][t]] != legs[m.dst][t]:
                natural = False
                failures.append(f"modified cone fails naturality at {mid}")
                break

    from .fincat import _solve_limit

    domains = {
        oid: k.obj(inst.coproduct_with_1[plain_comma.project(oid)][0])
        for oid in indexed
    }
    families = _solve_limit(indexed, domains, arrows, inst.max_steps)
    comparison = {
        t: tuple(legs[oid][t] for oid in indexed) for t in lifted.elements
    }
    image = set(comparison.values())
    injective = len(image) == len(lifted.elements)
    surjective = image == set(families)
    if not injective:
        failures.append("comparison into the modified limit is not injective")
    if not surjective:
        failures.append("comparison into the modified limit is not surjective")

    # reconstruct the factorization of each limit point as in the
    # subprobability lift: split g = [y, h], find the unique point x with
    # K(x)(pt) = y, and route through K([x, 1]) applied to the (X, h) leg
    reconstruction_ok = injective and surjective
    if reconstruction_ok:
        preimage = {v: t for t, v in comparison.items()}
        idx = {oid: i for i, oid in enumerate(indexed)}
        for fam in families:
            t = preimage[fam]
            for oid in lifted.comma.objects:
                y_obj, g = lifted.comma.obj_pair(oid)
                if y_obj not in inst.coproduct_with_1:
                    continue
                y_val, h_rest = g[0], tuple(g[1:])
                point_arrow = _find_unique_morphism(
                    base, k, term, y_obj, [(point, y_val)]
                )
                oplus, i1, i2 = inst.coproduct_with_1[y_obj]
                t_i1, t_i2 = k.map(i1), k.map(i2)
                x_of = _find_unique_morphism(
                    base,
                    k,
                    oplus,
                    y_obj,
                    [(t_i1[point], y_val)]
                    + [(t_i2[e], e) for e in k.obj(y_obj)],
                )
                plain_oid = plain_comma.obj_id(y_obj, h_rest)
                if plain_oid in idx:
                    expected = k.map(x_of)[fam[idx[plain_oid]]]
                    if lifted.ev(oid, t) != expected:
                        reconstruction_ok = False
                        failures.append(
                            f"reconstructed factorization disagrees at {oid}"
                        )
                        break
            if not reconstruction_ok:
                break

    return SubprobLiftReport(
        carrier=carrier,
        cone_is_natural=natural,
        comparison_bijective=injective and surjective,
        reconstruction_consistent=reconstruction_ok,
        lhs_size=len(lifted.elements),
        rhs_size=len(families),
        failures=failures,
    )
