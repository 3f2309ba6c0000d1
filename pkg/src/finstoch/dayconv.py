"""Day convolution on finite strict monoidal categories and exactness checks.

The convolution at an object Z is the set of triples (x1, x2, m) with
m : X1 (x) X2 -> Z, quotiented by the equivalence generated by sliding
morphisms of the base through the two functor arguments.  Quotients are
computed by union-find over the generating relations, one generator per
(f, g, m) triple, never by closing the full relation eagerly.

Only strict monoidal bases are accepted: finite tables cannot carry
coherence isomorphism data cleanly.
"""

from dataclasses import dataclass, field
from itertools import product

from .codensity import CodensityInstance, codensity_object
from .errors import ResourceError, SpecError
from .fincat import SetFunctor, _solve_limit, comma_category, nat_set, representable

__all__ = [
    "StrictMonoidalCategory",
    "LaxMonoidalFunctorData",
    "DaySetFunctor",
    "day_convolve",
    "day_unit",
    "hom_functor",
    "xi_map",
    "ran_eval",
    "exactness_in_degree",
    "ExactnessVerdict",
    "binatural_family_count",
    "find_natural_isomorphism",
]


class UnionFind:
    """Union-find with path compression over hashable keys."""

    def __init__(self):
        self.parent = {}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[rx] = ry

    def classes(self):
        groups = {}
        for x in self.parent:
            groups.setdefault(self.find(x), []).append(x)
        return groups


class StrictMonoidalCategory:
    """A finite category with strictly associative and unital tensor tables."""

    def __init__(self, underlying, tensor_obj, tensor_mor, unit):
        self.underlying = underlying
        self.tensor_obj = dict(tensor_obj)
        self.tensor_mor = dict(tensor_mor)
        self.unit = unit

    def tobj(self, x, y):
        return self.tensor_obj[(x, y)]

    def tmor(self, f, g):
        return self.tensor_mor[(f, g)]

    def tobj_fold(self, xs):
        """Left-associated tensor of a list of objects; empty gives the unit."""
        out = self.unit
        for i, x in enumerate(xs):
            out = x if i == 0 else self.tobj(out, x)
        return out

    def tmor_fold(self, fs):
        c = self.underlying
        out = c.identity(self.unit)
        for i, f in enumerate(fs):
            out = f if i == 0 else self.tmor(out, f)
        return out

    def validate(self):
        report = []
        c = self.underlying
        report.extend(c.validate())
        if report:
            return report
        objs = c.objects
        for x in objs:
            for y in objs:
                if (x, y) not in self.tensor_obj:
                    report.append(f"missing object tensor ({x},{y})")
        if report:
            return report
        for x in objs:
            if self.tobj(x, self.unit) != x or self.tobj(self.unit, x) != x:
                report.append(f"object unit law fails at {x}")
            for y in objs:
                for z in objs:
                    if self.tobj(self.tobj(x, y), z) != self.tobj(x, self.tobj(y, z)):
                        report.append(f"object associativity fails at ({x},{y},{z})")
        mors = list(c.morphisms.values())
        for f in mors:
            for g in mors:
                t = self.tensor_mor.get((f.name, g.name))
                if t is None:
                    report.append(f"missing morphism tensor ({f.name},{g.name})")
                    continue
                tm = c.morphisms[t]
                if tm.src != self.tobj(f.src, g.src) or tm.dst != self.tobj(f.dst, g.dst):
                    report.append(f"morphism tensor ({f.name},{g.name}) has wrong type")
        if report:
            return report
        uid = c.identity(self.unit)
        for f in mors:
            if self.tmor(f.name, uid) != f.name or self.tmor(uid, f.name) != f.name:
                report.append(f"morphism unit law fails at {f.name}")
            for g in mors:
                for h in mors:
                    lhs = self.tmor(self.tmor(f.name, g.name), h.name)
                    rhs = self.tmor(f.name, self.tmor(g.name, h.name))
                    if lhs != rhs:
                        report.append(
                            f"morphism associativity fails at ({f.name},{g.name},{h.name})"
                        )
        for x in objs:
            for y in objs:
                if self.tmor(c.identity(x), c.identity(y)) != c.identity(self.tobj(x, y)):
                    report.append(f"tensor of identities fails at ({x},{y})")
        for f in mors:
            for f2 in mors:
                if f2.src != f.dst:
                    continue
                for g in mors:
                    for g2 in mors:
                        if g2.src != g.dst:
                            continue
                        lhs = self.tmor(
                            c.compose_pair(f2.name, f.name),
                            c.compose_pair(g2.name, g.name),
                        )
                        rhs = c.compose_pair(
                            self.tmor(f2.name, g2.name), self.tmor(f.name, g.name)
                        )
                        if lhs != rhs:
                            report.append(
                                "interchange fails at "
                                f"(({f2.name},{f.name}),({g2.name},{g.name}))"
                            )
        return report

    def is_valid(self):
        return not self.validate()


@dataclass
class LaxMonoidalFunctorData:
    """A set-valued functor with multiplication and unit structure maps.

    ``kappa[(X, Y)]`` maps pairs in K(X) x K(Y) to K(X (x) Y); ``iota`` is
    a distinguished element of K(unit).
    """

    monoidal: StrictMonoidalCategory
    functor: SetFunctor
    kappa: dict
    iota: object

    def validate(self):
        report = []
        report.extend(self.functor.validate())
        m, k = self.monoidal, self.functor
        if self.iota not in k.obj(m.unit):
            report.append("iota is not an element of K(unit)")
        objs = m.underlying.objects
        for x in objs:
            for y in objs:
                table = self.kappa.get((x, y))
                if table is None:
                    report.append(f"missing kappa at ({x},{y})")
                    continue
                target = set(k.obj(m.tobj(x, y)))
                for a in k.obj(x):
                    for b in k.obj(y):
                        if (a, b) not in table:
                            report.append(f"kappa at ({x},{y}) misses ({a!r},{b!r})")
                        elif table[(a, b)] not in target:
                            report.append(f"kappa at ({x},{y}) leaves the target")
        if report:
            return report
        for x in objs:
            for a in k.obj(x):
                if self.kappa[(m.unit, x)][(self.iota, a)] != a:
                    report.append(f"left unit coherence fails at {x}/{a!r}")
                if self.kappa[(x, m.unit)][(a, self.iota)] != a:
                    report.append(f"right unit coherence fails at {x}/{a!r}")
        for x in objs:
            for y in objs:
                for z in objs:
                    for a in k.obj(x):
                        for b in k.obj(y):
                            for c in k.obj(z):
                                left = self.kappa[(m.tobj(x, y), z)][
                                    (self.kappa[(x, y)][(a, b)], c)
                                ]
                                right = self.kappa[(x, m.tobj(y, z))][
                                    (a, self.kappa[(y, z)][(b, c)])
                                ]
                                if left != right:
                                    report.append(
                                        f"kappa associativity fails at ({x},{y},{z})"
                                    )
        for fname, fm in m.underlying.morphisms.items():
            for gname, gm in m.underlying.morphisms.items():
                tensored = k.map(m.tmor(fname, gname))
                for a in k.obj(fm.src):
                    for b in k.obj(gm.src):
                        lhs = tensored[self.kappa[(fm.src, gm.src)][(a, b)]]
                        rhs = self.kappa[(fm.dst, gm.dst)][
                            (k.map(fname)[a], k.map(gname)[b])
                        ]
                        if lhs != rhs:
                            report.append(
                                f"kappa naturality fails at ({fname},{gname})"
                            )
        return report

    def zeta(self, xs, values):
        """Fold kappa left-associated over a list of K-values at objects xs."""
        if not xs:
            return self.iota
        m = self.monoidal
        obj = xs[0]
        out = values[0]
        for x, v in zip(xs[1:], values[1:]):
            out = self.kappa[(obj, x)][(out, v)]
            obj = m.tobj(obj, x)
        return out


class DaySetFunctor(SetFunctor):
    """A set functor whose elements are day-convolution classes.

    Elements are canonical representatives (X1, X2, x1, x2, m); the class
    membership tables are kept so structure maps can be checked on every
    member, not just the representative.
    """

    def __init__(self, category, on_objects, on_morphisms, class_members, class_lookup):
        super().__init__(category, on_objects, on_morphisms)
        self.class_members = class_members  # obj -> rep -> member list
        self._lookup = class_lookup  # obj -> member -> rep

    def class_of(self, obj, member):
        return self._lookup[obj][member]


def _sort_key(member):
    return tuple(repr(part) for part in member)


def day_convolve(f, g, monoidal):
    """The Day convolution of two set-valued functors on a strict base.

    At each object Z: the disjoint union over (X1, X2) of
    F(X1) x G(X2) x Hom(X1 (x) X2, Z), quotiented by the equivalence
    generated by (x1, x2, m after (u (x) v)) ~ (F(u)(x1), G(v)(x2), m).
    The functorial action post-composes the morphism component.
    """
    base = monoidal.underlying
    on_objects = {}
    on_morphisms = {}
    class_members = {}
    class_lookup = {}
    members_by_obj = {}
    uf_by_obj = {}
    for z in base.objects:
        uf = UnionFind()
        members = []
        for x1 in base.objects:
            for x2 in base.objects:
                source = monoidal.tobj(x1, x2)
                for m in base.hom(source, z):
                    for e1 in f.obj(x1):
                        for e2 in g.obj(x2):
                            member = (x1, x2, e1, e2, m)
                            uf.add(member)
                            members.append(member)
        # one generator per (u, v, m): slide u and v through the arguments
        for u_name, u in base.morphisms.items():
            for v_name, v in base.morphisms.items():
                src_t = monoidal.tobj(u.src, v.src)
                uv = monoidal.tmor(u_name, v_name)
                for m in base.hom(monoidal.tobj(u.dst, v.dst), z):
                    m_uv = base.compose_pair(m, uv)
                    for e1 in f.obj(u.src):
                        for e2 in g.obj(v.src):
                            uf.union(
                                (u.src, v.src, e1, e2, m_uv),
                                (u.dst, v.dst, f.apply(u_name, e1), g.apply(v_name, e2), m),
                            )
        groups = uf.classes()
        reps = {}
        for members_list in groups.values():
            rep = min(members_list, key=_sort_key)
            reps[rep] = sorted(members_list, key=_sort_key)
        ordered = sorted(reps, key=_sort_key)
        on_objects[z] = tuple(ordered)
        class_members[z] = reps
        class_lookup[z] = {
            member: rep for rep, members_list in reps.items() for member in members_list
        }
        members_by_obj[z] = members
        uf_by_obj[z] = uf
    for name, mor in base.morphisms.items():
        table = {}
        for rep in on_objects[mor.src]:
            x1, x2, e1, e2, m = rep
            moved = (x1, x2, e1, e2, base.compose_pair(name, m))
            table[rep] = class_lookup[mor.dst][moved]
        on_morphisms[name] = table
    return DaySetFunctor(base, on_objects, on_morphisms, class_members, class_lookup)


def day_unit(monoidal):
    """The unit of Day convolution: the functor represented by the unit object."""
    return representable(monoidal.underlying, monoidal.unit)


def hom_functor(monoidal_or_cat, carrier, k):
    """The functor X |-> all functions carrier -> K(X), acting by
    post-composition.  Functions are stored as value tuples aligned with
    the carrier order."""
    base = getattr(monoidal_or_cat, "underlying", monoidal_or_cat)
    carrier = tuple(carrier)
    on_objects = {
        x: tuple(product(k.obj(x), repeat=len(carrier))) for x in base.objects
    }
    on_morphisms = {}
    for name, m in base.morphisms.items():
        table = k.map(name)
        on_morphisms[name] = {
            h: tuple(table[v] for v in h) for h in on_objects[m.src]
        }
    return SetFunctor(base, on_objects, on_morphisms)


def product_tuples(carriers):
    """Flat k-tuples over the carriers, lexicographic; k = 0 gives ((),)."""
    return tuple(product(*[tuple(c) for c in carriers]))


@dataclass
class XiMap:
    """The oplax comparison from convolved hom functors into the joint one.

    ``components[z]`` maps each class representative in the degree-k Day
    convolution at z to a function tuple in Hom(product carrier, K(z)).
    """

    degree: int
    source: SetFunctor
    target: SetFunctor
    components: dict
    carriers: tuple

    def apply(self, z, element):
        return self.components[z][element]


def _xi_value(lax, carriers, day_functors, degree, z, member):
    """Evaluate the degree-k comparison on one member triple."""
    k = lax.functor
    if degree == 0:
        # member is a morphism unit -> z; the value routes iota through it
        return (k.map(member)[lax.iota],)
    if degree == 1:
        return member
    x1, x2, e1, e2, m = member
    prefix = _xi_value(lax, carriers[:-1], day_functors, degree - 1, x1, e1)
    prefix_points = product_tuples(carriers[:-1])
    last_points = tuple(carriers[-1])
    table = k.map(m)
    kap = lax.kappa[(x1, x2)]
    values = []
    prefix_index = {p: i for i, p in enumerate(prefix_points)}
    last_index = {a: i for i, a in enumerate(last_points)}
    for point in product_tuples(carriers):
        head, tail = point[:-1], point[-1]
        v1 = prefix[prefix_index[head]]
        v2 = e2[last_index[tail]]
        values.append(table[kap[(v1, v2)]])
    return tuple(values)


def day_power(lax, carriers):
    """Iterated Day convolution of the hom functors at the given carriers.

    Degree 0 is the Day unit; degree 1 the plain hom functor; higher
    degrees fold day_convolve on the left.
    """
    m = lax.monoidal
    functors = []
    current = None
    for i, carrier in enumerate(carriers):
        h = hom_functor(m, carrier, lax.functor)
        current = h if i == 0 else day_convolve(current, h, m)
        functors.append(current)
    if not carriers:
        return [day_unit(m)]
    return functors


def xi_map(degree, carriers, lax):
    """Build the degree-k oplax comparison map and verify it.

    Verification covers well-definedness (every member of a class gets the
    same value) and naturality in the base object.  Degree 1 is the
    identity-shaped canonical map; degree 0 sends a morphism x out of the
    unit to the function picking K(x)(iota).
    """
    if degree != len(carriers):
        raise SpecError("xi_map needs exactly one carrier per degree")
    m = lax.monoidal
    base = m.underlying
    carriers = tuple(tuple(c) for c in carriers)
    chain = day_power(lax, carriers)
    source = chain[-1]
    target = hom_functor(m, product_tuples(carriers), lax.functor)
    components = {}
    for z in base.objects:
        table = {}
        for rep in source.obj(z):
            value = _xi_value(lax, carriers, chain, degree, z, rep)
            if degree >= 2:
                for member in source.class_members[z][rep]:
                    other = _xi_value(lax, carriers, chain, degree, z, member)
                    if other != value:
                        raise SpecError(
                            f"comparison map ill-defined on class {rep!r} at {z}"
                        )
            table[rep] = value
        components[z] = table
    for name, mor in base.morphisms.items():
        k_table = lax.functor.map(name)
        for rep in source.obj(mor.src):
            moved = source.map(name)[rep]
            lhs = components[mor.dst][moved]
            rhs = tuple(k_table[v] for v in components[mor.src][rep])
            if lhs != rhs:
                raise SpecError(f"comparison map not natural along {name}")
    return XiMap(degree, source, target, components, carriers)


def ran_eval(f, k, max_steps=None):
    """Evaluate the right Kan extension along Yoneda at a functor.

    This is the set of natural transformations from f into k, computed as
    a limit over the category of elements of f.
    """
    kwargs = {} if max_steps is None else {"max_steps": max_steps}
    return nat_set(f, k, **kwargs)


@dataclass
class ExactnessVerdict:
    degree: int
    exact: bool
    lhs_size: int
    rhs_size: int
    injective: bool
    surjective: bool
    witness: object = None

    def __repr__(self):
        word = "exact" if self.exact else "NOT exact"
        return (
            f"ExactnessVerdict(degree {self.degree}: {word}, "
            f"{self.lhs_size} vs {self.rhs_size})"
        )


def exactness_in_degree(degree, carriers, lax, max_comma_objects=None, max_steps=None):
    """Compare the codensity limit of a tensor against the joint limit.

    Degree 0 compares T(unit carrier) with K(unit object) through
    evaluation at iota, strengthened to bijectivity.  Degree k >= 1
    compares T of the flat product carrier with the limit over the product
    of the per-carrier comma categories, via post-composition with the
    degree-k structure map.  Both injectivity and surjectivity are
    checked; a concrete non-preimage family is reported on failure.
    """
    if degree != len(carriers):
        raise SpecError("exactness check needs one carrier per degree")
    m = lax.monoidal
    base = m.underlying
    inst = CodensityInstance(base=base, k=lax.functor)
    if max_comma_objects is not None:
        inst.max_comma_objects = max_comma_objects
    if max_steps is not None:
        inst.max_steps = max_steps
    carriers = [tuple(c) for c in carriers]
    prod_carrier = product_tuples(carriers)
    lhs = codensity_object(inst, prod_carrier)

    if degree == 0:
        rhs = lax.functor.obj(m.unit)
        h_iota = (lax.iota,)
        oid = lhs.comma.obj_id(m.unit, h_iota)
        comparison = {t: lhs.ev(oid, t) for t in lhs.elements}
        image = set(comparison.values())
        injective = len(image) == len(lhs.elements)
        surjective = image == set(rhs)
        witness = next((v for v in rhs if v not in image), None)
        return ExactnessVerdict(
            0, injective and surjective, len(lhs.elements), len(rhs),
            injective, surjective, witness,
        )

    factor_commas = [
        comma_category(c, lax.functor, with_composition=False,
                       max_objects=inst.max_comma_objects)
        for c in carriers
    ]
    joint_objects = list(product(*[fc.objects for fc in factor_commas]))
    if max_comma_objects is not None and len(joint_objects) > max_comma_objects:
        raise ResourceError(
            f"joint comma product has {len(joint_objects)} objects "
            f"(budget {max_comma_objects})",
            cardinality=len(joint_objects),
        )
    domains = {}
    for combo in joint_objects:
        objs = [fc.project(oid) for fc, oid in zip(factor_commas, combo)]
        domains[combo] = lax.functor.obj(m.tobj_fold(objs))
    arrows = []
    for j, fc in enumerate(factor_commas):
        for mid, mor in fc.category.morphisms.items():
            name = fc.base_morphism(mid)
            if name == base.identity(base.source(name)):
                continue
            others = [factor_commas[i].objects for i in range(len(factor_commas))]
            for combo in product(*[
                others[i] if i != j else [mor.src] for i in range(len(factor_commas))
            ]):
                dst_combo = tuple(
                    mor.dst if i == j else combo[i] for i in range(len(combo))
                )
                parts = [
                    base.identity(factor_commas[i].project(combo[i]))
                    if i != j
                    else name
                    for i in range(len(combo))
                ]
                arrows.append(
                    (combo, dst_combo, lax.functor.map(m.tmor_fold(parts)))
                )
    families = _solve_limit(joint_objects, domains, arrows, inst.max_steps)
    rhs_index = {fam: i for i, fam in enumerate(families)}

    point_indices = [
        {a: i for i, a in enumerate(c)} for c in carriers
    ]
    comparison = {}
    for t in lhs.elements:
        coords = []
        for combo in joint_objects:
            objs = []
            h_funcs = []
            for fc, oid in zip(factor_commas, combo):
                x, h = fc.obj_pair(oid)
                objs.append(x)
                h_funcs.append(h)
            values = []
            for point in prod_carrier:
                vs = [
                    h_funcs[i][point_indices[i][point[i]]]
                    for i in range(len(carriers))
                ]
                values.append(lax.zeta(objs, vs))
            oid_join = lhs.comma.obj_id(m.tobj_fold(objs), tuple(values))
            coords.append(lhs.ev(oid_join, t))
        comparison[t] = tuple(coords)
    image = set(comparison.values())
    injective = len(image) == len(lhs.elements)
    surjective = image == set(families)
    witness = None
    if not surjective:
        witness = next(f for f in families if f not in image)
    elif not injective:
        seen = {}
        for t, v in comparison.items():
            if v in seen:
                witness = (seen[v], t)
                break
            seen[v] = t
    return ExactnessVerdict(
        degree, injective and surjective, len(lhs.elements), len(families),
        injective, surjective, witness,
    )


def binatural_family_count(f, g, h, monoidal, max_steps=None):
    """Count families F(X1) x G(X2) -> H(X1 (x) X2) natural in both slots.

    Computed as a limit over the product of the categories of elements.
    The hom-tensor adjunction says this equals the number of natural
    transformations out of the Day convolution.
    """
    base = monoidal.underlying
    objects = [
        ((x1, e1), (x2, e2))
        for x1 in base.objects
        for e1 in f.obj(x1)
        for x2 in base.objects
        for e2 in g.obj(x2)
    ]
    domains = {
        ((x1, e1), (x2, e2)): h.obj(monoidal.tobj(x1, x2))
        for ((x1, e1), (x2, e2)) in objects
    }
    arrows = []
    for name, mor in base.morphisms.items():
        if name == base.identity(mor.src):
            continue
        f_table = f.map(name)
        g_table = g.map(name)
        for x2 in base.objects:
            for e2 in g.obj(x2):
                table = h.map(monoidal.tmor(name, base.identity(x2)))
                for e1 in f.obj(mor.src):
                    arrows.append(
                        (
                            ((mor.src, e1), (x2, e2)),
                            ((mor.dst, f_table[e1]), (x2, e2)),
                            table,
                        )
                    )
        for x1 in base.objects:
            for e1 in f.obj(x1):
                table = h.map(monoidal.tmor(base.identity(x1), name))
                for e2 in g.obj(mor.src):
                    arrows.append(
                        (
                            ((x1, e1), (mor.src, e2)),
                            ((x1, e1), (mor.dst, g_table[e2])),
                            table,
                        )
                    )
    kwargs = {}
    if max_steps is not None:
        kwargs["max_steps"] = max_steps
    families = _solve_limit(objects, domains, arrows, **kwargs)
    return len(families)


def find_natural_isomorphism(f, g, max_steps=None):
    """Exhibit a natural isomorphism between set-valued functors, or None."""
    kwargs = {} if max_steps is None else {"max_steps": max_steps}
    for alpha in nat_set(f, g, **kwargs):
        if all(
            len(set(alpha[x].values())) == len(g.obj(x)) == len(f.obj(x))
            for x in f.category.objects
        ):
            return alpha
    return None
