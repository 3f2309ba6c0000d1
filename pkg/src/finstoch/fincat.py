"""Finite categories, set-valued functors, comma categories and limits.

Categories are presented by explicit finite tables (objects, typed
morphisms, a total composition table on composable pairs, identities), so
every axiom is machine-checkable by exhaustive loops.  Object and morphism
identifiers are opaque strings; equality is identifier equality.

Limits of set-valued diagrams are computed by depth-first assignment with
arc-consistency pruning, never by materializing the full product: comma
categories have huge ambient products but tight constraints.
"""

from dataclasses import dataclass
from itertools import product

from .errors import ResourceError, SpecError

__all__ = [
    "Morphism",
    "FiniteCategory",
    "SetFunctor",
    "FiniteDiagram",
    "CommaCategory",
    "LimitSet",
    "validate_category",
    "comma_category",
    "limit_of_diagram",
    "nat_set",
    "representable",
]

DEFAULT_MAX_STEPS = 10_000_000


@dataclass(frozen=True)
class Morphism:
    name: str
    src: str
    dst: str


class FiniteCategory:
    """A category given by finite tables.

    ``compose`` maps a pair ``(g, f)`` of morphism names with
    ``target(f) == source(g)`` to the name of ``g after f``.
    """

    def __init__(self, objects, morphisms, compose, identities):
        self.objects = tuple(objects)
        self.morphisms = {}
        for m in morphisms:
            if isinstance(m, Morphism):
                self.morphisms[m.name] = m
            else:
                name, src, dst = m
                self.morphisms[name] = Morphism(name, src, dst)
        self.compose = dict(compose)
        self.identities = dict(identities)

    def source(self, name):
        return self.morphisms[name].src

    def target(self, name):
        return self.morphisms[name].dst

    def identity(self, obj):
        return self.identities[obj]

    def compose_pair(self, g, f):
        """Return ``g after f``."""
        return self.compose[(g, f)]

    def hom(self, x, y):
        """All morphism names from x to y, in table order."""
        return tuple(
            m.name for m in self.morphisms.values() if m.src == x and m.dst == y
        )

    def non_identity_morphisms(self):
        ids = set(self.identities.values())
        return tuple(m for name, m in self.morphisms.items() if name not in ids)

    def validate(self):
        return validate_category(self)

    def is_valid(self):
        return not validate_category(self)

    def __repr__(self):
        return (
            f"FiniteCategory({len(self.objects)} objects, "
            f"{len(self.morphisms)} morphisms)"
        )


def validate_category(c):
    """Exhaustively check the category axioms.

    Returns a list of human-readable violations; an empty list means the
    tables present a genuine category.  Validation never throws.
    """
    report = []
    objset = set(c.objects)
    for name, m in c.morphisms.items():
        if m.src not in objset:
            report.append(f"morphism {name}: unknown source {m.src}")
        if m.dst not in objset:
            report.append(f"morphism {name}: unknown target {m.dst}")
    for x in c.objects:
        i = c.identities.get(x)
        if i is None:
            report.append(f"object {x}: missing identity")
            continue
        if i not in c.morphisms:
            report.append(f"object {x}: identity {i} is not a morphism")
            continue
        m = c.morphisms[i]
        if m.src != x or m.dst != x:
            report.append(f"object {x}: identity {i} is not an endomorphism of {x}")
    names = set(c.morphisms)
    for (g, f), gf in c.compose.items():
        if g not in names or f not in names:
            report.append(f"compose entry ({g},{f}): unknown morphism")
            continue
        if c.source(g) != c.target(f):
            report.append(f"compose entry ({g},{f}): pair is not composable")
            continue
        if gf not in names:
            report.append(f"compose entry ({g},{f}): unknown composite {gf}")
            continue
        if c.source(gf) != c.source(f) or c.target(gf) != c.target(g):
            report.append(
                f"compose entry ({g},{f}) = {gf}: composite has wrong type "
                f"(expected {c.source(f)} -> {c.target(g)})"
            )
    for f in c.morphisms.values():
        for g in c.morphisms.values():
            if g.src == f.dst and (g.name, f.name) not in c.compose:
                report.append(f"missing composite for ({g.name},{f.name})")
    # unit and associativity loops only make sense on a closed table
    if report:
        return report
    for f in c.morphisms.values():
        if c.compose[(c.identity(f.dst), f.name)] != f.name:
            report.append(f"left unit fails at {f.name}")
        if c.compose[(f.name, c.identity(f.src))] != f.name:
            report.append(f"right unit fails at {f.name}")
    for f in c.morphisms.values():
        for g in c.morphisms.values():
            if g.src != f.dst:
                continue
            gf = c.compose[(g.name, f.name)]
            for h in c.morphisms.values():
                if h.src != g.dst:
                    continue
                hg = c.compose[(h.name, g.name)]
                if c.compose[(h.name, gf)] != c.compose[(hg, f.name)]:
                    report.append(
                        f"associativity fails on ({h.name},{g.name},{f.name})"
                    )
    return report


class SetFunctor:
    """A functor into finite sets, given by object and morphism tables.

    ``on_objects`` maps each object to a tuple of elements (the order is
    the canonical enumeration order); ``on_morphisms`` maps each morphism
    name to a dict sending elements of the source set to elements of the
    target set.
    """

    def __init__(self, category, on_objects, on_morphisms):
        self.category = category
        self.on_objects = {x: tuple(v) for x, v in on_objects.items()}
        self.on_morphisms = {m: dict(t) for m, t in on_morphisms.items()}

    def obj(self, x):
        return self.on_objects[x]

    def map(self, name):
        return self.on_morphisms[name]

    def apply(self, name, element):
        return self.on_morphisms[name][element]

    def validate(self):
        """Check totality, typing, and preservation of identities/composition."""
        report = []
        c = self.category
        for x in c.objects:
            if x not in self.on_objects:
                report.append(f"object {x}: no value set")
        for name, m in c.morphisms.items():
            table = self.on_morphisms.get(name)
            if table is None:
                report.append(f"morphism {name}: no value function")
                continue
            src = set(self.on_objects.get(m.src, ()))
            dst = set(self.on_objects.get(m.dst, ()))
            if set(table) != src:
                report.append(f"morphism {name}: function not total on source set")
            if not set(table.values()) <= dst:
                report.append(f"morphism {name}: function leaves target set")
        if report:
            return report
        for x in c.objects:
            i = c.identity(x)
            if any(self.on_morphisms[i][e] != e for e in self.on_objects[x]):
                report.append(f"identity of {x} is not sent to the identity function")
        for (g, f), gf in c.compose.items():
            tf, tg, tgf = self.on_morphisms[f], self.on_morphisms[g], self.on_morphisms[gf]
            for e in self.on_objects[c.source(f)]:
                if tg[tf[e]] != tgf[e]:
                    report.append(f"composition not preserved on ({g},{f}) at {e!r}")
                    break
        return report

    def is_valid(self):
        return not self.validate()

    def __repr__(self):
        sizes = {x: len(v) for x, v in self.on_objects.items()}
        return f"SetFunctor({sizes})"


@dataclass(frozen=True)
class FiniteDiagram:
    """A finite shape together with a set-valued functor on it."""

    shape: FiniteCategory
    value: SetFunctor

    def validate(self):
        if self.value.category is not self.shape:
            return ["diagram value is not a functor on the shape"]
        return self.value.validate()


def representable(category, x):
    """The hom functor out of ``x``: objects map to hom-sets, morphisms
    act by post-composition."""
    on_objects = {y: category.hom(x, y) for y in category.objects}
    on_morphisms = {}
    for name, m in category.morphisms.items():
        on_morphisms[name] = {
            f: category.compose_pair(name, f) for f in on_objects[m.src]
        }
    return SetFunctor(category, on_objects, on_morphisms)


class LimitSet:
    """The limit of a finite set-valued diagram.

    ``families`` is a tuple of tuples; each family lists one element per
    diagram object, aligned with ``objects``.  The projection to object
    ``x`` reads off that coordinate.
    """

    def __init__(self, objects, families):
        self.objects = tuple(objects)
        self._index = {x: i for i, x in enumerate(self.objects)}
        self.families = tuple(families)

    def project(self, family, obj):
        return family[self._index[obj]]

    def index_of(self, obj):
        return self._index[obj]

    def as_dict(self, family):
        return dict(zip(self.objects, family))

    def __len__(self):
        return len(self.families)

    def __iter__(self):
        return iter(self.families)

    def __contains__(self, family):
        return family in set(self.families)

    def __repr__(self):
        return f"LimitSet({len(self.objects)} coordinates, {len(self.families)} families)"


def _solve_limit(objects, domains, arrows, max_steps=DEFAULT_MAX_STEPS):
    """Enumerate all families x with f(x_src) = x_dst for every arrow.

    arrows: list of (src_obj, dst_obj, mapping dict).  Uses AC-3 style
    pruning followed by depth-first search; counts each (arrow, element)
    inspection as one propagation step against the budget.
    """
    objects = list(objects)
    doms = {x: list(domains[x]) for x in objects}
    by_src = {}
    by_dst = {}
    for a in arrows:
        by_src.setdefault(a[0], []).append(a)
        by_dst.setdefault(a[1], []).append(a)
    steps = 0

    def revise(dom_map, arrow):
        nonlocal steps
        s, t, table = arrow
        ds, dt = dom_map[s], dom_map[t]
        tset = set(dt)
        new_s = []
        for e in ds:
            steps += 1
            if table[e] in tset:
                new_s.append(e)
        changed = len(new_s) != len(ds)
        if changed:
            dom_map[s] = new_s
        image = set()
        for e in dom_map[s]:
            steps += 1
            image.add(table[e])
        new_t = [e for e in dt if e in image]
        if len(new_t) != len(dt):
            dom_map[t] = new_t
            changed = True
        return changed

    def propagate(dom_map, queue):
        nonlocal steps
        while queue:
            if steps > max_steps:
                raise ResourceError(
                    f"limit search exceeded {max_steps} propagation steps",
                    cardinality=steps,
                )
            arrow = queue.pop()
            if revise(dom_map, arrow):
                s, t, _ = arrow
                if not dom_map[s] or not dom_map[t]:
                    return False
                for other in by_dst.get(s, []) + by_src.get(t, []) + by_src.get(s, []) + by_dst.get(t, []):
                    if other is not arrow:
                        queue.append(other)
        return True

    if not propagate(doms, list(arrows)):
        return []
    results = []

    def search(dom_map):
        nonlocal steps
        steps += 1
        if steps > max_steps:
            raise ResourceError(
                f"limit search exceeded {max_steps} propagation steps",
                cardinality=steps,
            )
        unassigned = [x for x in objects if len(dom_map[x]) > 1]
        if not unassigned:
            if all(dom_map[x] for x in objects):
                results.append(tuple(dom_map[x][0] for x in objects))
            return
        pivot = min(unassigned, key=lambda x: len(dom_map[x]))
        for e in dom_map[pivot]:
            trial = dict(dom_map)
            trial[pivot] = [e]
            queue = list(by_src.get(pivot, [])) + list(by_dst.get(pivot, []))
            if propagate(trial, queue):
                search(trial)

    if any(not doms[x] for x in objects):
        return []
    search(doms)
    return results


def limit_of_diagram(diagram, max_steps=DEFAULT_MAX_STEPS):
    """Compute the limit of a finite set-valued diagram.

    Accepts a :class:`FiniteDiagram` or a bare :class:`SetFunctor`.
    Returns a :class:`LimitSet`; an empty limit is a valid answer, and the
    empty shape yields the one-element limit (the empty family).
    """
    if isinstance(diagram, FiniteDiagram):
        value = diagram.value
    else:
        value = diagram
    shape = value.category
    arrows = [
        (m.src, m.dst, value.map(m.name)) for m in shape.non_identity_morphisms()
    ]
    families = _solve_limit(shape.objects, value.on_objects, arrows, max_steps)
    return LimitSet(shape.objects, families)


class CommaCategory:
    """The comma category of a finite set under a set-valued functor.

    Objects are pairs ``(X, h)`` where ``h : carrier -> K(X)`` is a total
    function, stored as a tuple of values aligned with the carrier order.
    A morphism ``(X, h) -> (X', h')`` is a base morphism ``f : X -> X'``
    with ``K(f) after h == h'``.  ``category`` presents this as a plain
    :class:`FiniteCategory`; ``obj_pair``/``obj_id`` translate between
    opaque identifiers and pairs, and ``project`` maps a comma object to
    its base object.
    """

    def __init__(self, carrier, functor, category, obj_data, mor_data):
        self.carrier = tuple(carrier)
        self.functor = functor
        self.category = category
        self._obj_data = obj_data  # comma object id -> (X, h tuple)
        self._obj_ids = {pair: oid for oid, pair in obj_data.items()}
        self._mor_data = mor_data  # comma morphism id -> base morphism name

    @property
    def objects(self):
        return self.category.objects

    def obj_pair(self, oid):
        return self._obj_data[oid]

    def obj_id(self, x, h):
        return self._obj_ids[(x, tuple(h))]

    def project(self, oid):
        return self._obj_data[oid][0]

    def base_morphism(self, mid):
        return self._mor_data[mid]

    def h_function(self, oid):
        """The structure map of a comma object, as a dict on the carrier."""
        x, h = self._obj_data[oid]
        return dict(zip(self.carrier, h))

    def size(self):
        return len(self._obj_data)


def comma_object_count(carrier, functor):
    """Number of comma objects, computed arithmetically (no materialization)."""
    n = len(tuple(carrier))
    return sum(len(functor.obj(x)) ** n for x in functor.category.objects)


def comma_category(carrier, functor, with_composition=True, max_objects=None):
    """Build the comma category of ``carrier`` under ``functor``.

    ``with_composition=False`` skips the composition table; limits only
    read objects and arrows, and full tables can be large.
    """
    carrier = tuple(carrier)
    base = functor.category
    if max_objects is not None:
        count = comma_object_count(carrier, functor)
        if count > max_objects:
            raise ResourceError(
                f"comma category would have {count} objects "
                f"(budget {max_objects})",
                cardinality=count,
            )
    obj_data = {}
    obj_ids = {}
    for x in base.objects:
        values = functor.obj(x)
        for i, h in enumerate(product(values, repeat=len(carrier))):
            oid = f"{x}#{i}"
            obj_data[oid] = (x, h)
            obj_ids[(x, h)] = oid
    morphisms = []
    mor_data = {}
    identities = {}
    for oid, (x, h) in obj_data.items():
        for name, m in base.morphisms.items():
            if m.src != x:
                continue
            table = functor.map(name)
            h2 = tuple(table[v] for v in h)
            dst = obj_ids[(m.dst, h2)]
            mid = f"{name}@{oid}"
            morphisms.append((mid, oid, dst))
            mor_data[mid] = name
            if name == base.identity(x):
                identities[oid] = mid
    compose = {}
    if with_composition:
        # (g@(X',h')) after (f@(X,h)) is (g after f)@(X,h)
        targets = {mid: dst for mid, _, dst in morphisms}
        sources = {mid: src for mid, src, _ in morphisms}
        for gid, gbase in mor_data.items():
            for fid, fbase in mor_data.items():
                if sources[gid] != targets[fid]:
                    continue
                comp = base.compose_pair(gbase, fbase)
                compose[(gid, fid)] = f"{comp}@{sources[fid]}"
    cat = FiniteCategory(obj_data.keys(), morphisms, compose, identities)
    return CommaCategory(carrier, functor, cat, obj_data, mor_data)


def comma_diagram_limit(comma, max_steps=DEFAULT_MAX_STEPS):
    """Limit of the evaluation diagram (X, h) |-> K(X) over a comma category."""
    functor = comma.functor
    domains = {oid: functor.obj(comma.project(oid)) for oid in comma.objects}
    arrows = []
    for mid, m in comma.category.morphisms.items():
        base_name = comma.base_morphism(mid)
        if base_name == functor.category.identity(functor.category.source(base_name)):
            continue
        arrows.append((m.src, m.dst, functor.map(base_name)))
    families = _solve_limit(comma.objects, domains, arrows, max_steps)
    return LimitSet(comma.objects, families)


def category_of_elements(functor):
    """Objects (X, x) with x in F(X); arrows lift the base morphisms.

    Returned in the lightweight form consumed by the limit solver:
    (objects, arrow list), with objects as (X, x) pairs.
    """
    base = functor.category
    objects = [(x, e) for x in base.objects for e in functor.obj(x)]
    arrows = []
    for m in base.non_identity_morphisms():
        table = functor.map(m.name)
        arrows.append((m, table))
    return objects, arrows


def nat_set(f, g, max_steps=DEFAULT_MAX_STEPS):
    """Enumerate all natural transformations between set-valued functors.

    Computed as the limit of g over the category of elements of f: a
    family picks, for each (X, x) with x in f(X), a value in g(X), subject
    to g(u)(value at (X, x)) == value at (Y, f(u)(x)) for every u: X -> Y.
    Returns a tuple of transformations, each a dict X -> (dict fX -> gX).
    """
    if f.category is not g.category:
        raise SpecError("nat_set requires functors on the same category")
    base = f.category
    objects = [(x, e) for x in base.objects for e in f.obj(x)]
    domains = {(x, e): g.obj(x) for (x, e) in objects}
    arrows = []
    for m in base.non_identity_morphisms():
        f_table = f.map(m.name)
        g_table = g.map(m.name)
        for e in f.obj(m.src):
            arrows.append(((m.src, e), (m.dst, f_table[e]), g_table))
    families = _solve_limit(objects, domains, arrows, max_steps)
    transformations = []
    for fam in families:
        alpha = {x: {} for x in base.objects}
        for (x, e), value in zip(objects, fam):
            alpha[x][e] = value
        transformations.append(alpha)
    return tuple(transformations)
