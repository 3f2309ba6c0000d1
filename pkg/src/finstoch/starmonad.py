"""The list calculus of polymeasure spaces and its Kleisli structure.

Objects here are finite lists of finite sets (ObjList = tuple of
carriers); list concatenation is strictly associative with the empty list
as unit.  T sends a list to its polymeasure space; the unit packs a tuple
of points into a product of Diracs, and the multiplication integrates the
slotwise evaluations against a finitely supported outer layer:

    mult(Gamma)(A11, ..) = sum over support of density * prod gamma_i(A_i)

Outer layers are restricted to finitely supported data; that keeps every
law instance exactly checkable while exercising the full formulas.  The
Kleisli morphisms (one input, a list of outputs) form a monoidal
op-multicategory whose axioms the law suite samples.
"""

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .errors import SpecError
from .polymeasure import (
    Polymeasure,
    permute_slots,
    product_polymeasure,
)

__all__ = [
    "ObjList",
    "DiscreteOuterPolymeasure",
    "PolyKernelMorphism",
    "star_unit",
    "star_mult",
    "star_mult_unnormalized",
    "outer_mult",
    "kappa_strength",
    "nu_weaken",
    "identity_polykernel",
    "discard_morphism",
    "polykernel_compose",
    "polykernel_tensor",
    "weaken_polykernel",
    "rebracket_polykernel",
    "bracket_carrier",
    "StarLawConfig",
    "star_law_suite",
    "I_CARRIER",
]

ZERO = Fraction(0)
ONE = Fraction(1)

# ObjList: a finite list of finite sets, stored as a tuple of tuples.
ObjList = tuple

# the monoidal unit of finite sets with Cartesian product
I_CARRIER = ((),)


def concat_lists(lists):
    out = ()
    for entry in lists:
        out = out + tuple(entry)
    return out


class DiscreteOuterPolymeasure:
    """A finitely supported outer layer over polymeasure spaces.

    ``inner_spaces`` lists the n shapes; ``density`` maps n-tuples of
    inner values (polymeasures, or nested outer layers) to nonnegative
    weights summing to 1.
    """

    def __init__(self, inner_spaces, density):
        self.inner_spaces = tuple(inner_spaces)
        d = {}
        total = ZERO
        for key, v in density.items():
            key = tuple(key)
            v = Fraction(v)
            if len(key) != len(self.inner_spaces):
                raise SpecError(f"support tuple {key!r} has wrong length")
            for entry, shape in zip(key, self.inner_spaces):
                if isinstance(entry, Polymeasure):
                    if tuple(map(set, entry.carriers)) != tuple(
                        set(c) for c in shape
                    ):
                        raise SpecError("support entry lives on the wrong shape")
                elif not isinstance(entry, DiscreteOuterPolymeasure):
                    raise SpecError(f"unsupported inner value {entry!r}")
            if v < 0:
                raise SpecError(f"negative outer weight {v}")
            if v != 0:
                d[key] = v
                total += v
        if total != 1:
            raise SpecError(f"outer weights sum to {total}, expected 1")
        self.density = d

    @property
    def width(self):
        return len(self.inner_spaces)

    def __eq__(self, other):
        if not isinstance(other, DiscreteOuterPolymeasure):
            return NotImplemented
        return (
            self.inner_spaces == other.inner_spaces
            and self.density == other.density
        )

    def __hash__(self):
        return hash((self.inner_spaces, frozenset(self.density.items())))

    def __repr__(self):
        return (
            f"DiscreteOuterPolymeasure(width={self.width}, "
            f"support={len(self.density)})"
        )


def star_unit(xs, carriers):
    """The product-of-Diracs polymeasure at a tuple of points."""
    carriers = tuple(tuple(c) for c in carriers)
    xs = tuple(xs)
    if len(xs) != len(carriers):
        raise SpecError("need exactly one point per carrier")
    for x, c in zip(xs, carriers):
        if x not in c:
            raise SpecError(f"{x!r} is not in its carrier")
    return Polymeasure(carriers, {xs: ONE})


def _combined_density(outer, unweighted):
    """The weighted product of inner densities over the flattened keys."""
    out = {}
    n_support = len(outer.density)
    for key, w in outer.density.items():
        factor = Fraction(1, n_support) if unweighted else w
        inner_items = [list(entry.density.items()) for entry in key]
        for combo in product(*inner_items):
            flat = concat_lists([inner_key for inner_key, _v in combo])
            v = factor
            for _inner_key, weight in combo:
                v *= weight
            if v != 0:
                out[flat] = out.get(flat, ZERO) + v
    return out


def star_mult(outer, unweighted=False):
    """Flatten an outer layer of polymeasures into one polymeasure.

    The result lives on the concatenation of the inner carrier lists;
    its density at a flattened tuple is the outer-weighted sum of the
    products of the inner densities.
    """
    for key in outer.density:
        for entry in key:
            if not isinstance(entry, Polymeasure):
                raise SpecError("star_mult needs polymeasure entries")
    carriers = concat_lists(outer.inner_spaces)
    return Polymeasure(carriers, _combined_density(outer, unweighted))


def star_mult_unnormalized(outer):
    """Mutant multiplication that forgets the outer weights.

    Replaces every outer weight by a uniform share so the output still
    normalizes; the law suite uses it as a deliberately broken variant.
    """
    return star_mult(outer, unweighted=True)


def outer_mult(xi, unweighted=False):
    """Flatten the outer two layers of a doubly nested outer polymeasure."""
    flat_spaces = concat_lists(
        [entry for entry in xi.inner_spaces]
    )
    return DiscreteOuterPolymeasure(flat_spaces, _combined_density(xi, unweighted))


def kappa_strength(gammas, unweighted=False):
    """Pair a tuple of polymeasures into one on the concatenated lists.

    Defined as the multiplication of the point mass at the tuple, and
    verified equal to the direct product polymeasure before returning.
    """
    gammas = tuple(gammas)
    outer = DiscreteOuterPolymeasure(
        tuple(g.carriers for g in gammas), {gammas: ONE}
    )
    via_mult = star_mult(outer, unweighted)
    direct = product_polymeasure(list(gammas))
    if via_mult != direct:
        raise SpecError("strength disagrees with the product polymeasure")
    return via_mult


def nu_weaken(gamma, grouping, check_composite=True):
    """Split product-set slots of a polymeasure into their factors.

    ``grouping[i]`` lists the factor carriers of slot i, whose elements
    must be the corresponding tuples in lexicographic order.  The result
    density at a flat tuple reads the density at the grouped tuples; this
    is also computed through the multiplication composite (push the
    polymeasure along slotwise units, then flatten) and compared.
    """
    grouping = tuple(tuple(tuple(c) for c in group) for group in grouping)
    if len(grouping) != gamma.arity:
        raise SpecError("grouping must cover every slot")
    for c, group in zip(gamma.carriers, grouping):
        expected = tuple(product(*group))
        if tuple(c) != expected:
            raise SpecError(
                "slot carrier is not the lexicographic product of its factors"
            )
    density = {}
    for key, v in gamma.density.items():
        flat = concat_lists([tuple(part) for part in key])
        density[flat] = density.get(flat, ZERO) + v
    result = Polymeasure(concat_lists(grouping), density)
    if check_composite:
        # the composite route: push each slot through its unit, then mult
        outer_density = {}
        for key, v in gamma.density.items():
            units = tuple(
                star_unit(tuple(part), group)
                for part, group in zip(key, grouping)
            )
            outer_density[units] = outer_density.get(units, ZERO) + v
        outer = DiscreteOuterPolymeasure(grouping, outer_density)
        if star_mult(outer) != result:
            raise SpecError("weakening disagrees with its mult composite")
    return result


@dataclass
class PolyKernelMorphism:
    """A Kleisli morphism: one input point, a list of output carriers.

    Every row is a polymeasure on the codomain list.
    """

    source: tuple
    codomain: ObjList
    rows: dict

    def __post_init__(self):
        self.source = tuple(self.source)
        self.codomain = tuple(tuple(c) for c in self.codomain)
        for x in self.source:
            row = self.rows.get(x)
            if not isinstance(row, Polymeasure):
                raise SpecError(f"row at {x!r} is not a Polymeasure")
            if tuple(map(tuple, row.carriers)) != self.codomain:
                raise SpecError(f"row at {x!r} is not on the codomain list")

    def row(self, x):
        return self.rows[x]

    def __eq__(self, other):
        if not isinstance(other, PolyKernelMorphism):
            return NotImplemented
        return (
            set(self.source) == set(other.source)
            and self.codomain == other.codomain
            and self.rows == other.rows
        )


def identity_polykernel(carrier):
    carrier = tuple(carrier)
    return PolyKernelMorphism(
        carrier,
        (carrier,),
        {x: star_unit((x,), (carrier,)) for x in carrier},
    )


def discard_morphism():
    """The discard map out of the monoidal unit into the empty list."""
    return PolyKernelMorphism(
        I_CARRIER, (), {(): Polymeasure((), {(): ONE})}
    )


def polykernel_compose(gs, f, unweighted=False):
    """Compose a list of polykernels with one: flatten after pushing rows.

    Requires one g per codomain entry of f, with matching sources.  The
    row at x is the multiplication of the outer layer obtained by pushing
    f's row forward along the g rows.
    """
    gs = list(gs)
    if len(gs) != len(f.codomain):
        raise SpecError("need exactly one following kernel per codomain entry")
    for g, c in zip(gs, f.codomain):
        if set(g.source) != set(c):
            raise SpecError("kernel sources do not match the codomain entries")
    inner_spaces = tuple(g.codomain for g in gs)
    rows = {}
    for x in f.source:
        outer_density = {}
        for key, v in f.row(x).density.items():
            entry = tuple(g.row(y) for g, y in zip(gs, key))
            outer_density[entry] = outer_density.get(entry, ZERO) + v
        outer = DiscreteOuterPolymeasure(inner_spaces, outer_density)
        rows[x] = star_mult(outer, unweighted)
    return PolyKernelMorphism(
        f.source, concat_lists(inner_spaces), rows
    )


def polykernel_tensor(f, g):
    """Tensor two polykernels: pair the sources, pair the rows."""
    source = tuple((x, z) for x in f.source for z in g.source)
    rows = {
        (x, z): kappa_strength((f.row(x), g.row(z)))
        for x in f.source
        for z in g.source
    }
    return PolyKernelMorphism(source, f.codomain + g.codomain, rows)


def weaken_polykernel(f, grouping):
    """Row-wise weakening of a polykernel whose codomain entries are products."""
    rows = {x: nu_weaken(f.row(x), grouping) for x in f.source}
    codomain = concat_lists(
        [tuple(tuple(c) for c in group) for group in grouping]
    )
    return PolyKernelMorphism(f.source, codomain, rows)


# Bracketings: a leaf index, the marker "I", or a pair (left, right).


def bracket_carrier(alpha, carriers):
    """The nested-pair set of a bracketing and its flattener onto tuples."""
    if alpha == "I":
        return I_CARRIER, {(): ()}
    if isinstance(alpha, int):
        c = tuple(carriers[alpha])
        return c, {x: (x,) for x in c}
    left, right = alpha
    lc, lf = bracket_carrier(left, carriers)
    rc, rf = bracket_carrier(right, carriers)
    carrier = tuple((a, b) for a in lc for b in rc)
    flat = {(a, b): lf[a] + rf[b] for a in lc for b in rc}
    return carrier, flat


def rebracket_polykernel(h, alpha, carriers):
    """The coherence action: reroute a nested-pair source onto flat tuples."""
    nested, flat = bracket_carrier(alpha, carriers)
    if set(nested) != set(h.source):
        raise SpecError("bracketing does not match the kernel source")
    flat_carrier = tuple(product(*[tuple(c) for c in carriers]))
    inverse = {}
    for elem, image in flat.items():
        if image in inverse:
            raise SpecError("bracketing flattener is not injective")
        inverse[image] = elem
    rows = {t: h.row(inverse[t]) for t in flat_carrier}
    return PolyKernelMorphism(flat_carrier, h.codomain, rows)


def unbracket_polykernel(k, alpha, carriers):
    """The inverse coherence action: pull a flat source back to nested pairs."""
    nested, flat = bracket_carrier(alpha, carriers)
    rows = {elem: k.row(flat[elem]) for elem in nested}
    return PolyKernelMorphism(nested, k.codomain, rows)


@dataclass
class StarLawConfig:
    seed: int
    draws: int = 200
    grid: int = 4
    max_carrier: int = 3
    max_arity: int = 3
    unweighted_mult: bool = False


@dataclass
class StarLawCheck:
    name: str
    draw: int
    ok: bool
    witness: object = None


@dataclass
class StarLawReport:
    config: StarLawConfig
    checks: list = field(default_factory=list)

    def add(self, name, draw, ok, witness=None):
        self.checks.append(StarLawCheck(name, draw, ok, witness))

    def failures(self):
        return [c for c in self.checks if not c.ok]

    def ok(self):
        return not self.failures()


class _Draws:
    """Seeded random generation of grid-bounded discrete instances."""

    def __init__(self, rng, grid, max_carrier, max_arity):
        self.rng = rng
        self.grid = grid
        self.max_carrier = max_carrier
        self.max_arity = max_arity
        self.counter = 0

    def carrier(self, min_size=1):
        self.counter += 1
        size = self.rng.randint(min_size, self.max_carrier)
        return tuple(f"e{self.counter}_{i}" for i in range(size))

    def obj_list(self, min_arity=0, max_arity=None):
        arity = self.rng.randint(min_arity, max_arity or self.max_arity)
        return tuple(self.carrier() for _ in range(arity))

    def polymeasure(self, carriers):
        points = list(product(*[tuple(c) for c in carriers]))
        cells = [self.rng.randrange(len(points)) for _ in range(self.grid)]
        density = {}
        for cell in cells:
            key = points[cell]
            density[key] = density.get(key, ZERO) + Fraction(1, self.grid)
        return Polymeasure(carriers, density)

    def outer(self, inner_spaces, support_size=None):
        support_size = support_size or self.rng.randint(1, 2)
        entries = []
        for _ in range(support_size):
            entries.append(tuple(self.polymeasure(s) for s in inner_spaces))
        cells = [self.rng.randrange(len(entries)) for _ in range(self.grid)]
        density = {}
        for cell in cells:
            key = entries[cell]
            density[key] = density.get(key, ZERO) + Fraction(1, self.grid)
        return DiscreteOuterPolymeasure(tuple(inner_spaces), density)

    def polykernel(self, source=None, codomain=None):
        source = source if source is not None else self.carrier()
        codomain = codomain if codomain is not None else self.obj_list()
        rows = {x: self.polymeasure(codomain) for x in source}
        return PolyKernelMorphism(source, codomain, rows)

    def bracketing(self, leaves, allow_unit=True):
        """A random binary bracketing of the given leaf indices."""
        items = list(leaves)
        if allow_unit and self.rng.random() < 0.3:
            items.insert(self.rng.randrange(len(items) + 1), "I")
        if not items:
            return "I"

        def build(seq):
            if len(seq) == 1:
                return seq[0]
            cut = self.rng.randint(1, len(seq) - 1)
            return (build(seq[:cut]), build(seq[cut:]))

        return build(items)


def star_law_suite(config):
    """Sample and check the list-monad laws and the op-multicategory axioms.

    Every failure is recorded with the full instance as a witness.  The
    deterministic degenerate battery (empty lists, arity 0, singleton
    carriers) always runs first; random draws follow, seeded and
    reproducible.
    """
    rng = random.Random(config.seed)
    draws = _Draws(rng, config.grid, config.max_carrier, config.max_arity)
    report = StarLawReport(config)
    unweighted = config.unweighted_mult

    def mult(outer):
        return star_mult(outer, unweighted)

    def omult(xi):
        return outer_mult(xi, unweighted)

    def compose(gs, f):
        return polykernel_compose(gs, f, unweighted)

    _degenerate_battery(report, mult, compose, unweighted)

    for draw in range(config.draws):
        shapes = draws.obj_list(min_arity=1)
        gamma = draws.polymeasure(shapes)

        left_in = DiscreteOuterPolymeasure((shapes,), {(gamma,): ONE})
        report.add(
            "left-unit", draw, mult(left_in) == gamma,
            None if mult(left_in) == gamma else (gamma,),
        )

        unit_spaces = tuple((c,) for c in shapes)
        outer_density = {}
        for key, v in gamma.density.items():
            units = tuple(
                star_unit((x,), (c,)) for x, c in zip(key, shapes)
            )
            outer_density[units] = outer_density.get(units, ZERO) + v
        right_in = DiscreteOuterPolymeasure(unit_spaces, outer_density)
        ok = mult(right_in) == gamma
        report.add("right-unit", draw, ok, None if ok else (gamma,))

        n = rng.randint(1, 2)
        middle_shapes = []
        for _ in range(n):
            middle_shapes.append(
                tuple(draws.obj_list(min_arity=1, max_arity=2) for _ in range(rng.randint(1, 2)))
            )
        middles = tuple(
            draws.outer(shape_list) for shape_list in middle_shapes
        )
        xi_entries = [middles]
        second = tuple(draws.outer(s) for s in middle_shapes)
        xi_entries.append(second)
        weights = {}
        for entry in xi_entries:
            weights[entry] = weights.get(entry, ZERO) + Fraction(1, len(xi_entries))
        xi = DiscreteOuterPolymeasure(
            tuple(middle_shapes), weights
        )
        path_a = mult(omult(xi))
        pushed_density = {}
        for key, v in xi.density.items():
            image = tuple(mult(entry) for entry in key)
            pushed_density[image] = pushed_density.get(image, ZERO) + v
        pushed = DiscreteOuterPolymeasure(
            tuple(concat_lists(s) for s in middle_shapes), pushed_density
        )
        path_b = mult(pushed)
        ok = path_a == path_b
        report.add("associativity", draw, ok, None if ok else (xi,))

        gammas = tuple(draws.polymeasure(draws.obj_list()) for _ in range(rng.randint(0, 3)))
        try:
            paired = kappa_strength(gammas, unweighted)
            ok = paired == product_polymeasure(list(gammas))
            witness = None if ok else gammas
        except SpecError:
            ok, witness = False, gammas
        report.add("strength-is-product", draw, ok, witness)

        groups = tuple(
            tuple(draws.carrier() for _ in range(rng.randint(1, 2)))
            for _ in range(rng.randint(1, 2))
        )
        grouped_carriers = tuple(tuple(product(*g)) for g in groups)
        grouped = draws.polymeasure(grouped_carriers)
        try:
            nu_weaken(grouped, groups)
            report.add("weakening-composite", draw, True)
        except SpecError as err:
            report.add("weakening-composite", draw, False, (grouped, str(err)))

        _op_multicategory_checks(report, draws, draw, compose, rng)

    return report


def _degenerate_battery(report, mult, compose, unweighted):
    unit0 = Polymeasure((), {(): ONE})
    empty_outer = DiscreteOuterPolymeasure((), {(): ONE})
    report.add("nullary-mult", -1, mult(empty_outer) == unit0)

    lone = Polymeasure((("s",),), {("s",): ONE})
    outer = DiscreteOuterPolymeasure(((("s",),),), {(lone,): ONE})
    report.add("singleton-left-unit", -1, mult(outer) == lone)

    d = discard_morphism()
    f = identity_polykernel(("p", "q"))
    tensored = polykernel_tensor(f, d)
    ok = all(
        tensored.row((x, ())) == f.row(x) for x in f.source
    ) and tensored.codomain == f.codomain
    report.add("discard-tensor", -1, ok)

    nullary = PolyKernelMorphism(("p",), (), {"p": unit0})
    composed = compose([], nullary)
    report.add("nullary-compose", -1, composed == nullary)


def _op_multicategory_checks(report, draws, draw, compose, rng):
    f = draws.polykernel()

    identities = [identity_polykernel(c) for c in f.codomain]
    ok = compose(identities, f) == f
    report.add("axiom-d-right-unit", draw, ok, None if ok else (f,))

    bracket = compose([f], identity_polykernel(f.source))
    ok = bracket == f
    report.add("axiom-d-left-unit", draw, ok, None if ok else (f,))

    gs = [draws.polykernel(source=c) for c in f.codomain]
    hs2 = [
        [draws.polykernel(source=c) for c in g.codomain] for g in gs
    ]
    gf = compose(gs, f)
    flat_hs = [h for group in hs2 for h in group]
    lhs = compose(flat_hs, gf)
    hg = [compose(group, g) for group, g in zip(hs2, gs)]
    rhs = compose(hg, f)
    ok = lhs == rhs
    report.add("axiom-d-associativity", draw, ok, None if ok else (f, gs, hs2))

    g2 = draws.polykernel()
    hs = [draws.polykernel(source=c) for c in f.codomain]
    ks = [draws.polykernel(source=c) for c in g2.codomain]
    lhs = polykernel_tensor(compose(hs, f), compose(ks, g2))
    rhs = compose(hs + ks, polykernel_tensor(f, g2))
    ok = lhs == rhs
    report.add("axiom-f-interchange", draw, ok, None if ok else (f, g2))

    # axiom (g): coherence round trips and compatibility with composition
    carriers = [draws.carrier() for _ in range(rng.randint(1, 3))]
    alpha = draws.bracketing(range(len(carriers)))
    nested, _flat = bracket_carrier(alpha, carriers)
    h = draws.polykernel(source=nested)
    flat_h = rebracket_polykernel(h, alpha, carriers)
    ok = unbracket_polykernel(flat_h, alpha, carriers) == h
    report.add("axiom-g-round-trip", draw, ok, None if ok else (alpha,))
    gs_h = [draws.polykernel(source=c) for c in h.codomain]
    lhs = rebracket_polykernel(compose(gs_h, h), alpha, carriers)
    rhs = compose(gs_h, flat_h)
    ok = lhs == rhs
    report.add("axiom-g-composition", draw, ok, None if ok else (alpha,))

    # axiom (g): substituting a list of morphisms into an I-free bracketing
    fs = [draws.polykernel(source=c) for c in carriers]
    alpha_free = draws.bracketing(range(len(carriers)), allow_unit=False)
    tensored = _tensor_by_bracketing(alpha_free, fs)
    lhs = rebracket_polykernel(tensored, _source_bracketing(alpha_free), carriers)
    rhs = _tensor_fold(fs)
    ok = lhs == rhs
    report.add("axiom-g-tensor-substitution", draw, ok, None if ok else (alpha_free,))

    # axiom (h): weakening the identity, and the composite weakening law
    groups = tuple(
        tuple(draws.carrier() for _ in range(rng.randint(1, 2)))
        for _ in range(rng.randint(1, 2))
    )
    prod_carriers = tuple(tuple(product(*g)) for g in groups)
    flat_product = tuple(product(*[tuple(c) for c in prod_carriers]))
    ident = PolyKernelMorphism(
        flat_product,
        (flat_product,),
        {t: star_unit((t,), (flat_product,)) for t in flat_product},
    )
    # split the single product slot into the full factor list
    w_ident = weaken_polykernel(ident, (tuple(prod_carriers),))
    tensor_idents = _tensor_fold([identity_polykernel(c) for c in prod_carriers])
    ok = w_ident == tensor_idents
    report.add("axiom-h-identity-weakening", draw, ok, None if ok else (groups,))

    f_grouped = draws.polykernel(codomain=prod_carriers)
    gss = [
        [draws.polykernel(source=c) for c in group] for group in groups
    ]
    flat_gs = [g for group in gss for g in group]
    lhs = compose(flat_gs, weaken_polykernel(f_grouped, groups))
    grouped_tensors = [_tensor_fold(group) for group in gss]
    rhs = compose(grouped_tensors, f_grouped)
    ok = lhs == rhs
    report.add("axiom-h-weakening-law", draw, ok, None if ok else (groups,))


def _tensor_fold(fs):
    """Left-associated tensor of kernels, rebracketed onto flat tuples."""
    fs = list(fs)
    if not fs:
        return discard_morphism()
    out = fs[0]
    for f in fs[1:]:
        out = polykernel_tensor(out, f)
    alpha = _source_bracketing_list(len(fs))
    return rebracket_polykernel(out, alpha, [f.source for f in fs])


def _source_bracketing_list(n):
    """The left-associated bracketing (((0,1),2),..) of n leaves."""
    if n == 0:
        return "I"
    alpha = 0
    for i in range(1, n):
        alpha = (alpha, i)
    return alpha


def _source_bracketing(alpha):
    return alpha


def _tensor_by_bracketing(alpha, fs):
    """Tensor the kernels according to a bracketing (no unit symbols)."""
    if isinstance(alpha, int):
        return fs[alpha]
    if alpha == "I":
        raise SpecError("unit symbols are not allowed in morphism substitution")
    left, right = alpha
    return polykernel_tensor(
        _tensor_by_bracketing(left, fs), _tensor_by_bracketing(right, fs)
    )
