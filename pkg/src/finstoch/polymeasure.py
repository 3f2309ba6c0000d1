"""Finite probability polymeasures: set functions additive in every slot.

On finite carriers, separate additivity makes the singleton-tuple density
a complete invariant, so a polymeasure is stored canonically as a density
table on k-tuples of points; values on general subset tuples are derived
by summation on demand.  That makes existence and uniqueness of the
extension to a joint distribution structural, which is exactly the
finite-scale behaviour being demonstrated.  The interesting negative
tests live in :func:`validate_polymeasure`, which accepts a redundant
full table so additivity violations are detectable.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .errors import SpecError
from .finprob import Distribution

__all__ = [
    "Polymeasure",
    "PolyKernel",
    "PolymeasureValidation",
    "validate_polymeasure",
    "integrate",
    "product_polymeasure",
    "extend_to_measure",
    "measure_to_polymeasure",
    "push_polymeasure",
    "permute_slots",
    "all_subset_tuples",
    "grid_polymeasures",
]

ZERO = Fraction(0)
ONE = Fraction(1)


class Polymeasure:
    """A probability k-polymeasure in canonical singleton-density form.

    ``carriers`` is a tuple of k finite sets; ``density`` maps k-tuples of
    points to nonnegative Fractions summing to 1 (zeros dropped).  The
    arity-0 polymeasure has a single empty-tuple entry of weight 1.
    """

    def __init__(self, carriers, density):
        self.carriers = tuple(tuple(c) for c in carriers)
        carrier_sets = [set(c) for c in self.carriers]
        d = {}
        total = ZERO
        for key, v in density.items():
            key = tuple(key)
            v = Fraction(v)
            if len(key) != len(self.carriers):
                raise SpecError(f"density key {key!r} has wrong arity")
            for x, cs in zip(key, carrier_sets):
                if x not in cs:
                    raise SpecError(f"density point {x!r} outside its carrier")
            if v < 0:
                raise SpecError(f"negative density {v} at {key!r}")
            if v != 0:
                d[key] = v
                total += v
        if total != 1:
            raise SpecError(f"density sums to {total}, expected 1")
        self.density = d

    @property
    def arity(self):
        return len(self.carriers)

    def value(self, subsets):
        """The polymeasure value on a tuple of subsets, derived by summation."""
        subsets = [set(s) for s in subsets]
        if len(subsets) != self.arity:
            raise SpecError("subset tuple has wrong arity")
        out = ZERO
        for key, v in self.density.items():
            if all(x in s for x, s in zip(key, subsets)):
                out += v
        return out

    def support(self):
        return tuple(sorted(self.density, key=repr))

    def __eq__(self, other):
        if not isinstance(other, Polymeasure):
            return NotImplemented
        return (
            tuple(map(set, self.carriers)) == tuple(map(set, other.carriers))
            and self.density == other.density
        )

    def __hash__(self):
        return hash(
            (
                tuple(frozenset(c) for c in self.carriers),
                frozenset(self.density.items()),
            )
        )

    def __repr__(self):
        body = ", ".join(f"{k!r}: {v}" for k, v in sorted(self.density.items(), key=lambda kv: repr(kv[0])))
        return f"Polymeasure(arity={self.arity}, {{{body}}})"


@dataclass
class PolyKernel:
    """A map from a finite set into a polymeasure space: one row per point."""

    source: tuple
    targets: tuple
    rows: dict

    def __post_init__(self):
        self.source = tuple(self.source)
        self.targets = tuple(tuple(t) for t in self.targets)
        for x in self.source:
            row = self.rows.get(x)
            if not isinstance(row, Polymeasure):
                raise SpecError(f"row at {x!r} is not a Polymeasure")
            if tuple(map(set, row.carriers)) != tuple(map(set, self.targets)):
                raise SpecError(f"row at {x!r} has mismatched carriers")

    def __call__(self, x):
        return self.rows[x]


def all_subset_tuples(carriers):
    """Every tuple of subsets, one subset per carrier, as frozensets."""
    per_carrier = []
    for c in carriers:
        c = tuple(c)
        subsets = []
        for mask in range(1 << len(c)):
            subsets.append(frozenset(x for i, x in enumerate(c) if mask >> i & 1))
        per_carrier.append(subsets)
    return tuple(product(*per_carrier))


@dataclass
class PolymeasureValidation:
    ok: bool
    violations: list
    canonical: object  # Polymeasure on success, else None


def validate_polymeasure(raw, carriers):
    """Check a full subset-tuple table for slotwise additivity.

    ``raw`` maps tuples of frozensets to Fractions and must be total.
    Checks: totality; normalization on the full tuple; nonnegative
    singleton values; additivity gamma(..., A u B, ...) =
    gamma(..., A, ...) + gamma(..., B, ...) for every slot, every disjoint
    pair, and every choice of the other coordinates.  On success the
    canonical singleton-density form is returned.
    """
    carriers = tuple(tuple(c) for c in carriers)
    violations = []
    table = {tuple(frozenset(s) for s in key): Fraction(v) for key, v in raw.items()}
    expected_keys = all_subset_tuples(carriers)
    missing = [k for k in expected_keys if k not in table]
    if missing:
        violations.append(f"table is missing {len(missing)} subset tuples, e.g. {missing[0]!r}")
        return PolymeasureValidation(False, violations, None)
    full = tuple(frozenset(c) for c in carriers)
    if table[full] != 1:
        violations.append(f"normalization fails: value on the full tuple is {table[full]}")
    for key in product(*[list(c) for c in carriers]):
        singleton = tuple(frozenset((x,)) for x in key)
        if table[singleton] < 0:
            violations.append(f"negative value {table[singleton]} at {key!r}")
    k = len(carriers)
    for slot in range(k):
        others = [
            all_subsets
            for i, all_subsets in enumerate(
                [[frozenset(s) for s in _subsets(c)] for c in carriers]
            )
            if i != slot
        ]
        slot_subsets = [frozenset(s) for s in _subsets(carriers[slot])]
        for a in slot_subsets:
            for b in slot_subsets:
                if a & b:
                    continue
                union = a | b
                for rest in product(*others):
                    key_a = _insert(rest, slot, a)
                    key_b = _insert(rest, slot, b)
                    key_u = _insert(rest, slot, union)
                    if table[key_u] != table[key_a] + table[key_b]:
                        violations.append(
                            f"additivity fails in slot {slot} on pair "
                            f"({sorted(a, key=repr)}, {sorted(b, key=repr)}) "
                            f"with others {tuple(sorted(r, key=repr) for r in rest)!r}: "
                            f"{table[key_u]} != {table[key_a]} + {table[key_b]}"
                        )
    if violations:
        return PolymeasureValidation(False, violations, None)
    density = {}
    for key in product(*[list(c) for c in carriers]):
        singleton = tuple(frozenset((x,)) for x in key)
        density[key] = table[singleton]
    pm = Polymeasure(carriers, density)
    return PolymeasureValidation(True, [], pm)


def _subsets(carrier):
    carrier = tuple(carrier)
    for mask in range(1 << len(carrier)):
        yield tuple(x for i, x in enumerate(carrier) if mask >> i & 1)


def _insert(rest, slot, value):
    out = list(rest)
    out.insert(slot, value)
    return tuple(out)


def integrate(fs, gamma):
    """Integrate a tuple of [0,1]-valued functions against a polymeasure.

    The value is the density-weighted sum of products of the function
    values; it is multilinear in each slot, and on indicator functions it
    recovers the polymeasure value on the indicated subsets.
    """
    if len(fs) != gamma.arity:
        raise SpecError("need exactly one integrand per slot")
    tables = []
    for f, c in zip(fs, gamma.carriers):
        if callable(f) and not isinstance(f, dict):
            f = {x: f(x) for x in c}
        missing = [x for x in c if x not in f]
        if missing:
            raise SpecError(f"integrand not defined at {missing[:3]!r}")
        tables.append(f)
    out = ZERO
    for key, v in gamma.density.items():
        term = v
        for x, f in zip(key, tables):
            term *= Fraction(f[x])
        out += term
    return out


def indicator(subset, carrier):
    subset = set(subset)
    return {x: ONE if x in subset else ZERO for x in carrier}


def product_polymeasure(parts):
    """The product polymeasure: density is the product over the parts.

    Arities add; the empty list gives the arity-0 polymeasure.
    """
    carriers = tuple(c for p in parts for c in p.carriers)
    density = {}
    keys = [list(p.density.items()) for p in parts]
    for combo in product(*keys):
        key = tuple(x for part_key, _v in combo for x in part_key)
        v = ONE
        for _part_key, w in combo:
            v *= w
        density[key] = v
    if not parts:
        density = {(): ONE}
    return Polymeasure(carriers, density)


def product_carrier_of(gamma):
    """The product of the carriers, as flat k-tuples in lexicographic order."""
    return tuple(product(*gamma.carriers))


def extend_to_measure(gamma, verify=True):
    """The unique joint distribution with the same rectangle values.

    On finite carriers this always succeeds: the joint weight at a point
    tuple is the singleton density.  With ``verify``, every rectangle
    tuple is re-checked against the derived evaluator.  Arity 1 returns a
    distribution on the original carrier (an identity round trip); other
    arities use the flat tuple carrier.
    """
    if gamma.arity == 1:
        carrier = gamma.carriers[0]
        dist = Distribution(carrier, {k[0]: v for k, v in gamma.density.items()})
        if verify:
            for s in _subsets(carrier):
                if dist.mass(s) != gamma.value((s,)):
                    raise SpecError("rectangle verification failed")
        return dist
    carrier = product_carrier_of(gamma)
    dist = Distribution(carrier, dict(gamma.density))
    if verify:
        for rect in all_subset_tuples(gamma.carriers):
            box = {key for key in carrier if all(x in s for x, s in zip(key, rect))}
            if dist.mass(box) != gamma.value(rect):
                raise SpecError("rectangle verification failed")
    return dist


def measure_to_polymeasure(dist, carriers):
    """Restrict a joint distribution on the flat product to rectangles."""
    carriers = tuple(tuple(c) for c in carriers)
    density = {}
    for key, v in dist.weights.items():
        key = tuple(key)
        if len(key) != len(carriers):
            raise SpecError("distribution points are not tuples of the right arity")
        density[key] = v
    return Polymeasure(carriers, density)


def push_polymeasure(fs, gamma, targets=None):
    """Push a polymeasure forward along one total function per slot.

    The value on a subset tuple is the value on the preimage tuple, so the
    density at a target tuple sums the density over its fiber.  Target
    carriers default to the images.
    """
    if len(fs) != gamma.arity:
        raise SpecError("need exactly one function per slot")
    tables = []
    for f, c in zip(fs, gamma.carriers):
        if callable(f) and not isinstance(f, dict):
            f = {x: f(x) for x in c}
        missing = [x for x in c if x not in f]
        if missing:
            raise SpecError(f"function not total: missing {missing[:3]!r}")
        tables.append(f)
    if targets is None:
        targets = []
        for f, c in zip(tables, gamma.carriers):
            seen = []
            for x in c:
                if f[x] not in seen:
                    seen.append(f[x])
            targets.append(tuple(seen))
    else:
        targets = [tuple(t) for t in targets]
        for f, c, t in zip(tables, gamma.carriers, targets):
            outside = [x for x in c if f[x] not in set(t)]
            if outside:
                raise SpecError(f"function leaves its target at {outside[:3]!r}")
    density = {}
    for key, v in gamma.density.items():
        new_key = tuple(f[x] for f, x in zip(tables, key))
        density[new_key] = density.get(new_key, ZERO) + v
    return Polymeasure(targets, density)


def permute_slots(gamma, sigma):
    """Reorder the slots of a polymeasure by a permutation of indices.

    ``sigma`` lists, for each output slot, which input slot it reads.
    """
    sigma = tuple(sigma)
    if sorted(sigma) != list(range(gamma.arity)):
        raise SpecError("not a permutation of the slots")
    carriers = tuple(gamma.carriers[i] for i in sigma)
    density = {}
    for key, v in gamma.density.items():
        density[tuple(key[i] for i in sigma)] = v
    return Polymeasure(carriers, density)


def grid_polymeasures(carriers, grid):
    """All polymeasures on the carriers with densities of denominator grid."""
    from .finprob import grid_distributions

    carriers = tuple(tuple(c) for c in carriers)
    points = tuple(product(*carriers))
    out = []
    for dist in grid_distributions(points, grid):
        out.append(Polymeasure(carriers, dict(dist.weights)))
    return tuple(out)
