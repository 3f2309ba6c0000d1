"""JSON schemas for every value the command-line driver consumes or emits.

Rationals travel as "num/den" strings, so round trips are bit-exact.
Composite keys like distance pairs are encoded "(x,y)"; element names may
therefore not contain parentheses or commas.  Loading validates through
the owning module's constructor, so a malformed file fails with the same
witness a library caller would see.
"""

import json
from fractions import Fraction

from .codensity import CodensityInstance
from .dayconv import LaxMonoidalFunctorData, StrictMonoidalCategory
from .errors import SpecError
from .fincat import FiniteCategory, SetFunctor
from .finprob import Distribution
from .metrics import FiniteMetricSpace
from .polymeasure import Polymeasure
from .rational import format_rational, parse_rational
from .starmonad import PolyKernelMorphism

__all__ = [
    "load_spec",
    "load_file",
    "parse_key",
    "format_key",
    "category_from_dict",
    "category_to_dict",
    "functor_from_dict",
    "distribution_from_dict",
    "distribution_to_dict",
    "metric_space_from_dict",
    "metric_space_to_dict",
    "polymeasure_from_dict",
    "polymeasure_to_dict",
    "polykernel_from_dict",
    "Preset",
    "preset_from_dict",
    "witness_to_json",
]

_FORBIDDEN = set("(),")


def _check_name(name):
    if not isinstance(name, str):
        raise SpecError(f"element names must be strings, got {name!r}")
    if _FORBIDDEN & set(name):
        raise SpecError(
            f"element name {name!r} may not contain parentheses or commas"
        )
    return name


def parse_key(key):
    """Decode "(a,b)" into a tuple, or return a plain name unchanged."""
    if key.startswith("(") and key.endswith(")"):
        inner = key[1:-1]
        if not inner:
            return ()
        return tuple(part.strip() for part in inner.split(","))
    return key


def format_key(value):
    if isinstance(value, tuple):
        return "(" + ",".join(str(v) for v in value) + ")"
    return str(value)


def category_from_dict(d):
    objects = [_check_name(x) for x in d["objects"]]
    morphisms = [(m["id"], m["src"], m["dst"]) for m in d["morphisms"]]
    compose = {(g, f): gf for g, f, gf in d.get("compose", [])}
    cat = FiniteCategory(objects, morphisms, compose, d.get("identities", {}))
    report = cat.validate()
    if report:
        raise SpecError(f"invalid category: {report[0]}")
    return cat


def category_to_dict(cat):
    return {
        "objects": list(cat.objects),
        "morphisms": [
            {"id": m.name, "src": m.src, "dst": m.dst}
            for m in cat.morphisms.values()
        ],
        "compose": [[g, f, gf] for (g, f), gf in sorted(cat.compose.items())],
        "identities": dict(sorted(cat.identities.items())),
    }


def functor_from_dict(d, category):
    on_objects = {x: tuple(v) for x, v in d["on_objects"].items()}
    on_morphisms = {m: dict(t) for m, t in d["on_morphisms"].items()}
    functor = SetFunctor(category, on_objects, on_morphisms)
    report = functor.validate()
    if report:
        raise SpecError(f"invalid functor: {report[0]}")
    return functor


def functor_to_dict(functor):
    return {
        "on_objects": {x: list(v) for x, v in functor.on_objects.items()},
        "on_morphisms": {
            m: dict(sorted(t.items())) for m, t in functor.on_morphisms.items()
        },
    }


def distribution_from_dict(d):
    carrier = tuple(_check_name(x) for x in d["carrier"])
    weights = {x: parse_rational(v) for x, v in d["weights"].items()}
    return Distribution(carrier, weights)


def distribution_to_dict(p):
    return {
        "carrier": list(p.carrier),
        "weights": {
            format_key(x): format_rational(v)
            for x, v in sorted(p.weights.items(), key=lambda kv: repr(kv[0]))
        },
    }


def metric_space_from_dict(d):
    points = tuple(_check_name(x) for x in d["points"])
    dist = {}
    for key, v in d["dist"].items():
        pair = parse_key(key)
        if not isinstance(pair, tuple) or len(pair) != 2:
            raise SpecError(f"distance key {key!r} is not a pair")
        dist[pair] = parse_rational(v)
    return FiniteMetricSpace(points, dist)


def metric_space_to_dict(space):
    pairs = {}
    for (x, y), v in sorted(space.dist.items()):
        if x < y:
            pairs[format_key((x, y))] = format_rational(v)
    return {"points": list(space.points), "dist": pairs}


def polymeasure_from_dict(d):
    carriers = [tuple(_check_name(x) for x in c) for c in d["carriers"]]
    density = {}
    for key, v in d["density"].items():
        parsed = parse_key(key)
        if not isinstance(parsed, tuple):
            parsed = (parsed,)
        density[parsed] = parse_rational(v)
    return Polymeasure(carriers, density)


def polymeasure_to_dict(gamma):
    return {
        "carriers": [list(c) for c in gamma.carriers],
        "density": {
            format_key(k): format_rational(v)
            for k, v in sorted(gamma.density.items(), key=lambda kv: repr(kv[0]))
        },
    }


def polykernel_from_dict(d):
    source = tuple(_check_name(x) for x in d["source"])
    carriers = tuple(tuple(_check_name(x) for x in c) for c in d["carriers"])
    rows = {}
    for x, table in d["rows"].items():
        density = {}
        for key, v in table.items():
            parsed = parse_key(key)
            if not isinstance(parsed, tuple):
                parsed = (parsed,)
            density[parsed] = parse_rational(v)
        rows[x] = Polymeasure(carriers, density)
    return PolyKernelMorphism(source, carriers, rows)


class Preset:
    """A named reproducible instance: a base category with designations."""

    def __init__(self, name, category, functor=None, terminal=None,
                 coproduct_with_1=None, monoidal=None, lax=None):
        self.name = name
        self.category = category
        self.functor = functor
        self.terminal = terminal
        self.coproduct_with_1 = coproduct_with_1 or {}
        self.monoidal = monoidal
        self.lax = lax

    def codensity_instance(self, max_comma_objects=None, max_steps=None):
        if self.functor is None:
            raise SpecError(f"preset {self.name!r} has no functor data")
        inst = CodensityInstance(
            base=self.category,
            k=self.functor,
            terminal=self.terminal,
            coproduct_with_1=dict(self.coproduct_with_1),
            name=self.name,
        )
        if max_comma_objects is not None:
            inst.max_comma_objects = max_comma_objects
        if max_steps is not None:
            inst.max_steps = max_steps
        return inst


def preset_from_dict(d):
    category = category_from_dict(d)
    functor = None
    if "functor" in d:
        functor = functor_from_dict(d["functor"], category)
    monoidal = None
    if "tensor_obj" in d:
        tensor_obj = {}
        for key, v in d["tensor_obj"].items():
            pair = parse_key(key)
            tensor_obj[(pair[0], pair[1])] = v
        tensor_mor = {}
        for key, v in d.get("tensor_mor", {}).items():
            pair = parse_key(key)
            tensor_mor[(pair[0], pair[1])] = v
        monoidal = StrictMonoidalCategory(category, tensor_obj, tensor_mor, d["unit"])
        report = monoidal.validate()
        if report:
            raise SpecError(f"invalid monoidal structure: {report[0]}")
    lax = None
    if "kappa" in d:
        if monoidal is None or functor is None:
            raise SpecError("kappa needs both monoidal structure and functor")
        kappa = {}
        for okey, table in d["kappa"].items():
            opair = parse_key(okey)
            entry = {}
            for ekey, v in table.items():
                epair = parse_key(ekey)
                entry[(epair[0], epair[1])] = v
            kappa[(opair[0], opair[1])] = entry
        lax = LaxMonoidalFunctorData(monoidal, functor, kappa, d["iota"])
        report = lax.validate()
        if report:
            raise SpecError(f"invalid monoidal functor data: {report[0]}")
    coproducts = {
        x: tuple(v) for x, v in d.get("coproduct_with_1", {}).items()
    }
    return Preset(
        d.get("name", ""),
        category,
        functor=functor,
        terminal=d.get("terminal"),
        coproduct_with_1=coproducts,
        monoidal=monoidal,
        lax=lax,
    )


def load_spec(data):
    """Parse a decoded JSON object into its typed value.

    The kind is inferred from the schema fields; returns (kind, value).
    """
    if not isinstance(data, dict):
        raise SpecError("top-level JSON value must be an object")
    if "points" in data:
        return "metric_space", metric_space_from_dict(data)
    if "rows" in data and "carriers" in data:
        return "polykernel", polykernel_from_dict(data)
    if "carriers" in data and "density" in data:
        return "polymeasure", polymeasure_from_dict(data)
    if "carrier" in data and "weights" in data:
        return "distribution", distribution_from_dict(data)
    if "objects" in data:
        extras = {"functor", "terminal", "tensor_obj", "kappa", "coproduct_with_1"}
        if extras & set(data):
            return "preset", preset_from_dict(data)
        return "category", category_from_dict(data)
    if "on_objects" in data:
        raise SpecError(
            "functor files need an inline 'category' object alongside "
            "'on_objects'/'on_morphisms'"
        )
    raise SpecError("unrecognized file schema")


def load_file(path):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as err:
            raise SpecError(f"{path}: line {err.lineno} col {err.colno}: {err.msg}")
    if isinstance(data, dict) and "category" in data and "on_objects" in data:
        category = category_from_dict(data["category"])
        return "functor", functor_from_dict(data, category)
    return load_spec(data)


def witness_to_json(obj):
    """Best-effort JSON form for a failure witness.

    Typed values use their file schemas (so they re-parse through
    load_spec); everything else degrades to a repr string.
    """
    if obj is None:
        return None
    if isinstance(obj, Distribution) and all(
        isinstance(x, str) for x in obj.carrier
    ):
        return {"distribution": distribution_to_dict(obj)}
    if isinstance(obj, Polymeasure) and all(
        isinstance(x, str) for c in obj.carriers for x in c
    ):
        return {"polymeasure": polymeasure_to_dict(obj)}
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, (list, tuple)):
        return [witness_to_json(v) for v in obj]
    if isinstance(obj, (str, int, bool)):
        return obj
    return {"repr": repr(obj)}
