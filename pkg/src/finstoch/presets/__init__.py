"""The named preset catalog, shipped as JSON data files.

Presets give acceptance runs reproducible instances: the one-object
endofunction base, a discrete base, full subcategories of finite sets
with terminal and error-coproduct designations, and the small monoidal
bases used by the convolution and exactness checks.  ``load`` reads the
packaged files; the ``build_*`` functions are the generators the files
were written from, and a test keeps the two in sync.
"""

import json
from importlib import resources
from itertools import product

from ..errors import SpecError
from ..specio import preset_from_dict

__all__ = ["load", "PRESET_NAMES", "build_preset", "write_all"]

PRESET_NAMES = (
    "end2",
    "discrete2",
    "pointed12",
    "finsets3",
    "trivial1",
    "and2",
    "z2",
    "z3",
)


def load(name):
    """Load a packaged preset by name."""
    if name not in PRESET_NAMES:
        raise SpecError(f"unknown preset {name!r}; known: {', '.join(PRESET_NAMES)}")
    text = resources.files("finstoch.presets").joinpath(f"{name}.json").read_text()
    return preset_from_dict(json.loads(text))


def build_preset(name):
    builders = {
        "end2": _build_end2,
        "discrete2": _build_discrete2,
        "pointed12": lambda: _build_finsets("pointed12", (1, 2)),
        "finsets3": lambda: _build_finsets("finsets3", (1, 2, 3)),
        "trivial1": _build_trivial1,
        "and2": _build_and2,
        "z2": lambda: _build_cyclic(2),
        "z3": lambda: _build_cyclic(3),
    }
    if name not in builders:
        raise SpecError(f"unknown preset {name!r}")
    return builders[name]()


def write_all(directory):
    """Regenerate every preset file (development helper)."""
    import pathlib

    directory = pathlib.Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name in PRESET_NAMES:
        data = build_preset(name)
        path = directory / f"{name}.json"
        path.write_text(json.dumps(data, indent=1, sort_keys=True) + "\n")


def _monoid_dict(name, elements, op, unit):
    return {
        "name": name,
        "objects": ["*"],
        "morphisms": [{"id": e, "src": "*", "dst": "*"} for e in elements],
        "compose": [[g, f, op(g, f)] for g in elements for f in elements],
        "identities": {"*": unit},
    }


def _build_end2():
    tables = {
        "id": {"0": "0", "1": "1"},
        "c0": {"0": "0", "1": "0"},
        "c1": {"0": "1", "1": "1"},
        "swap": {"0": "1", "1": "0"},
    }

    def op(g, f):
        composite = {x: tables[g][tables[f][x]] for x in ("0", "1")}
        return next(n for n, t in tables.items() if t == composite)

    data = _monoid_dict("end2", list(tables), op, "id")
    data["functor"] = {
        "on_objects": {"*": ["0", "1"]},
        "on_morphisms": {n: dict(t) for n, t in tables.items()},
    }
    return data


def _build_discrete2():
    return {
        "name": "discrete2",
        "objects": ["*"],
        "morphisms": [{"id": "id", "src": "*", "dst": "*"}],
        "compose": [["id", "id", "id"]],
        "identities": {"*": "id"},
        "functor": {
            "on_objects": {"*": ["x0", "x1"]},
            "on_morphisms": {"id": {"x0": "x0", "x1": "x1"}},
        },
    }


def _build_finsets(name, sizes):
    """Full subcategory of finite sets on canonical carriers of the sizes.

    Morphism names encode function graphs; the size-1 object is terminal,
    and the error coproduct 1+n is designated wherever 1+n is present.
    """
    carriers = {str(n): [str(i) for i in range(n)] for n in sizes}
    morphisms = []
    tables = {}
    for a in sizes:
        for b in sizes:
            src = carriers[str(a)]
            dst = carriers[str(b)]
            for images in product(dst, repeat=len(src)):
                name_m = f"f{a}>{b}:" + "".join(images)
                morphisms.append({"id": name_m, "src": str(a), "dst": str(b)})
                tables[name_m] = dict(zip(src, images))
    compose = []
    for g in morphisms:
        for f in morphisms:
            if f["dst"] != g["src"]:
                continue
            composite = {
                x: tables[g["id"]][tables[f["id"]][x]]
                for x in carriers[f["src"]]
            }
            cname = f"f{f['src']}>{g['dst']}:" + "".join(
                composite[x] for x in carriers[f["src"]]
            )
            compose.append([g["id"], f["id"], cname])
    identities = {
        str(n): f"f{n}>{n}:" + "".join(carriers[str(n)]) for n in sizes
    }
    coproducts = {}
    for n in sizes:
        if n + 1 in sizes:
            # iota1 hits the fresh error point 0; iota2 shifts by one
            iota1 = "f1>" + str(n + 1) + ":0"
            iota2_images = "".join(str(i + 1) for i in range(n))
            iota2 = f"f{n}>{n + 1}:{iota2_images}"
            coproducts[str(n)] = [str(n + 1), iota1, iota2]
    data = {
        "name": name,
        "objects": [str(n) for n in sizes],
        "morphisms": morphisms,
        "compose": compose,
        "identities": identities,
        "functor": {
            "on_objects": {str(n): carriers[str(n)] for n in sizes},
            "on_morphisms": tables,
        },
        "terminal": "1",
    }
    if coproducts:
        data["coproduct_with_1"] = coproducts
    return data


def _build_trivial1():
    return {
        "name": "trivial1",
        "objects": ["*"],
        "morphisms": [{"id": "id", "src": "*", "dst": "*"}],
        "compose": [["id", "id", "id"]],
        "identities": {"*": "id"},
        "functor": {
            "on_objects": {"*": ["u"]},
            "on_morphisms": {"id": {"u": "u"}},
        },
        "terminal": "*",
        "coproduct_with_1": {"*": ["*", "id", "id"]},
        "tensor_obj": {"(*,*)": "*"},
        "tensor_mor": {"(id,id)": "id"},
        "unit": "*",
        "kappa": {"(*,*)": {"(u,u)": "u"}},
        "iota": "u",
    }


def _build_and2():
    data = {
        "name": "and2",
        "objects": ["*"],
        "morphisms": [{"id": "id", "src": "*", "dst": "*"}],
        "compose": [["id", "id", "id"]],
        "identities": {"*": "id"},
        "functor": {
            "on_objects": {"*": ["0", "1"]},
            "on_morphisms": {"id": {"0": "0", "1": "1"}},
        },
        "tensor_obj": {"(*,*)": "*"},
        "tensor_mor": {"(id,id)": "id"},
        "unit": "*",
        "kappa": {
            "(*,*)": {
                f"({a},{b})": "1" if a == "1" and b == "1" else "0"
                for a in "01"
                for b in "01"
            }
        },
        "iota": "1",
    }
    return data


def _build_cyclic(n):
    elements = [f"g{i}" for i in range(n)]

    def op(g, f):
        return f"g{(int(g[1:]) + int(f[1:])) % n}"

    data = _monoid_dict(f"z{n}", elements, op, "g0")
    data["tensor_obj"] = {"(*,*)": "*"}
    data["tensor_mor"] = {
        f"({a},{b})": op(a, b) for a in elements for b in elements
    }
    data["unit"] = "*"
    return data
