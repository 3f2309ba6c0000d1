"""Batch driver: load JSON specifications, dispatch, emit verdict reports.

Reports are JSON-lines: a header echoing the command and configuration,
then one verdict per line in canonical order (sorted by check
identifier), so identical inputs and seed produce byte-identical files.
Timing goes to stderr only, never into the report.  Exit codes: 0 when
every check passes, 1 when a check failed (witnesses are embedded), 2 for
usage, input, or resource errors.
"""

import argparse
import json
import sys
import time
from dataclasses import dataclass, field

from . import presets
from .codensity import (
    affine_check,
    codensity_map,
    codensity_object,
    codensity_unit_mult,
    subprob_lift_check,
)
from .dayconv import (
    binatural_family_count,
    day_convolve,
    day_unit,
    exactness_in_degree,
    find_natural_isomorphism,
)
from .errors import ResourceError, SpecError
from .fincat import nat_set, representable, validate_category
from .finprob import (
    broken_flatten_monad,
    distribution_monad,
    inclusion_to_subdistribution,
    law_suite,
    rescaling_kleisli_map,
    subdistribution_monad,
)
from .metrics import (
    MetricSuiteConfig,
    kantorovich_dual,
    metric_inequality_suite,
    prokhorov_detail,
    wasserstein_primal,
)
from .polymeasure import extend_to_measure, measure_to_polymeasure
from .rational import format_rational
from .specio import load_file, witness_to_json
from .starmonad import StarLawConfig, star_law_suite

__all__ = ["RunConfig", "Report", "run_command", "emit_report", "main"]


@dataclass
class RunConfig:
    command: str
    options: dict
    seed: int = None
    grid: int = None
    budget: int = None
    out: str = None


@dataclass
class Report:
    command: str
    config: dict
    entries: list = field(default_factory=list)

    def add(self, check_id, ok, **payload):
        entry = {"check": check_id, "ok": bool(ok)}
        entry.update(payload)
        self.entries.append(entry)

    def failed(self):
        return [e for e in self.entries if not e["ok"]]

    def exit_code(self):
        return 1 if self.failed() else 0


def emit_report(report, path=None):
    """Serialize a report as JSON-lines; byte-identical for equal inputs."""
    lines = [
        json.dumps(
            {"command": report.command, "config": report.config},
            sort_keys=True,
            separators=(",", ":"),
        )
    ]
    for entry in sorted(report.entries, key=lambda e: e["check"]):
        lines.append(json.dumps(entry, sort_keys=True, separators=(",", ":")))
    text = "\n".join(lines) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return text


def _carrier(n, prefix="x"):
    return tuple(f"{prefix}{i}" for i in range(n))


def _monad_by_name(name):
    table = {
        "distribution": distribution_monad,
        "subdistribution": subdistribution_monad,
        "broken-mult": broken_flatten_monad,
    }
    if name not in table:
        raise SpecError(f"unknown monad {name!r}; known: {', '.join(table)}")
    return table[name]()


def _cmd_validate(cfg, report):
    kind, value = load_file(cfg.options["file"])
    report.config["kind"] = kind
    if hasattr(value, "validate"):
        violations = value.validate()
        if violations:
            for i, v in enumerate(violations):
                report.add(f"validate.violation.{i:04d}", False, message=v)
            return
    report.add("validate", True, kind=kind)


def _cmd_lawcheck(cfg, report):
    monad = _monad_by_name(cfg.options["monad"])
    sizes = cfg.options["sizes"]
    carriers = [_carrier(n) for n in sizes]
    grid = cfg.grid or 4
    second = None
    kleisli_map = None
    law = cfg.options.get("law")
    if law == "inclusion":
        second, kleisli_map = subdistribution_monad(), inclusion_to_subdistribution()
    elif law == "rescaled":
        second, kleisli_map = subdistribution_monad(), rescaling_kleisli_map()
    elif law:
        raise SpecError(f"unknown kleisli law {law!r}")
    result = law_suite(
        monad,
        carriers,
        grid,
        second=second,
        kleisli_map=kleisli_map,
        check_strength_reconstruction=cfg.options.get("strength", False),
    )
    for check in result.checks:
        report.add(
            f"{check.name}[{check.detail}]",
            check.ok,
            witness=witness_to_json(check.witness),
        )


def _cmd_codensity(cfg, report):
    preset = presets.load(cfg.options["preset"])
    inst = preset.codensity_instance(max_comma_objects=cfg.budget)
    n = cfg.options["carrier_size"]
    carrier = _carrier(n)
    obj = codensity_object(inst, carrier)
    report.add("codensity.size", True, carrier_size=n, t_size=len(obj.elements))
    if cfg.options.get("laws"):
        eta, mu = codensity_unit_mult(inst, carrier)
        double = codensity_object(inst, obj.elements)
        eta2, mu2 = codensity_unit_mult(inst, obj.elements)
        left = all(mu[eta2[t]] == t for t in obj.elements)
        report.add("codensity.left-unit", left)
        t_eta = codensity_map(inst, eta, carrier, obj.elements)
        right = all(mu[t_eta[t]] == t for t in obj.elements)
        report.add("codensity.right-unit", right)
        triple = codensity_object(inst, double.elements)
        t_mu = codensity_map(inst, mu, double.elements, obj.elements)
        assoc = all(mu[mu2[xi]] == mu[t_mu[xi]] for xi in triple.elements)
        report.add("codensity.associativity", assoc)
    if preset.terminal is not None:
        aff = affine_check(inst)
        report.add("codensity.affine", aff.ok(), failures=aff.failures)
        if preset.coproduct_with_1:
            lift = subprob_lift_check(inst, carrier)
            report.add(
                "codensity.subprob-lift",
                lift.ok(),
                lhs=lift.lhs_size,
                rhs=lift.rhs_size,
            )


def _cmd_day(cfg, report):
    preset = presets.load(cfg.options["preset"])
    if preset.monoidal is None:
        raise SpecError(f"preset {preset.name!r} has no monoidal structure")
    mon = preset.monoidal
    rep = representable(mon.underlying, "*")
    conv = day_convolve(rep, rep, mon)
    iso = find_natural_isomorphism(conv, rep)
    report.add(
        "day.representable-square",
        iso is not None,
        size=len(conv.obj("*")),
    )
    unit = day_unit(mon)
    right = day_convolve(rep, unit, mon)
    left = day_convolve(unit, rep, mon)
    report.add("day.right-unit", find_natural_isomorphism(right, rep) is not None)
    report.add("day.left-unit", find_natural_isomorphism(left, rep) is not None)
    count_nat = len(nat_set(conv, rep))
    count_binat = binatural_family_count(rep, rep, rep, mon)
    report.add(
        "day.hom-tensor-adjunction",
        count_nat == count_binat,
        nat=count_nat,
        binatural=count_binat,
    )


def _cmd_exactness(cfg, report):
    preset = presets.load(cfg.options["preset"])
    if preset.lax is None:
        raise SpecError(f"preset {preset.name!r} has no monoidal functor data")
    degree = cfg.options["degree"]
    sizes = cfg.options["carriers"]
    if len(sizes) != degree:
        raise SpecError("need exactly one carrier size per degree")
    carriers = [_carrier(n, prefix=f"c{i}_") for i, n in enumerate(sizes)]
    verdict = exactness_in_degree(
        degree, carriers, preset.lax, max_comma_objects=cfg.budget
    )
    report.add(
        f"exactness.degree{degree}",
        True,
        exact=verdict.exact,
        lhs=verdict.lhs_size,
        rhs=verdict.rhs_size,
        witness=witness_to_json(verdict.witness),
    )


def _cmd_polymeasure(cfg, report):
    kind, value = load_file(cfg.options["file"])
    if kind != "polymeasure":
        raise SpecError(f"expected a polymeasure file, got {kind}")
    report.add("polymeasure.valid", True, arity=value.arity)
    joint = extend_to_measure(value)
    back = (
        measure_to_polymeasure(joint, value.carriers)
        if value.arity != 1
        else value
    )
    report.add("polymeasure.extension-round-trip", back == value)


def _cmd_starlaws(cfg, report):
    if cfg.seed is None:
        raise SpecError("starlaws requires an explicit --seed")
    config = StarLawConfig(
        seed=cfg.seed,
        draws=cfg.options["draws"],
        grid=cfg.grid or 4,
        max_carrier=cfg.options["max_carrier"],
        max_arity=cfg.options["max_arity"],
        unweighted_mult=cfg.options.get("mutant", False),
    )
    result = star_law_suite(config)
    witness_paths = []
    for i, check in enumerate(result.checks):
        payload = {}
        if not check.ok and check.witness is not None:
            payload["witness"] = witness_to_json(check.witness)
            if cfg.out:
                wpath = f"{cfg.out}.witness.{len(witness_paths):03d}.json"
                with open(wpath, "w", encoding="utf-8") as fh:
                    json.dump(payload["witness"], fh, sort_keys=True, indent=1)
                witness_paths.append(wpath)
        report.add(f"{check.name}#{check.draw:05d}", check.ok, **payload)
    if witness_paths:
        report.config["witness_files"] = witness_paths


def _cmd_kantorovich(cfg, report):
    _kind, space = load_file(cfg.options["space"])
    _kind, p = load_file(cfg.options["p"])
    _kind, q = load_file(cfg.options["q"])
    value = kantorovich_dual(p, q, space)
    primal = wasserstein_primal(p, q, space)
    report.add("kantorovich", True, value=format_rational(value))
    report.add(
        "kantorovich.duality",
        space.diameter() > 1 or value == primal,
        primal=format_rational(primal),
    )


def _cmd_prokhorov(cfg, report):
    _kind, space = load_file(cfg.options["space"])
    _kind, p = load_file(cfg.options["p"])
    _kind, q = load_file(cfg.options["q"])
    value, attained, witness = prokhorov_detail(p, q, space)
    report.add(
        "prokhorov",
        True,
        value=format_rational(value),
        attained=attained,
        subset=list(witness),
    )


def _cmd_metric_suite(cfg, report):
    if cfg.seed is None:
        raise SpecError("metric-suite requires an explicit --seed")
    config = MetricSuiteConfig(
        seed=cfg.seed,
        draws=cfg.options["draws"],
        max_points=cfg.options["max_points"],
        grid=cfg.grid or 6,
    )
    result = metric_inequality_suite(config)
    for check in result.checks:
        payload = {}
        if check.name.startswith("counterexample"):
            payload["witness"] = witness_to_json(check.witness)
        elif not check.ok:
            payload["witness"] = witness_to_json(check.witness)
        report.add(f"{check.name}#{check.draw:05d}", check.ok, **payload)
    dp, dk = result.counterexample_gap
    report.config["counterexample_gap"] = [
        format_rational(dp),
        format_rational(dk),
    ]


_HANDLERS = {
    "validate": _cmd_validate,
    "lawcheck": _cmd_lawcheck,
    "codensity": _cmd_codensity,
    "day": _cmd_day,
    "exactness": _cmd_exactness,
    "polymeasure": _cmd_polymeasure,
    "starlaws": _cmd_starlaws,
    "kantorovich": _cmd_kantorovich,
    "prokhorov": _cmd_prokhorov,
    "metric-suite": _cmd_metric_suite,
}


def run_command(cfg):
    """Dispatch a parsed configuration; returns (exit_code, Report)."""
    report = Report(cfg.command, dict(_public_config(cfg)))
    handler = _HANDLERS.get(cfg.command)
    if handler is None:
        raise SpecError(f"unknown command {cfg.command!r}")
    handler(cfg, report)
    return report.exit_code(), report


def _public_config(cfg):
    out = {"seed": cfg.seed, "grid": cfg.grid, "budget": cfg.budget}
    out.update(cfg.options)
    return {k: v for k, v in out.items() if v is not None}


def _build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--grid", type=int, default=None)
    common.add_argument("--budget", type=int, default=None)
    common.add_argument("--out", default=None)

    parser = argparse.ArgumentParser(
        prog="finstoch",
        description="exact categorical probability computations on finite data",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common])
    p.add_argument("--file", required=True)

    p = sub.add_parser("lawcheck", parents=[common])
    p.add_argument("--monad", required=True)
    p.add_argument("--sizes", default="1,2")
    p.add_argument("--law", default=None)
    p.add_argument("--strength", action="store_true")

    p = sub.add_parser("codensity", parents=[common])
    p.add_argument("--preset", required=True)
    p.add_argument("--carrier-size", type=int, required=True)
    p.add_argument("--laws", action="store_true")

    p = sub.add_parser("day", parents=[common])
    p.add_argument("--preset", required=True)

    p = sub.add_parser("exactness", parents=[common])
    p.add_argument("--preset", required=True)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--carriers", default="")

    p = sub.add_parser("polymeasure", parents=[common])
    p.add_argument("--file", required=True)

    p = sub.add_parser("starlaws", parents=[common])
    p.add_argument("--draws", type=int, default=200)
    p.add_argument("--max-carrier", type=int, default=3)
    p.add_argument("--max-arity", type=int, default=3)
    p.add_argument("--mutant", action="store_true")

    p = sub.add_parser("kantorovich", parents=[common])
    p.add_argument("--space", required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)

    p = sub.add_parser("prokhorov", parents=[common])
    p.add_argument("--space", required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)

    p = sub.add_parser("metric-suite", parents=[common])
    p.add_argument("--draws", type=int, default=500)
    p.add_argument("--max-points", type=int, default=6)

    return parser


def _config_from_args(args):
    skip = {"command", "seed", "grid", "budget", "out"}
    options = {}
    for key, value in vars(args).items():
        if key in skip:
            continue
        if key == "sizes" or key == "carriers":
            options[key] = [int(s) for s in value.split(",") if s != ""]
        else:
            options[key] = value
    return RunConfig(
        command=args.command,
        options=options,
        seed=args.seed,
        grid=args.grid,
        budget=args.budget,
        out=args.out,
    )


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return 2 if err.code not in (0, None) else 0
    cfg = _config_from_args(args)
    started = time.perf_counter()
    try:
        code, report = run_command(cfg)
    except ResourceError as err:
        sys.stderr.write(f"resource error: {err}\n")
        return 2
    except SpecError as err:
        sys.stderr.write(f"error: {err}\n")
        return 2
    except OSError as err:
        sys.stderr.write(f"i/o error: {err}\n")
        return 2
    emit_report(report, cfg.out)
    elapsed = time.perf_counter() - started
    sys.stderr.write(f"{cfg.command}: {len(report.entries)} checks in {elapsed:.2f}s\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
