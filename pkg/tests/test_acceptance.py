"""Acceptance criteria, one test per criterion, one pass/fail line each.

Run with:  pytest tests/test_acceptance.py -v -s
Expensive artifacts (the 500-instance metric suite, the grid-4 law suite,
the 200-draw list-monad suite) are shared across criteria through
module-scoped fixtures; their runtimes are asserted where a criterion
pins one.
"""

import time
from fractions import Fraction

import pytest

from finstoch.codensity import (
    affine_check,
    codensity_map,
    codensity_object,
    codensity_unit_mult,
    subprob_lift_check,
)
from finstoch.dayconv import (
    binatural_family_count,
    day_convolve,
    day_unit,
    exactness_in_degree,
    find_natural_isomorphism,
)
from finstoch.fincat import nat_set, representable
from finstoch.finprob import (
    broken_flatten_monad,
    distribution_monad,
    inclusion_to_subdistribution,
    law_suite,
    rescaling_kleisli_map,
    subdistribution_monad,
)
from finstoch.metrics import (
    MetricSuiteConfig,
    kantorovich_dual,
    metric_inequality_suite,
    prokhorov,
    three_point_example,
)
from finstoch.polymeasure import (
    Polymeasure,
    extend_to_measure,
    grid_polymeasures,
    measure_to_polymeasure,
)
from finstoch.presets import load as load_preset
from finstoch.starmonad import StarLawConfig, nu_weaken, star_law_suite

F = Fraction
SEED = 20260810


def criterion(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def metric_suite():
    config = MetricSuiteConfig(seed=SEED, draws=500, max_points=6, grid=6)
    start = time.perf_counter()
    report = metric_inequality_suite(config)
    elapsed = time.perf_counter() - start
    return report, elapsed


@pytest.fixture(scope="module")
def grid4_law_suite():
    start = time.perf_counter()
    report = law_suite(
        distribution_monad(),
        [("a",), ("a", "b"), ("a", "b", "c")],
        grid=4,
        second=subdistribution_monad(),
        kleisli_map=inclusion_to_subdistribution(),
        check_strength_reconstruction=True,
    )
    elapsed = time.perf_counter() - start
    return report, elapsed


@pytest.fixture(scope="module")
def star_suite():
    config = StarLawConfig(
        seed=SEED, draws=200, grid=4, max_carrier=3, max_arity=3
    )
    start = time.perf_counter()
    report = star_law_suite(config)
    elapsed = time.perf_counter() - start
    return report, elapsed


def test_criterion_1_kantorovich_counterexample():
    start = time.perf_counter()
    space, p, q = three_point_example()
    dk = kantorovich_dual(p, q, space)
    dp = prokhorov(p, q, space)
    elapsed = time.perf_counter() - start
    criterion(
        1,
        dk == F(3, 10) and dp == F(1, 2) and elapsed < 1.0,
        f"3-point instance: kantorovich={dk}, prokhorov={dp}, {elapsed:.3f}s",
    )


def test_criterion_2_huber_inequality(metric_suite):
    report, elapsed = metric_suite
    huber = [c for c in report.checks if c.name == "huber"]
    gap_dp, gap_dk = report.counterexample_gap
    criterion(
        2,
        len(huber) == 500
        and all(c.ok for c in huber)
        and gap_dp > gap_dk
        and elapsed < 60.0,
        f"squared-prokhorov bound on {len(huber)} instances, "
        f"counterexample gap {gap_dp} > {gap_dk}, {elapsed:.1f}s",
    )


def test_criterion_3_duality_cross_check(metric_suite):
    report, _elapsed = metric_suite
    duality = [c for c in report.checks if c.name == "duality"]
    criterion(
        3,
        len(duality) > 0 and all(c.ok for c in duality),
        f"dual equals primal on {len(duality)} diameter<=1 instances",
    )


def test_criterion_4_distribution_monad_laws(grid4_law_suite):
    report, elapsed = grid4_law_suite
    core = [
        c
        for c in report.checks
        if c.name
        in (
            "left-unit",
            "right-unit",
            "associativity",
            "unit-naturality",
            "mult-naturality",
            "commutativity",
            "affineness",
        )
    ]
    broken = law_suite(broken_flatten_monad(), [("a", "b", "c")], grid=4)
    broken_assoc = [
        c for c in broken.checks if c.name == "associativity" and not c.ok
    ]
    criterion(
        4,
        all(c.ok for c in core)
        and len(broken_assoc) > 0
        and broken_assoc[0].witness is not None
        and elapsed < 120.0,
        f"{len(core)} law checks on the grid-4 enumeration, broken flatten "
        f"witnessed, {elapsed:.1f}s",
    )


def test_criterion_5_codensity_calculator():
    inst = load_preset("end2").codensity_instance()
    t2 = codensity_object(inst, ("a", "b"))
    t3 = codensity_object(inst, ("a", "b", "c"))
    sizes_ok = len(t2) == 2 and len(t3) == 8

    laws_ok = True
    for carrier in [("x",), ("x", "y")]:
        obj = codensity_object(inst, carrier)
        eta, mu = codensity_unit_mult(inst, carrier)
        # defining equations
        for x in carrier:
            for oid in obj.comma.objects:
                _, h = obj.comma.obj_pair(oid)
                laws_ok &= obj.ev(oid, eta[x]) == h[carrier.index(x)]
        double = codensity_object(inst, obj.elements)
        eta2, mu2 = codensity_unit_mult(inst, obj.elements)
        index_of = {oid: i for i, oid in enumerate(obj.comma.objects)}
        for xi in double.elements:
            out = mu[xi]
            for oid in obj.comma.objects:
                x_obj, _h = obj.comma.obj_pair(oid)
                ev_h = tuple(t[index_of[oid]] for t in double.carrier)
                laws_ok &= obj.ev(oid, out) == double.ev(
                    double.comma.obj_id(x_obj, ev_h), xi
                )
        # monad laws
        laws_ok &= all(mu[eta2[t]] == t for t in obj.elements)
        t_eta = codensity_map(inst, eta, carrier, obj.elements)
        laws_ok &= all(mu[t_eta[t]] == t for t in obj.elements)
        triple = codensity_object(inst, double.elements)
        t_mu = codensity_map(inst, mu, double.elements, obj.elements)
        laws_ok &= all(mu[mu2[xi]] == mu[t_mu[xi]] for xi in triple.elements)

    pointed = load_preset("pointed12").codensity_instance()
    aff = affine_check(pointed)
    lift = subprob_lift_check(pointed, ("p",))
    criterion(
        5,
        sizes_ok and laws_ok and aff.ok() and lift.ok(),
        f"|T(2)|={len(t2)}, |T(3)|={len(t3)}, unit/mult equations and monad "
        f"laws exhaustive, affineness and subprobability lift verified",
    )


def test_criterion_6_bimeasure_exactness():
    ok = True
    for carriers in [(("a", "b"), ("x", "y")), (("a", "b"), ("x", "y", "z"))]:
        polys = grid_polymeasures(carriers, 3)
        joints = set()
        for gamma in polys:
            joint = extend_to_measure(gamma)
            ok &= measure_to_polymeasure(joint, carriers) == gamma
            joints.add(joint)
        ok &= len(joints) == len(polys)
        # the reverse route visits every grid-3 joint distribution
        from finstoch.finprob import grid_distributions

        pairs = tuple(p for p in joints.pop().carrier) if joints else ()
        product_carrier = tuple(
            (x, y) for x in carriers[0] for y in carriers[1]
        )
        all_joints = grid_distributions(product_carrier, 3)
        ok &= len(all_joints) == len(polys)
        for dist in all_joints:
            gamma = Polymeasure(
                (product_carrier,), {(t,): v for t, v in dist.weights.items()}
            )
            bim = nu_weaken(gamma, (carriers,))
            ok &= extend_to_measure(bim) == dist
    criterion(
        6,
        ok,
        "extension is a bijection on all grid-3 bimeasures over 2x2 and "
        "2x3, and weakening round-trips exactly",
    )


def test_criterion_7_star_monad_laws(star_suite, tmp_path):
    report, elapsed = star_suite
    unit_assoc = [
        c
        for c in report.checks
        if c.name in ("left-unit", "right-unit", "associativity")
    ]
    axioms = [c for c in report.checks if c.name.startswith("axiom-")]
    degenerate = [c for c in report.checks if c.draw == -1]
    mutant = star_law_suite(
        StarLawConfig(seed=SEED, draws=25, unweighted_mult=True)
    )
    mutant_assoc = [
        c for c in mutant.checks if c.name == "associativity" and not c.ok
    ]
    from finstoch.cli import main

    out = tmp_path / "mutant.json"
    cli_code = main(
        ["starlaws", "--seed", str(SEED), "--draws", "10", "--mutant",
         "--out", str(out)]
    )
    witness_files = list(tmp_path.glob("mutant.json.witness.*.json"))
    criterion(
        7,
        len(unit_assoc) == 600
        and all(c.ok for c in unit_assoc)
        and all(c.ok for c in axioms)
        and degenerate
        and all(c.ok for c in degenerate)
        and mutant_assoc
        and mutant_assoc[0].witness is not None
        and cli_code == 1
        and witness_files
        and elapsed < 300.0,
        f"200 seeded draws pass ({len(axioms)} axiom checks), mutant fails "
        f"associativity with emitted witness, {elapsed:.1f}s",
    )


def test_criterion_8_day_convolution():
    ok = True
    for name in ("z2", "z3"):
        mon = load_preset(name).monoidal
        rep = representable(mon.underlying, "*")
        conv = day_convolve(rep, rep, mon)
        ok &= find_natural_isomorphism(conv, rep) is not None
        unit = day_unit(mon)
        ok &= find_natural_isomorphism(day_convolve(rep, unit, mon), rep) is not None
        ok &= find_natural_isomorphism(day_convolve(unit, rep, mon), rep) is not None
        ok &= len(nat_set(conv, rep)) == binatural_family_count(rep, rep, rep, mon)
    criterion(
        8,
        ok,
        "representable convolutions, unit laws and the hom-tensor "
        "adjunction verified on the 2- and 3-cycle presets",
    )


def test_criterion_9_exactness_checker():
    and2 = load_preset("and2").lax
    trivial = load_preset("trivial1").lax
    v2 = exactness_in_degree(2, [("p",), ("q",)], and2)
    v0 = exactness_in_degree(0, [], and2)
    ok = (
        not v2.exact
        and (v2.lhs_size, v2.rhs_size) == (4, 16)
        and not v0.exact
        and (v0.lhs_size, v0.rhs_size) == (4, 2)
    )
    singles = [("p",), ("q",), ("r",)]
    for degree in range(4):
        ok &= exactness_in_degree(degree, singles[:degree], trivial).exact
    for lax in (and2, trivial):
        ok &= exactness_in_degree(1, [("p", "q")], lax).exact
    criterion(
        9,
        ok,
        f"AND preset inexact in degree 2 ({v2.lhs_size} vs {v2.rhs_size}) "
        f"and degree 0 ({v0.lhs_size} vs {v0.rhs_size}); trivial preset "
        "exact in degrees 0-3; degree 1 exact everywhere",
    )


def test_criterion_10_strength_reconstruction(grid4_law_suite):
    report, _elapsed = grid4_law_suite
    recon = [c for c in report.checks if c.name == "strength-reconstruction"]
    criterion(
        10,
        len(recon) == 9 and all(c.ok for c in recon),
        f"derived monoidal map equals the product strength on "
        f"{len(recon)} carrier pairs over the grid-4 enumeration",
    )


def test_criterion_11_kleisli_law_checker(grid4_law_suite):
    report, _elapsed = grid4_law_suite
    kleisli = [c for c in report.checks if c.name.startswith("kleisli")]
    mutant = law_suite(
        distribution_monad(),
        [("a", "b")],
        grid=4,
        second=subdistribution_monad(),
        kleisli_map=rescaling_kleisli_map(),
    )
    bad = [
        c for c in mutant.checks if c.name.startswith("kleisli") and not c.ok
    ]
    criterion(
        11,
        len(kleisli) == 6
        and all(c.ok for c in kleisli)
        and bad
        and bad[0].witness is not None,
        "inclusion into subdistributions satisfies both Kleisli equations "
        "on the grid; the rescaling mutant fails with a witness",
    )
