"""Exact Kantorovich and Prokhorov metrics on finite metric spaces.

The Kantorovich distance is the exact optimum of the potential linear
program (potentials valued in [0,1], non-expansive), solved by rational
simplex; a vertex-enumeration oracle cross-checks small spaces.  The
Prokhorov distance is computed per subset by breakpoint analysis of the
closed fattening, never by bisection: the infimum can sit exactly at a
breakpoint, and only the closed convention attains it there.
"""

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product

from .errors import ResourceError, SpecError
from .finprob import Distribution, grid_distributions
from .simplex import gaussian_solve, solve_max, solve_min

__all__ = [
    "FiniteMetricSpace",
    "kantorovich_dual",
    "kantorovich_by_vertices",
    "wasserstein_primal",
    "prokhorov",
    "prokhorov_detail",
    "MetricSuiteConfig",
    "metric_inequality_suite",
    "three_point_example",
]

ZERO = Fraction(0)
ONE = Fraction(1)

MAX_PROKHOROV_POINTS = 16


class FiniteMetricSpace:
    """A finite point set with an exact rational distance matrix.

    Distances are validated on construction: zero diagonal, symmetry,
    strict positivity off the diagonal, and the triangle inequality.
    """

    def __init__(self, points, dist):
        self.points = tuple(points)
        d = {}
        for (x, y), v in dist.items():
            d[(x, y)] = Fraction(v)
        for x in self.points:
            d.setdefault((x, x), ZERO)
        for x, y in combinations(self.points, 2):
            if (x, y) in d and (y, x) not in d:
                d[(y, x)] = d[(x, y)]
            if (y, x) in d and (x, y) not in d:
                d[(x, y)] = d[(y, x)]
        self.dist = d
        for x in self.points:
            if self.d(x, x) != 0:
                raise SpecError(f"nonzero self-distance at {x!r}")
        for x, y in combinations(self.points, 2):
            if (x, y) not in d:
                raise SpecError(f"missing distance ({x!r},{y!r})")
            if d[(x, y)] != d[(y, x)]:
                raise SpecError(f"asymmetric distance at ({x!r},{y!r})")
            if d[(x, y)] <= 0:
                raise SpecError(f"non-positive distance at ({x!r},{y!r})")
        for x in self.points:
            for y in self.points:
                for z in self.points:
                    if self.d(x, z) > self.d(x, y) + self.d(y, z):
                        raise SpecError(
                            f"triangle inequality fails on ({x!r},{y!r},{z!r})"
                        )

    def d(self, x, y):
        return self.dist[(x, y)]

    def d_to_set(self, x, subset):
        return min(self.d(x, a) for a in subset)

    def diameter(self):
        if len(self.points) < 2:
            return ZERO
        return max(self.d(x, y) for x, y in combinations(self.points, 2))

    def __repr__(self):
        return f"FiniteMetricSpace({len(self.points)} points)"


def _check_carriers(p, q, space):
    pts = set(space.points)
    if set(p.carrier) != pts or set(q.carrier) != pts:
        raise SpecError("distributions do not live on the metric space")


def _potential_lp(signed, space):
    """Maximize sum signed(x) h(x) over non-expansive h with 0 <= h <= 1.

    Standard form: one slack per constraint; h_x - h_y <= d(x,y) for every
    ordered pair, h_x <= 1 for every point.
    """
    pts = space.points
    n = len(pts)
    index = {x: i for i, x in enumerate(pts)}
    rows = []
    rhs = []
    for x in pts:
        for y in pts:
            if x == y:
                continue
            row = [ZERO] * n
            row[index[x]] = ONE
            row[index[y]] = -ONE
            rows.append(row)
            rhs.append(space.d(x, y))
    for x in pts:
        row = [ZERO] * n
        row[index[x]] = ONE
        rows.append(row)
        rhs.append(ONE)
    m = len(rows)
    a_rows = []
    for i, row in enumerate(rows):
        slack = [ONE if j == i else ZERO for j in range(m)]
        a_rows.append(row + slack)
    c = [signed.get(x, ZERO) for x in pts] + [ZERO] * m
    # the slack columns are a feasible identity basis (rhs is nonnegative)
    value, _x = solve_max(c, a_rows, rhs, basis=[n + i for i in range(m)])
    return value


def kantorovich_dual(p, q, space):
    """The exact Kantorovich distance via the potential linear program.

    Both sign orientations are solved and must agree (replacing h by 1-h
    flips the objective), which doubles as an internal consistency check.
    """
    _check_carriers(p, q, space)
    signed = {x: p.weight(x) - q.weight(x) for x in space.points}
    forward = _potential_lp(signed, space)
    backward = _potential_lp({x: -v for x, v in signed.items()}, space)
    if forward != backward:
        raise SpecError("orientation solves disagree; simplex is broken")
    return forward


def kantorovich_by_vertices(p, q, space):
    """Cross-check oracle: enumerate the vertices of the potential polytope.

    Only for spaces with at most 5 points; every choice of n active
    constraints is solved exactly and filtered for feasibility.
    """
    _check_carriers(p, q, space)
    pts = space.points
    n = len(pts)
    if n > 5:
        raise ResourceError("vertex enumeration is capped at 5 points")
    index = {x: i for i, x in enumerate(pts)}
    constraints = []  # (coefficients, rhs) with a.h <= rhs
    for x in pts:
        for y in pts:
            if x == y:
                continue
            row = [ZERO] * n
            row[index[x]] = ONE
            row[index[y]] = -ONE
            constraints.append((row, space.d(x, y)))
    for x in pts:
        row = [ZERO] * n
        row[index[x]] = ONE
        constraints.append((row, ONE))
        row2 = [ZERO] * n
        row2[index[x]] = -ONE
        constraints.append((row2, ZERO))
    signed = [p.weight(x) - q.weight(x) for x in pts]
    best = ZERO
    for combo in combinations(range(len(constraints)), n):
        a = [constraints[i][0] for i in combo]
        b = [constraints[i][1] for i in combo]
        h = gaussian_solve(a, b)
        if h is None:
            continue
        feasible = all(
            sum((ai * hi for ai, hi in zip(row, h)), ZERO) <= rhs
            for row, rhs in constraints
        )
        if not feasible:
            continue
        value = sum((s * hi for s, hi in zip(signed, h)), ZERO)
        if abs(value) > best:
            best = abs(value)
    return best


def wasserstein_primal(p, q, space):
    """Exact minimum transport cost between two distributions.

    Couplings are the nonnegative matrices with the two marginals; the
    cost is the distance-weighted mass.  This is an independent route to
    the Kantorovich value whenever the diameter is at most 1.
    """
    _check_carriers(p, q, space)
    pts = space.points
    n = len(pts)
    var = {(x, y): i for i, (x, y) in enumerate(product(pts, pts))}
    a_rows = []
    rhs = []
    for x in pts:
        row = [ZERO] * len(var)
        for y in pts:
            row[var[(x, y)]] = ONE
        a_rows.append(row)
        rhs.append(p.weight(x))
    for y in pts:
        row = [ZERO] * len(var)
        for x in pts:
            row[var[(x, y)]] = ONE
        a_rows.append(row)
        rhs.append(q.weight(y))
    c = [ZERO] * len(var)
    for (x, y), i in var.items():
        c[i] = space.d(x, y)
    value, _plan = solve_min(c, a_rows, rhs)
    return value


def _min_alpha_for_subset(p_mass, subset, q, space):
    """The least alpha with p(A) <= q(closed fattening of A) + alpha."""
    breakpoints = sorted({space.d_to_set(x, subset) for x in space.points})
    q_at = []
    for b in breakpoints:
        q_at.append(
            sum(
                (q.weight(x) for x in space.points if space.d_to_set(x, subset) <= b),
                ZERO,
            )
        )
    for i, b in enumerate(breakpoints):
        candidate = max(b, p_mass - q_at[i])
        if i + 1 == len(breakpoints) or candidate < breakpoints[i + 1]:
            return candidate
    raise AssertionError("breakpoint sweep cannot fall through")


def prokhorov_detail(p, q, space):
    """The exact Prokhorov distance with its attaining subset.

    Returns (value, attained, subset).  On finite spaces the closed
    fattening makes the infimum a minimum, so attained is always True;
    it is reported explicitly because the defining formula is an infimum
    over positive alpha.
    """
    _check_carriers(p, q, space)
    pts = space.points
    if len(pts) > MAX_PROKHOROV_POINTS:
        raise ResourceError(
            f"subset enumeration is capped at {MAX_PROKHOROV_POINTS} points",
            cardinality=len(pts),
        )
    best = ZERO
    witness = ()
    for mask in range(1, 1 << len(pts)):
        subset = tuple(x for i, x in enumerate(pts) if mask >> i & 1)
        p_mass = p.mass(subset)
        alpha = _min_alpha_for_subset(p_mass, subset, q, space)
        if alpha > best:
            best, witness = alpha, subset
    return best, True, witness


def prokhorov(p, q, space):
    value, _attained, _witness = prokhorov_detail(p, q, space)
    return value


def three_point_example():
    """The 3-point instance separating the two metrics exactly.

    On {0, 1/2, 1} with p = 3/5 at 0 plus 2/5 at 1 and q = 3/5 at 1/2
    plus 2/5 at 1, the Kantorovich distance is 3/10 while the Prokhorov
    distance is 1/2.
    """
    pts = ("0", "1/2", "1")
    coords = {"0": ZERO, "1/2": Fraction(1, 2), "1": ONE}
    dist = {
        (x, y): abs(coords[x] - coords[y])
        for x in pts
        for y in pts
        if x != y
    }
    space = FiniteMetricSpace(pts, dist)
    p = Distribution(pts, {"0": Fraction(3, 5), "1": Fraction(2, 5)})
    q = Distribution(pts, {"1/2": Fraction(3, 5), "1": Fraction(2, 5)})
    return space, p, q


@dataclass
class MetricSuiteConfig:
    seed: int
    draws: int = 500
    max_points: int = 6
    grid: int = 6
    triple_every: int = 10  # triangle checks run on every k-th draw


@dataclass
class MetricCheck:
    name: str
    draw: int
    ok: bool
    witness: object = None


@dataclass
class MetricSuiteReport:
    config: MetricSuiteConfig
    checks: list = field(default_factory=list)
    counterexample_gap: tuple = None

    def add(self, name, draw, ok, witness=None):
        self.checks.append(MetricCheck(name, draw, ok, witness))

    def failures(self):
        return [c for c in self.checks if not c.ok]

    def ok(self):
        return not self.failures()


def _random_space(rng, max_points, grid):
    n = rng.randint(2, max_points)
    pts = tuple(f"m{i}" for i in range(n))
    raw = {}
    for x, y in combinations(pts, 2):
        raw[(x, y)] = Fraction(rng.randint(1, grid), grid)
    scale = Fraction(rng.choice((1, 1, 2)))
    raw = {k: v * scale for k, v in raw.items()}
    # metric repair: shortest-path closure keeps symmetry and positivity
    d = {(x, y): raw.get((x, y), raw.get((y, x))) for x in pts for y in pts if x != y}
    for via in pts:
        for x in pts:
            for y in pts:
                if x == y or x == via or y == via:
                    continue
                through = d[(x, via)] + d[(via, y)]
                if through < d[(x, y)]:
                    d[(x, y)] = through
                    d[(y, x)] = through
    return FiniteMetricSpace(pts, d)


def _random_distribution(rng, pts, grid):
    cells = [rng.randrange(len(pts)) for _ in range(grid)]
    weights = {}
    for cell in cells:
        x = pts[cell]
        weights[x] = weights.get(x, ZERO) + Fraction(1, grid)
    return Distribution(pts, weights)


def metric_inequality_suite(config):
    """Random-instance inequality checks plus the fixed counterexample.

    Per instance: the squared Prokhorov distance never exceeds the
    Kantorovich distance; the dual and primal transport values agree
    exactly whenever the diameter is at most 1; both metrics vanish
    exactly on equal pairs.  Symmetry and triangle inequalities are
    asserted on sampled draws.
    """
    rng = random.Random(config.seed)
    report = MetricSuiteReport(config)

    space, p, q = three_point_example()
    dk = kantorovich_dual(p, q, space)
    dp = prokhorov(p, q, space)
    report.add("counterexample-kantorovich", -1, dk == Fraction(3, 10), dk)
    report.add("counterexample-prokhorov", -1, dp == Fraction(1, 2), dp)
    report.add("counterexample-gap", -1, dp > dk, (dp, dk))
    report.add("counterexample-huber", -1, dp * dp <= dk, (dp * dp, dk))
    report.counterexample_gap = (dp, dk)

    for draw in range(config.draws):
        space = _random_space(rng, config.max_points, config.grid)
        pts = space.points
        p = _random_distribution(rng, pts, config.grid)
        q = _random_distribution(rng, pts, config.grid)
        dk = kantorovich_dual(p, q, space)
        dp = prokhorov(p, q, space)
        report.add("huber", draw, dp * dp <= dk, (space, p, q, dp, dk))
        if space.diameter() <= 1:
            dw = wasserstein_primal(p, q, space)
            report.add("duality", draw, dk == dw, (space, p, q, dk, dw))
        if p == q:
            report.add("vanish-on-equal", draw, dk == 0 and dp == 0, (dk, dp))
        else:
            report.add("separates", draw, dk > 0 and dp > 0, (space, p, q))
        if draw % config.triple_every == 0:
            report.add(
                "kantorovich-symmetry", draw,
                kantorovich_dual(q, p, space) == dk, (space, p, q),
            )
            report.add(
                "prokhorov-symmetry", draw,
                prokhorov(q, p, space) == dp, (space, p, q),
            )
            r = _random_distribution(rng, pts, config.grid)
            k_pr = kantorovich_dual(p, r, space)
            k_rq = kantorovich_dual(r, q, space)
            report.add(
                "kantorovich-triangle", draw, dk <= k_pr + k_rq,
                (space, p, q, r),
            )
            p_pr = prokhorov(p, r, space)
            p_rq = prokhorov(r, q, space)
            report.add(
                "prokhorov-triangle", draw, dp <= p_pr + p_rq,
                (space, p, q, r),
            )
    return report
