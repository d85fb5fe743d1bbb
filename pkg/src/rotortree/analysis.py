"""Single-vertex discrepancy analysis for the rotor-router machine.

The gap between the rotor-router count and the linear machine's expectation
at the origin decomposes exactly over residue bursts.  A burst of residue r
at vertex x, remaining time t = T - s, starting at rotor direction d, nets
r chip moves whose directions are r consecutive letters of x's rotor cycle
beginning at d; full cycles cancel because the hitting probabilities are
harmonic.  Each net inward move contributes i(|x|, t) / k^t, each net
outward move -i(|x|, t) / ((k-1) k^t), and moves from the origin contribute
nothing, so

    f(origin, T) - E(origin, T)  =  sum over vertices of CON(x),

an identity in exact arithmetic.  The divergence family places residue 1 on
every vertex of sphere x at remaining time t_x ~ lambda |x| with rotors
pointing inward (lambda = k/(k-2)), which makes every contribution positive
and nearly peak-sized; its exact total is

    sum_{x=1}^{floor(T/lambda)} (k-1)^(x-1) i(x, t_x) / k^(t_x - 1),

which grows like sqrt(kT) while using exp(Theta(T)) contributing vertices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import NamedTuple

from .errors import OddHorizon, SchedulePastHorizon
from .exact import ExactAmount
from .forcing import ResidueTarget
from .kernels import KernelTable, ballot_kernel_closed, influence_peak_time
from .machines import ResidueSchedule, RotorTrajectory, linear_analytic
from .tree import ORIGIN, TreeParams, Vertex, sphere_size, sphere_vertices


def discrepancy(traj: RotorTrajectory, horizon: int, target: Vertex,
                table: KernelTable) -> ExactAmount:
    """f(target, horizon) - E(target, horizon), exactly, for the rotor run
    and the linear machine started from the same initial chips."""
    observed = ExactAmount.from_int(traj.chip_count(target, horizon), table.params.k)
    return observed - linear_analytic(traj.config.chips, horizon, target, table)


class ContributionTerm(NamedTuple):
    """One net chip move: coefficient 1 (inward) or -1/(k-1) (outward)
    applied to i(|x|, T - s) / k^(T - s)."""

    vertex: Vertex
    time: int
    inward: bool
    value: ExactAmount


def _net_moves(x: Vertex, schedule: ResidueSchedule, horizon: int, table: KernelTable):
    """Yield (s, inward, i_value) per net move of x's bursts; i_value may be 0."""
    seq = schedule.policy.sequence(x)
    inward_letter = x[-1] if x else None
    for burst in schedule.bursts.get(x, ()):
        if burst.time >= horizon:
            raise SchedulePastHorizon(f"burst at time {burst.time} >= horizon {horizon}")
        i_val = table.ballot(len(x), horizon - burst.time)
        pos0 = seq.index(burst.rotor)
        for j in range(burst.residue):
            d = seq[(pos0 + j) % len(seq)]
            yield burst.time, d == inward_letter, i_val


def contribution(x: Vertex, schedule: ResidueSchedule, horizon: int,
                 table: KernelTable) -> ExactAmount:
    """Exact CON(x): the vertex's total effect on the origin discrepancy.

    Moves from the origin have zero influence (all k directions lead to the
    same hitting profile), so the origin always contributes 0.
    """
    k = table.params.k
    num = 0
    for s, inward, i_val in _net_moves(x, schedule, horizon, table):
        if i_val == 0 or not x:
            continue
        if inward:
            num += i_val * k**s
        else:
            assert i_val % (k - 1) == 0
            num -= (i_val // (k - 1)) * k**s
    return ExactAmount(k, num, horizon)


def contribution_terms(x: Vertex, schedule: ResidueSchedule, horizon: int,
                       table: KernelTable) -> list[ContributionTerm]:
    """Per-move breakdown of CON(x), for reports."""
    k = table.params.k
    out = []
    for s, inward, i_val in _net_moves(x, schedule, horizon, table):
        if not x:
            value = ExactAmount.zero(k)
        elif inward:
            value = ExactAmount(k, i_val, horizon - s)
        else:
            assert i_val % (k - 1) == 0
            value = ExactAmount(k, -(i_val // (k - 1)), horizon - s)
        out.append(ContributionTerm(x, s, inward, value))
    return out


@dataclass
class Decomposition:
    per_vertex: dict[Vertex, ExactAmount]
    sphere_totals: dict[int, ExactAmount]
    total: ExactAmount


def decompose(traj: RotorTrajectory, horizon: int, table: KernelTable) -> Decomposition:
    """Sum CON(x) over the trajectory's residue schedule.

    The grand total equals discrepancy() at the origin exactly, for every
    horizon up to the trajectory's length.
    """
    k = table.params.k
    schedule = traj.schedule(horizon)
    per_vertex: dict[Vertex, ExactAmount] = {}
    sphere_totals: dict[int, ExactAmount] = {}
    total = ExactAmount.zero(k)
    for x in schedule.bursts:
        con = contribution(x, schedule, horizon, table)
        per_vertex[x] = con
        sphere_totals[len(x)] = sphere_totals.get(len(x), ExactAmount.zero(k)) + con
        total = total + con
    return Decomposition(per_vertex, sphere_totals, total)


# -- the divergence family ---------------------------------------------------

@dataclass(frozen=True)
class DivergenceSpec:
    """Horizon T (even) for the divergent construction; lambda = k/(k-2)."""

    params: TreeParams
    horizon: int

    def __post_init__(self) -> None:
        if self.horizon < 0:
            raise ValueError(f"horizon must be nonnegative, got {self.horizon}")
        if self.horizon % 2:
            raise OddHorizon(f"divergence construction needs an even horizon, "
                             f"got {self.horizon}")

    @property
    def max_radius(self) -> int:
        """floor(T / lambda) = floor(T (k-2) / k)."""
        k = self.params.k
        return self.horizon * (k - 2) // k

    def odd_time(self, x: int) -> int:
        return odd_burst_time(x, self.params)


def odd_burst_time(x: int, params: TreeParams) -> int:
    """t_x: smallest t >= lambda x with t ~ x, so t_x < lambda x + 2.

    For even horizons T the prescribed burst falls at time T - t_x, and
    t_x itself does not depend on T.
    """
    if x < 1:
        raise ValueError(f"need x >= 1, got {x}")
    k = params.k
    t = -((-k * x) // (k - 2))  # ceil(kx / (k-2))
    if (t - x) % 2:
        t += 1
    return t


def divergence_target(spec: DivergenceSpec) -> tuple[ResidueTarget, str]:
    """Residue prescription realizing the divergence family, plus the rotor
    mode it assumes (all rotors initially inward).

    Residue 1 sits on every vertex of sphere x at time T - t_x, for
    1 <= x <= floor(T/lambda).  The target is cone-scoped with radius and
    horizon T - 1: cells that could still influence the origin by time T
    are promised clean, anything outside the shrinking cone is free.
    """
    bound = max(0, spec.horizon - 1)
    residues: dict[tuple[Vertex, int], int] = {}
    for x in range(1, spec.max_radius + 1):
        s = spec.horizon - spec.odd_time(x)
        for v in sphere_vertices(x, spec.params):
            residues[(v, s)] = 1
    target = ResidueTarget(spec.params, horizon=bound, radius=bound,
                           residues=residues, cone=True)
    return target, "toward_origin"


def divergence_term(x: int, params: TreeParams,
                    table: KernelTable | None = None) -> ExactAmount:
    """Sphere x's exact total contribution: (k-1)^(x-1) i(x, t_x) / k^(t_x - 1)."""
    k = params.k
    t_x = odd_burst_time(x, params)
    i_val = table.ballot(x, t_x) if table is not None else ballot_kernel_closed(x, t_x, params)
    return ExactAmount(k, (k - 1) ** (x - 1) * i_val, t_x - 1)


def divergence_analytic(spec: DivergenceSpec, table: KernelTable | None = None) -> ExactAmount:
    """Exact origin discrepancy of the divergence family at its horizon."""
    total = ExactAmount.zero(spec.params.k)
    for x in range(1, spec.max_radius + 1):
        total = total + divergence_term(x, spec.params, table)
    return total


def comparator_term(x: int, params: TreeParams, digits: int = 50) -> Decimal:
    """(k-2)^(3/2) / (6 sqrt(k (k-1) x)), one term of the proved floor."""
    k = params.k
    with localcontext() as ctx:
        ctx.prec = digits
        num = Decimal(k - 2) * Decimal(k - 2).sqrt()
        den = 6 * (Decimal(k) * Decimal(k - 1) * Decimal(x)).sqrt()
        return +(num / den)


def lower_bound_comparator(params: TreeParams, horizon: int, digits: int = 50) -> Decimal:
    """Proved lower bound for the divergence discrepancy at even horizon T:
    sum_{x=1}^{floor(T/lambda)} (k-2)^(3/2) / (6 sqrt(k (k-1) x)).

    Grows like sqrt(kT); high-precision decimal, comparator use only.
    """
    spec = DivergenceSpec(params, horizon)
    with localcontext() as ctx:
        ctx.prec = digits
        total = Decimal(0)
        for x in range(1, spec.max_radius + 1):
            total += comparator_term(x, params, digits)
        return +total


class GrowthRow(NamedTuple):
    horizon: int
    exact: ExactAmount
    decimal: Decimal
    sqrt_kt: Decimal
    ratio: Decimal
    comparator: Decimal


def divergence_growth(params: TreeParams, horizons: list[int]) -> list[GrowthRow]:
    """Growth table over even horizons, sharing one prefix-sum pass.

    For even T the times t_x do not depend on T, so the exact discrepancy
    at T is the prefix sum of divergence_term over x <= floor(T/lambda).
    """
    specs = [DivergenceSpec(params, t) for t in horizons]
    top = max((s.max_radius for s in specs), default=0)
    prefix = [ExactAmount.zero(params.k)]
    comp_prefix = [Decimal(0)]
    with localcontext() as ctx:
        ctx.prec = 50
        for x in range(1, top + 1):
            prefix.append(prefix[-1] + divergence_term(x, params))
            comp_prefix.append(comp_prefix[-1] + comparator_term(x, params))
    rows = []
    with localcontext() as ctx:
        ctx.prec = 50
        for spec in specs:
            m = spec.max_radius
            exact = prefix[m]
            dec = exact.as_decimal(30)
            root = (Decimal(params.k) * Decimal(spec.horizon)).sqrt()
            ratio = dec / root if root else Decimal(0)
            rows.append(GrowthRow(spec.horizon, exact, +dec, +root, +ratio, +comp_prefix[m]))
    return rows


class ConvergencePoint(NamedTuple):
    x: int
    lower_partial: ExactAmount
    upper_partial: ExactAmount


def convergence_series(params: TreeParams, eps: Fraction, x_max: int) -> list[ConvergencePoint]:
    """Exact partial sums of the two bounding series flanking the peak.

    Per sphere x, the lower branch evaluates (k-1)^(x-1) i(x, t) / k^(t-1)
    at the largest valid t <= floor((1-eps) lambda x), the upper branch at
    the smallest valid t >= ceil((1+eps) lambda x) ("valid" meaning t ~ x,
    t >= x; an empty lower window contributes 0).  Both decay geometrically,
    so the partial sums are numerically Cauchy.
    """
    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise ValueError(f"need 0 < eps < 1, got {eps}")
    k = params.k
    lam = Fraction(k, k - 2)
    low = ExactAmount.zero(k)
    high = ExactAmount.zero(k)
    out = []
    for x in range(1, x_max + 1):
        t_low = math.floor((1 - eps) * lam * x)
        if (t_low - x) % 2:
            t_low -= 1
        if t_low >= x:
            low = low + ExactAmount(
                k, (k - 1) ** (x - 1) * ballot_kernel_closed(x, t_low, params), t_low - 1)
        t_high = math.ceil((1 + eps) * lam * x)
        if (t_high - x) % 2:
            t_high += 1
        high = high + ExactAmount(
            k, (k - 1) ** (x - 1) * ballot_kernel_closed(x, t_high, params), t_high - 1)
        out.append(ConvergencePoint(x, low, high))
    return out


class SphereReport(NamedTuple):
    """Exact sphere contribution against its two comparators: the static
    peak cap |S_x| * i(x, t_peak) / k^t_peak (exact; the contribution's
    absolute value can never exceed it) and the chip-limited scale
    kappa sqrt(x) k^(-x) (decimal, informational)."""

    x: int
    con: ExactAmount
    cap_static: ExactAmount
    cap_chips: Decimal


def sphere_report(schedule: ResidueSchedule, horizon: int, kappa: int,
                  table: KernelTable) -> list[SphereReport]:
    k = table.params.k
    by_sphere: dict[int, ExactAmount] = {}
    for x in schedule.bursts:
        con = contribution(x, schedule, horizon, table)
        by_sphere[len(x)] = by_sphere.get(len(x), ExactAmount.zero(k)) + con
    out = []
    with localcontext() as ctx:
        ctx.prec = 50
        for sphere in range(0, max(by_sphere, default=0) + 1):
            con = by_sphere.get(sphere, ExactAmount.zero(k))
            if sphere == 0:
                cap = ExactAmount.zero(k)
                chip_cap = Decimal(0)
            else:
                t_peak = influence_peak_time(sphere, table.params)
                cap = ExactAmount(
                    k, sphere_size(sphere, table.params)
                    * ballot_kernel_closed(sphere, t_peak, table.params), t_peak)
                chip_cap = (Decimal(kappa) * Decimal(sphere).sqrt()
                            / Decimal(k) ** sphere)
            out.append(SphereReport(sphere, con, cap, +chip_cap))
    return out


class ChipCountRow(NamedTuple):
    """One divergence-family data point: radius R, the number kappa(R) of
    prescribed odd cells (every realization moves at least that many chips
    oddly), the exact discrepancy, and D / sqrt(ln kappa)."""

    radius: int
    kappa: int
    discrepancy: ExactAmount
    ratio: float


def chip_count_experiment(params: TreeParams, radii: list[int]) -> list[ChipCountRow]:
    """Discrepancy versus contributing-cell count along the divergence
    family: D(R) ~ c sqrt(R) while kappa(R) ~ (k-1)^R, so D / sqrt(ln kappa)
    stabilizes -- the square-root-of-log tradeoff, exhibited analytically."""
    k = params.k
    rows = []
    top = max(radii, default=0)
    prefix = ExactAmount.zero(k)
    kappa = 0
    partial: dict[int, tuple[int, ExactAmount]] = {}
    for x in range(1, top + 1):
        prefix = prefix + divergence_term(x, params)
        kappa += sphere_size(x, params)
        partial[x] = (kappa, prefix)
    for r in sorted(radii):
        kap, disc = partial.get(r, (0, ExactAmount.zero(k)))
        ratio = float(disc.as_decimal(20)) / math.sqrt(math.log(kap)) if kap > 1 else 0.0
        rows.append(ChipCountRow(r, kap, disc, ratio))
    return rows
