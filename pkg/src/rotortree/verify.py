"""Self-check suites: fast, deterministic spot checks of the library's
exact identities, runnable from the command line.

Each suite returns CheckResult rows; a row failing carries its first
counterexample. The suites overlap the test corpus on purpose: they are
the in-the-field smoke tests, sized to finish in seconds.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .analysis import (DivergenceSpec, decompose, discrepancy, divergence_analytic,
                       divergence_growth, lower_bound_comparator)
from .exact import ExactAmount
from .forcing import ResidueTarget, synthesize, verify_residues
from .kernels import (KernelTable, ballot_kernel, ballot_kernel_closed,
                      ballot_oracle, factorial_bounds, gamma_factorial,
                      hit_probability, influence, influence_peak_time, path_count,
                      path_count_oracle)
from .machines import (LinearState, RotorConfig, RotorPolicy, linear_analytic,
                       linear_step, rotor_run, rotor_step)
from .tree import ORIGIN, TreeParams, Vertex, ball_vertices, distance, same_parity

SUITES = ("kernels", "machines", "forcing", "decomposition", "bounds", "all")


@dataclass
class CheckResult:
    suite: str
    name: str
    checks: int
    failures: int
    counterexample: str = ""

    @property
    def ok(self) -> bool:
        return self.failures == 0


class _Tally:
    """Accumulates pass/fail counts and the first counterexample."""

    def __init__(self, suite: str, name: str):
        self.suite = suite
        self.name = name
        self.checks = 0
        self.failures = 0
        self.first = ""

    def expect(self, ok: bool, describe: str) -> None:
        self.checks += 1
        if not ok:
            self.failures += 1
            if not self.first:
                self.first = describe

    def result(self) -> CheckResult:
        return CheckResult(self.suite, self.name, self.checks, self.failures, self.first)


def _random_even_config(params: TreeParams, rng: random.Random,
                        support_radius: int = 4, max_count: int = 50) -> RotorConfig:
    """Seeded even configuration with random rotors and rotor sequences."""
    k = params.k
    verts = ball_vertices(support_radius, params)
    evens = [v for v in verts if len(v) % 2 == 0]
    picked = rng.sample(evens, rng.randint(1, min(6, len(evens))))
    chips = {v: rng.randint(1, max_count) for v in picked}
    rotor_ball = ball_vertices(support_radius + 8, params)
    rotors = {v: rng.randrange(k) for v in rng.sample(rotor_ball, len(rotor_ball) // 3)}
    overrides = {}
    for v in rng.sample(rotor_ball, len(rotor_ball) // 4):
        perm = list(range(k))
        rng.shuffle(perm)
        overrides[v] = tuple(perm)
    policy = RotorPolicy(params, overrides)
    return RotorConfig(params, chips, rotors, policy, even=True)


# -- kernels -----------------------------------------------------------------

def check_kernels(seed: int = 2024) -> list[CheckResult]:
    out = []

    t1 = _Tally("kernels", "path counts match the brute-force walk oracle")
    for k in (3, 4):
        params = TreeParams(k)
        table = KernelTable(params)
        for t in range(0, 8):
            for x in range(0, t + 1):
                got = path_count(x, t, table)
                want = path_count_oracle(x, t, params)
                t1.expect(got == want, f"k={k} n({x},{t}): table {got}, oracle {want}")
    out.append(t1.result())

    t2 = _Tally("kernels", "ballot recurrence equals closed form and path oracle")
    for k in (3, 4, 5):
        params = TreeParams(k)
        table = KernelTable(params)
        for x in range(0, 21):
            for t in range(x % 2, 41, 2):
                if not same_parity(x, t):
                    continue
                a = ballot_kernel(x, t, table)
                b = ballot_kernel_closed(x, t, params)
                t2.expect(a == b, f"k={k} i({x},{t}): recurrence {a}, closed {b}")
                if x + t <= 12 and x >= 1 and t >= 1:
                    c = ballot_oracle(x, t, params)
                    t2.expect(a == c, f"k={k} i({x},{t}): recurrence {a}, oracle {c}")
    out.append(t2.result())

    t3 = _Tally("kernels", "influence identities (inward = -(k-1) x outward; harmonic)")
    for k in (3, 4, 5):
        params = TreeParams(k)
        table = KernelTable(params)
        for x in range(1, 13):
            for t in range(1, 25):
                i_val = ballot_kernel(x, t, table)
                inw = influence(x, -1, t, table)
                outw = influence(x, +1, t, table)
                t3.expect(inw == ExactAmount(k, i_val, t),
                          f"k={k} INF({x},-1,{t}) != i/k^t")
                t3.expect(inw + (k - 1) * outw == 0,
                          f"k={k} ({x},{t}): full cycle sums to {inw + (k - 1) * outw}")
                lhs = hit_probability(x - 1, t - 1, table) \
                    + (k - 1) * hit_probability(x + 1, t - 1, table)
                t3.expect(lhs == k * hit_probability(x, t, table),
                          f"k={k} harmonicity fails at ({x},{t})")
    out.append(t3.result())

    t4 = _Tally("kernels", "influence is unimodal in t with peak near lambda x")
    for k in range(3, 9):
        params = TreeParams(k)
        table = KernelTable(params)
        for x in (1, 2, 3, 5, 8, 13, 21, 34):
            peak = influence_peak_time(x, params)
            lam_x = Fraction(k * x, k - 2)
            t4.expect(abs(peak - lam_x) <= 15,
                      f"k={k} x={x}: peak {peak} vs lambda*x {float(lam_x):.1f}")
            top = 4 * (k * x) // (k - 2) + 2
            ts = list(range(x, top + 1, 2))
            vals = [ExactAmount(k, ballot_kernel(x, t, table), t) for t in ts]
            best = max(range(len(ts)), key=lambda j: (vals[j], -ts[j]))
            t4.expect(ts[best] == peak,
                      f"k={k} x={x}: argmax {ts[best]}, peak said {peak}")
            for j in range(1, len(ts)):
                if j <= best:
                    t4.expect(vals[j - 1] <= vals[j],
                              f"k={k} x={x}: dip before peak at t={ts[j]}")
                else:
                    t4.expect(vals[j] <= vals[j - 1],
                              f"k={k} x={x}: rise after peak at t={ts[j]}")
    out.append(t4.result())

    t5 = _Tally("kernels", "binomial ridge inequality C(2x,x+y) <= C(2x+2,x+1+y)")
    for x in range(0, 101):
        for y in range(0, x + 1):
            t5.expect(comb(2 * x, x + y) <= comb(2 * x + 2, x + 1 + y),
                      f"x={x} y={y}")
    out.append(t5.result())

    t6 = _Tally("kernels", "bounded-block-sum inequality |sum A_i f(t_i)| <= max f")
    rng = random.Random(seed)
    # exhaustive small cases: coefficient tuples over a +-1/2 grid whose
    # every contiguous block sums within [-1, 1]
    grid = [Fraction(n, 2) for n in (-2, -1, 0, 1, 2)]
    for n in (1, 2, 3):
        for coeffs in itertools.product(grid, repeat=n):
            if any(abs(sum(coeffs[a:b + 1])) > 1
                   for a in range(n) for b in range(a, n)):
                continue
            for fvals in itertools.combinations_with_replacement(range(4), n):
                total = sum(c * f for c, f in zip(coeffs, fvals))
                t6.expect(abs(total) <= max(fvals),
                          f"coeffs={coeffs} f={fvals} -> {total}")
    # randomized trials: A_i = s_(i+1) - s_i with s in [0,1] makes every
    # contiguous block sum a difference of two values in [0,1]
    for _ in range(300):
        n = rng.randint(1, 12)
        s = [Fraction(rng.randint(0, 64), 64) for _ in range(n + 1)]
        coeffs = [s[i + 1] - s[i] for i in range(n)]
        fvals = sorted(rng.randint(0, 100) for _ in range(n))
        total = sum(c * f for c, f in zip(coeffs, fvals))
        t6.expect(abs(total) <= max(fvals), f"coeffs={coeffs} f={fvals}")
    out.append(t6.result())

    t7 = _Tally("kernels", "factorial brackets contain the exact value")
    for n in [1, 2, 5, 10, 20, Fraction(3, 2), Fraction(7, 2), Fraction(21, 2)]:
        lo, hi = factorial_bounds(n)
        val = gamma_factorial(n)
        t7.expect(lo < val < hi, f"n={n}: {lo} !< {val} !< {hi}")
    out.append(t7.result())
    return out


# -- machines ----------------------------------------------------------------

def check_machines(seed: int = 2024) -> list[CheckResult]:
    out = []
    rng = random.Random(seed)
    params = TreeParams(3)
    table = KernelTable(params)
    configs = [_random_even_config(params, rng) for _ in range(12)]

    t1 = _Tally("machines", "chip conservation across snapshot rounds")
    for cfg in configs:
        total = cfg.total_chips()
        traj = rotor_run(cfg, 6)
        for t in range(7):
            got = sum(traj.chips_at(t).values())
            t1.expect(got == total, f"t={t}: {got} != {total}")
    out.append(t1.result())

    t2 = _Tally("machines", "round outcome independent of vertex iteration order")
    for cfg in configs[:6]:
        baseline = rotor_step(cfg)
        items = list(cfg.chips.items())
        for _ in range(10):
            rng.shuffle(items)
            shuffled = RotorConfig(params, dict(items), dict(cfg.rotors),
                                   cfg.policy, cfg.default_rotor, even=True)
            again = rotor_step(shuffled)
            t2.expect(again.chips == baseline.chips and again.rotors == baseline.rotors,
                      f"order {items[:3]}... changed the round result")
    out.append(t2.result())

    t3 = _Tally("machines", "k^T piles flow like the linear machine, rotors restored")
    for T in range(1, 6):
        start = {ORIGIN: 3**T}
        cfg = RotorConfig(params, dict(start), {})
        traj = rotor_run(cfg, T)
        final = traj.chips_at(T)
        for v, c in final.items():
            want = linear_analytic(start, T, v, table)
            t3.expect(ExactAmount.from_int(c, 3) == want,
                      f"T={T} at {v}: {c} vs {want}")
        for v in final:
            t3.expect(traj.rotor_at(v, T) == traj.rotor_at(v, 0),
                      f"T={T}: rotor at {v} not restored")
    out.append(t3.result())

    t4 = _Tally("machines", "stepped linear masses equal the analytic kernel value")
    for cfg in configs[:4]:
        st = LinearState.from_chips(cfg.chips, params)
        for t in range(1, 5):
            st = linear_step(st)
            for v in ball_vertices(2, params):
                want = linear_analytic(cfg.chips, t, v, table)
                t4.expect(st.mass(v) == want, f"t={t} at {v}")
    out.append(t4.result())

    t5 = _Tally("machines", "cone-pruned runs agree with full runs inside the cone")
    for cfg in configs[:4]:
        T = 5
        full = rotor_run(cfg, T)
        cone = rotor_run(cfg, T, cone=(ORIGIN, 2))
        for t in range(T + 1):
            keep = 2 + (T - t)
            fc, cc = full.chips_at(t), cone.chips_at(t)
            for v in set(fc) | set(cc):
                if distance(v, ORIGIN) <= keep:
                    t5.expect(fc.get(v, 0) == cc.get(v, 0),
                              f"t={t} at {v}: full {fc.get(v, 0)} pruned {cc.get(v, 0)}")
    out.append(t5.result())
    return out


# -- forcing -----------------------------------------------------------------

def _random_target(params: TreeParams, rng: random.Random,
                   radius: int = 3, horizon: int = 4) -> ResidueTarget:
    k = params.k
    residues = {}
    for t in range(horizon + 1):
        for v in ball_vertices(radius, params):
            if same_parity(len(v), t) and rng.random() < 0.35:
                residues[(v, t)] = rng.randrange(1, k)
    return ResidueTarget(params, horizon, radius, residues)


def check_forcing(seed: int = 2024) -> list[CheckResult]:
    out = []
    rng = random.Random(seed)
    params = TreeParams(3)

    t1 = _Tally("forcing", "synthesized configurations hit every prescribed residue")
    for _ in range(6):
        target = _random_target(params, rng)
        res = synthesize(target)
        rep = verify_residues(res.config, target)
        t1.expect(rep.ok, f"target {len(target.residues)} cells: "
                          f"{rep.mismatches[:2]}")
    out.append(t1.result())

    t2 = _Tally("forcing", "later-stage piles leave earlier times untouched")
    target = _random_target(params, rng)
    res = synthesize(target)
    k = params.k
    for stage in range(target.horizon):
        partial = RotorConfig(params, res.chips_through_stage(stage),
                              dict(res.config.rotors), res.config.policy,
                              res.config.default_rotor, even=True)
        traj = rotor_run(partial, stage + 1, cone=(ORIGIN, target.radius))
        done = rotor_run(res.config, stage + 1, cone=(ORIGIN, target.radius))
        for t in range(stage + 2):
            a, b = traj.chips_at(t), done.chips_at(t)
            for v in ball_vertices(target.radius, params):
                t2.expect(a.get(v, 0) % k == b.get(v, 0) % k,
                          f"stage {stage} t={t} at {v}")
    out.append(t2.result())

    t3 = _Tally("forcing", "incremental synthesis equals the resimulating reference")
    for _ in range(4):
        target = _random_target(params, rng, radius=2, horizon=4)
        a = synthesize(target, mode="resimulate")
        b = synthesize(target, mode="incremental")
        t3.expect(a.config.chips == b.config.chips and a.placements == b.placements,
                  f"{len(target.residues)}-cell target diverged between modes")
    out.append(t3.result())
    return out


# -- decomposition -------------------------------------------------------------

def check_decomposition(seed: int = 2024) -> list[CheckResult]:
    out = []
    rng = random.Random(seed)
    params = TreeParams(3)
    table = KernelTable(params)

    t1 = _Tally("decomposition", "per-vertex contributions sum to the exact discrepancy")
    for _ in range(12):
        cfg = _random_even_config(params, rng)
        traj = rotor_run(cfg, 8)
        for T in (2, 4, 6, 8):
            d = discrepancy(traj, T, ORIGIN, table)
            dec = decompose(traj, T, table)
            t1.expect(dec.total == d, f"T={T}: {dec.total} != {d}")
    out.append(t1.result())

    t2 = _Tally("decomposition", "per-chip influence sums match the residue shortcut")
    for _ in range(4):
        cfg = _random_even_config(params, rng, support_radius=2, max_count=9)
        T = 4
        traj = rotor_run(cfg, T)
        brute = ExactAmount.zero(3)
        for s in range(T):
            frame = traj.chips_at(s)
            for v, c in frame.items():
                if not v or not c:
                    continue
                seq = cfg.policy.sequence(v)
                pos0 = seq.index(traj.rotor_at(v, s))
                for j in range(c):
                    d = seq[(pos0 + j) % 3]
                    a = -1 if d == v[-1] else +1
                    brute = brute + influence(len(v), a, T - s, table)
        dec = decompose(traj, T, table)
        t2.expect(brute == dec.total, f"brute {brute} != shortcut {dec.total}")
    out.append(t2.result())
    return out


# -- bounds --------------------------------------------------------------------

def check_bounds(seed: int = 2024) -> list[CheckResult]:
    out = []

    t1 = _Tally("bounds", "divergence discrepancy exceeds the proved floor")
    for k in (3, 4, 5):
        params = TreeParams(k)
        for T in range(2, 121, 2):
            spec = DivergenceSpec(params, T)
            if spec.max_radius < 1:
                continue
            d = divergence_analytic(spec)
            floor = lower_bound_comparator(params, T)
            t1.expect(d.as_decimal(40) > floor, f"k={k} T={T}: {d} <= {floor}")
    out.append(t1.result())

    t2 = _Tally("bounds", "discrepancy-to-sqrt(kT) ratio stays in a fixed band")
    for k in (3, 4, 5):
        params = TreeParams(k)
        rows = divergence_growth(params, [2**j for j in (8, 9, 10, 11, 12)])
        ratios = [row.ratio for row in rows]
        for a, b in zip(ratios, ratios[1:]):
            rel = abs(b - a) / a
            t2.expect(float(rel) < 0.2, f"k={k}: ratio jump {float(rel):.3f}")
    out.append(t2.result())
    return out


def run_suite(suite: str, seed: int = 2024) -> list[CheckResult]:
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; valid: {', '.join(SUITES)}")
    runners = {
        "kernels": check_kernels,
        "machines": check_machines,
        "forcing": check_forcing,
        "decomposition": check_decomposition,
        "bounds": check_bounds,
    }
    if suite == "all":
        results = []
        for name in ("kernels", "machines", "forcing", "decomposition", "bounds"):
            results.extend(runners[name](seed))
        return results
    return runners[suite](seed)
