"""Discrepancy decomposition, the divergence family, growth and convergence."""

import math
import random
from decimal import Decimal
from fractions import Fraction

import pytest

from rotortree import (ORIGIN, Burst, DivergenceSpec, ExactAmount, KernelTable,
                       OddHorizon, ResidueSchedule, RotorConfig, RotorPolicy,
                       TreeParams, chip_count_experiment, comparator_term,
                       contribution, contribution_terms, convergence_series,
                       decompose, discrepancy, divergence_analytic,
                       divergence_growth, divergence_target, divergence_term,
                       lower_bound_comparator, make_vertex, odd_burst_time,
                       rotor_run, sphere_size, synthesize, verify_residues)
from rotortree.analysis import sphere_report
from rotortree.verify import _random_even_config

P3 = TreeParams(3)
TABLE3 = KernelTable(P3)


def _schedule(bursts_by_vertex):
    return ResidueSchedule(P3, 8, RotorPolicy(P3), bursts_by_vertex)


def test_single_chip_discrepancy():
    v = make_vertex((0,), P3)
    for r, want in ((0, ExactAmount(3, 2, 1)), (1, ExactAmount(3, -1, 1)),
                    (2, ExactAmount(3, -1, 1))):
        traj = rotor_run(RotorConfig(P3, {v: 1}, {v: r}), 1)
        assert discrepancy(traj, 1, ORIGIN, TABLE3) == want


def test_contribution_single_burst():
    v = make_vertex((0,), P3)
    # one odd chip, rotor inward, 3 steps remaining: i(1,3)/3^3 = 4/27
    sched = _schedule({v: [Burst(5, 1, 0)]})
    assert contribution(v, sched, 8, TABLE3) == ExactAmount(3, 4, 3)
    # residue 2 starting inward: 4/27 - (1/2)(4/27) = 2/27
    sched = _schedule({v: [Burst(5, 2, 0)]})
    assert contribution(v, sched, 8, TABLE3) == ExactAmount(3, 2, 3)
    # residue 2 starting outward (rotor 1): both moves outward, -4/27
    sched = _schedule({v: [Burst(5, 2, 1)]})
    assert contribution(v, sched, 8, TABLE3) == ExactAmount(3, -4, 3)


def test_contribution_origin_is_zero():
    sched = _schedule({ORIGIN: [Burst(2, 1, 0), Burst(4, 2, 1)]})
    assert contribution(ORIGIN, sched, 8, TABLE3) == 0


def test_contribution_terms_breakdown():
    v = make_vertex((0,), P3)
    sched = _schedule({v: [Burst(5, 2, 0)]})
    terms = contribution_terms(v, sched, 8, TABLE3)
    assert len(terms) == 2
    assert terms[0].inward and terms[0].value == ExactAmount(3, 4, 3)
    assert not terms[1].inward and terms[1].value == ExactAmount(3, -2, 3)


def test_decomposition_equals_discrepancy_seeded():
    rng = random.Random(4242)
    for _ in range(25):
        cfg = _random_even_config(P3, rng)
        traj = rotor_run(cfg, 8)
        for T in range(1, 9):
            dec = decompose(traj, T, TABLE3)
            assert dec.total == discrepancy(traj, T, ORIGIN, TABLE3)
            regroup = ExactAmount.zero(3)
            for tot in dec.sphere_totals.values():
                regroup = regroup + tot
            assert regroup == dec.total


def test_odd_burst_time():
    assert [odd_burst_time(x, P3) for x in (1, 2, 3, 4)] == [3, 6, 9, 12]
    p4 = TreeParams(4)
    assert [odd_burst_time(x, p4) for x in (1, 2, 3, 4)] == [3, 4, 7, 8]
    p5 = TreeParams(5)
    assert [odd_burst_time(x, p5) for x in (1, 2, 3, 4)] == [3, 4, 5, 8]
    # defining property: smallest t >= lambda x with matching parity
    for k in (3, 4, 5, 6, 7):
        params = TreeParams(k)
        lam = Fraction(k, k - 2)
        for x in range(1, 60):
            t = odd_burst_time(x, params)
            assert t >= lam * x and (t - x) % 2 == 0
            assert t - 2 < lam * x


def test_divergence_spec():
    with pytest.raises(OddHorizon):
        DivergenceSpec(P3, 5)
    spec = DivergenceSpec(P3, 12)
    assert spec.max_radius == 4
    assert DivergenceSpec(TreeParams(4), 8).max_radius == 4
    assert DivergenceSpec(P3, 2).max_radius == 0


def test_divergence_analytic_frozen_values():
    assert divergence_analytic(DivergenceSpec(P3, 2)) == 0
    assert divergence_analytic(DivergenceSpec(P3, 4)) == ExactAmount(3, 4, 2)
    assert divergence_analytic(DivergenceSpec(P3, 6)) == ExactAmount(3, 188, 5)
    assert divergence_analytic(DivergenceSpec(P3, 8)) == ExactAmount(3, 188, 5)
    assert divergence_analytic(DivergenceSpec(P3, 10)) == ExactAmount(3, 6868, 8)
    assert divergence_analytic(DivergenceSpec(P3, 12)) == ExactAmount(3, 75892, 10)


def test_divergence_term_table_agrees_with_closed_form():
    for x in range(1, 30):
        assert divergence_term(x, P3, TABLE3) == divergence_term(x, P3)


def test_divergence_target_layout():
    spec = DivergenceSpec(P3, 6)
    target, rotor_mode = divergence_target(spec)
    assert rotor_mode == "toward_origin"
    assert target.cone
    # sphere 1 odd at time T - t_1 = 3, sphere 2 odd at time T - t_2 = 0
    ones = {(v, t) for (v, t), r in target.residues.items() if len(v) == 1}
    twos = {(v, t) for (v, t), r in target.residues.items() if len(v) == 2}
    assert {t for _, t in ones} == {3} and len(ones) == 3
    assert {t for _, t in twos} == {0} and len(twos) == 6
    assert len(target.residues) == 9


def test_divergence_simulated_equals_analytic():
    for T in (2, 4, 6, 8):
        spec = DivergenceSpec(P3, T)
        target, mode = divergence_target(spec)
        res = synthesize(target, default_rotor=mode)
        assert verify_residues(res.config, target).ok
        traj = rotor_run(res.config, T, cone=(ORIGIN, 0))
        assert discrepancy(traj, T, ORIGIN, TABLE3) == divergence_analytic(spec, TABLE3)


def test_comparator_frozen_value():
    # two terms: 1/(6 sqrt 6) + 1/(6 sqrt 12)
    val = lower_bound_comparator(P3, 6)
    want = 1 / (6 * math.sqrt(6)) + 1 / (6 * math.sqrt(12))
    assert abs(float(val) - want) < 1e-12
    assert lower_bound_comparator(P3, 2) == 0
    assert float(comparator_term(1, P3)) == pytest.approx(1 / (6 * math.sqrt(6)))


def test_divergence_beats_comparator():
    for k in (3, 4, 5):
        params = TreeParams(k)
        for T in range(4, 200, 2):
            spec = DivergenceSpec(params, T)
            if spec.max_radius < 1:
                continue
            assert divergence_analytic(spec).as_decimal(30) \
                > lower_bound_comparator(params, T)


def test_growth_rows():
    rows = divergence_growth(P3, [4, 6, 8])
    assert [r.horizon for r in rows] == [4, 6, 8]
    assert rows[0].exact == ExactAmount(3, 4, 2)
    assert rows[1].exact == ExactAmount(3, 188, 5)
    assert float(rows[1].sqrt_kt) == pytest.approx(math.sqrt(18))
    assert float(rows[1].ratio) == pytest.approx(float(188 / 243 / math.sqrt(18)))
    assert float(rows[1].comparator) == pytest.approx(float(lower_bound_comparator(P3, 6)))


def test_growth_is_monotone_in_horizon():
    rows = divergence_growth(P3, list(range(4, 200, 2)))
    for a, b in zip(rows, rows[1:]):
        assert b.exact >= a.exact


def test_convergence_series_shape():
    with pytest.raises(ValueError):
        convergence_series(P3, Fraction(0), 10)
    with pytest.raises(ValueError):
        convergence_series(P3, Fraction(1), 10)
    pts = convergence_series(P3, Fraction(1, 2), 80)
    assert [p.x for p in pts] == list(range(1, 81))
    # both branches have nonnegative terms: partial sums nondecreasing
    for a, b in zip(pts, pts[1:]):
        assert b.lower_partial >= a.lower_partial
        assert b.upper_partial >= a.upper_partial


def test_convergence_terms_eventually_shrink():
    # geometric decay: late terms are far below early ones
    for k, eps in ((3, Fraction(1, 2)), (4, Fraction(1, 2)), (4, Fraction(1, 4))):
        params = TreeParams(k)
        pts = convergence_series(params, eps, 220)
        early_hi = (pts[20].upper_partial - pts[19].upper_partial).as_decimal(30)
        late_hi = (pts[219].upper_partial - pts[218].upper_partial).as_decimal(30)
        assert late_hi < early_hi / 50
        late_lo = (pts[219].lower_partial - pts[218].lower_partial).as_decimal(30)
        assert late_lo < Decimal("1e-3")


def test_sphere_report_caps():
    spec = DivergenceSpec(P3, 6)
    target, mode = divergence_target(spec)
    res = synthesize(target, default_rotor=mode)
    traj = rotor_run(res.config, 6, cone=(ORIGIN, 5))
    schedule = traj.schedule(6)
    kappa = res.total_chips()
    reports = sphere_report(schedule, 6, kappa, TABLE3)
    by_x = {r.x: r for r in reports}
    assert by_x[1].con == ExactAmount(3, 4, 2)      # sphere 1 contributes 4/9
    for r in reports:
        assert abs(r.con) <= r.cap_static or r.x == 0
    # static cap at x=1: 3 * max_t i(1,t)/3^t = 3 * (2/3)
    assert by_x[1].cap_static == ExactAmount.from_int(2, 3)


def test_chip_count_experiment_frozen():
    rows = chip_count_experiment(P3, [4, 8, 16])
    assert [r.kappa for r in rows] == [45, 765, 196605]
    assert rows[0].discrepancy == divergence_analytic(DivergenceSpec(P3, 12))
    assert rows[0].ratio == pytest.approx(0.658736, abs=1e-5)
    assert rows[1].ratio == pytest.approx(0.795019, abs=1e-5)
    assert rows[2].ratio == pytest.approx(0.905003, abs=1e-5)


def test_chip_count_kappa_is_contributing_cells():
    for r in chip_count_experiment(P3, [1, 2, 3, 5]):
        assert r.kappa == sum(sphere_size(x, P3) for x in range(1, r.radius + 1))
