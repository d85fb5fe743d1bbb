"""Synthesis of initial configurations realizing prescribed mod-k residues.

A pile of m * k^(T+1) chips splits evenly for T+1 rounds no matter how the
rotors point, delivering m * k^(T+1-t) * n(d, t) chips at distance d after
t rounds.  Until time T those deliveries are multiples of k, so they change
no residue and no rotor position; at time T+1 the delivery at distance
T+1 is exactly m down the single geodesic.  That gives a stage-by-stage
construction: after fixing all residues up to time T, sweep spheres
outward and drop a corrective pile of epsilon * k^(T+1) chips on a
canonical descendant at distance T+1 below each off-target vertex.  A pile
hung below a sphere-theta vertex reaches no other vertex of radius <=
theta at time T+1, so earlier corrections within the sweep stay intact.

Targets may be cone-scoped: only cells with |x| <= horizon + 1 - t are
promised.  Chips move one edge per round, so cells outside that cone can
never influence the origin by time horizon + 1; the sweep then shrinks
with the stage and the construction stays polynomial in the cone size
rather than exponential in the full radius.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

from .errors import NotEvenlyDivisible, ParityViolation
from .kernels import KernelTable
from .machines import RotorConfig, RotorPolicy, rotor_run
from .tree import (ORIGIN, TreeParams, Vertex, ball_vertices, descend_canonical,
                   distance, sphere_vertices, vertex_from_str, vertex_to_str)


@dataclass
class ResidueTarget:
    """Prescribed chip-count residues pi(x, t) mod k on a finite window.

    residues maps (vertex, time) to a value in 1..k-1; absent cells are
    promised residue 0.  Every prescription must respect walk parity
    (|x| ~ t), sit within the declared radius and horizon, and, for
    cone-scoped targets, within the shrinking cone |x| <= horizon + 1 - t.
    """

    params: TreeParams
    horizon: int
    radius: int
    residues: dict[tuple[Vertex, int], int] = field(default_factory=dict)
    cone: bool = False

    def __post_init__(self) -> None:
        if self.horizon < 0 or self.radius < 0:
            raise ValueError("horizon and radius must be nonnegative")
        k = self.params.k
        cleaned = {}
        for (v, t), r in self.residues.items():
            if r == 0:
                continue
            name = f"({vertex_to_str(v)!r}, {t})"
            if not 0 < r < k:
                raise ValueError(f"residue {r} at {name} not in [0, {k})")
            if not 0 <= t <= self.horizon:
                raise ValueError(f"time in {name} outside horizon {self.horizon}")
            if len(v) > self.radius:
                raise ValueError(f"vertex in {name} outside radius {self.radius}")
            if (len(v) - t) % 2:
                raise ParityViolation(f"prescription at {name} violates walk parity")
            if self.cone and len(v) > self.horizon + 1 - t:
                raise ValueError(f"prescription at {name} outside the cone "
                                 f"|x| <= {self.horizon + 1} - t")
            cleaned[(v, t)] = r
        self.residues = cleaned

    def residue(self, v: Vertex, t: int) -> int:
        return self.residues.get((v, t), 0)

    def promised_radius(self, t: int) -> int:
        """Largest sphere promised clean at time t (may be negative: none)."""
        if self.cone:
            return min(self.radius, self.horizon + 1 - t)
        return self.radius

    def sweep_radius(self, stage: int) -> int:
        return self.promised_radius(stage + 1)


def pile_spread(m: int, t: int, d: int, table: KernelTable) -> int:
    """Chips a pile of m delivers at distance d after t evenly split rounds:
    (m / k^t) * n(d, t).  The pile must admit t even splits."""
    if t < 0 or d < 0:
        raise ValueError(f"need t, d >= 0, got ({t}, {d})")
    k_t = table.params.k**t
    if m % k_t:
        raise NotEvenlyDivisible(f"pile {m} does not split evenly {t} times")
    return (m // k_t) * table.path_count(d, t)


class Placement(NamedTuple):
    """One corrective pile: epsilon * k^(stage+1) chips at `vertex`."""

    stage: int
    vertex: Vertex
    epsilon: int


@dataclass
class ForcingResult:
    config: RotorConfig
    base_chips: dict[Vertex, int]
    placements: list[Placement]
    target: ResidueTarget

    def total_chips(self) -> int:
        return self.config.total_chips()

    def chips_through_stage(self, stage: int) -> dict[Vertex, int]:
        """Initial chips with only the piles of stages <= stage applied."""
        k = self.target.params.k
        chips = dict(self.base_chips)
        for p in self.placements:
            if p.stage <= stage:
                chips[p.vertex] = chips.get(p.vertex, 0) + p.epsilon * k ** (p.stage + 1)
        return chips


def synthesize(target: ResidueTarget,
               policy: RotorPolicy | None = None,
               rotors: dict[Vertex, int] | None = None,
               default_rotor: str = "canonical",
               mode: str = "resimulate",
               table: KernelTable | None = None,
               budget: int | None = None) -> ForcingResult:
    """Build an even initial configuration whose rotor-router run matches
    the target residues on every promised cell, for the given rotors.

    Stage T fixes time T+1: sweep spheres theta = 0..sweep_radius(T)
    outward, measure f(x, T+1) for the configuration built so far, and hang
    the correcting pile below each off-target x.  mode selects how f is
    measured per sphere: "resimulate" reruns the machine per sphere (the
    reference), "incremental" runs once per stage and adds the same-stage
    piles' rotor-independent deliveries analytically.
    """
    if mode not in ("resimulate", "incremental"):
        raise ValueError(f"unknown mode {mode!r}")
    params = target.params
    k = params.k
    if policy is None:
        policy = RotorPolicy(params)
    if mode == "incremental" and table is None:
        table = KernelTable(params)
    rotor_map = dict(rotors or {})
    base = {v: r for (v, t), r in target.residues.items() if t == 0}
    chips = dict(base)
    placements: list[Placement] = []

    def current_config() -> RotorConfig:
        return RotorConfig(params, dict(chips), dict(rotor_map), policy,
                           default_rotor, even=False)

    for stage in range(target.horizon):
        t_q = stage + 1
        sweep = target.sweep_radius(stage)

        def place(x: Vertex, observed: int) -> None:
            eps = (target.residue(x, t_q) - observed) % k
            if eps:
                y = descend_canonical(x, t_q)
                chips[y] = chips.get(y, 0) + eps * k**t_q
                placements.append(Placement(stage, y, eps))

        if mode == "resimulate":
            for theta in range(t_q % 2, sweep + 1, 2):
                traj = rotor_run(current_config(), t_q, budget, cone=(ORIGIN, theta))
                f_map = traj.chips_at(t_q)
                for x in sphere_vertices(theta, params):
                    place(x, f_map.get(x, 0))
        else:
            traj = rotor_run(current_config(), t_q, budget, cone=(ORIGIN, max(sweep, 0)))
            f_map = traj.chips_at(t_q)
            stage_piles: dict[Vertex, tuple[Vertex, int]] = {}
            mark = len(placements)
            for theta in range(t_q % 2, sweep + 1, 2):
                for x in sphere_vertices(theta, params):
                    observed = f_map.get(x, 0)
                    # same-stage piles spread rotor-independently until t_q;
                    # only piles hung below an ancestor of x can reach it
                    for j in range(len(x)):
                        hit = stage_piles.get(Vertex(x[:j]))
                        if hit is not None:
                            y, eps = hit
                            d = distance(x, y)
                            if d <= t_q:
                                observed += eps * table.path_count(d, t_q)
                    place(x, observed)
                for p in placements[mark:]:
                    parent = Vertex(p.vertex[:len(p.vertex) - t_q])
                    stage_piles[parent] = (p.vertex, p.epsilon)
                mark = len(placements)

    final = RotorConfig(params, chips, rotor_map, policy, default_rotor, even=True)
    return ForcingResult(final, base, placements, target)


@dataclass
class VerifyReport:
    ok: bool
    cells_checked: int
    mismatches: list[tuple[Vertex, int, int, int]]  # (vertex, t, got, want)


def verify_residues(config: RotorConfig, target: ResidueTarget,
                    budget: int | None = None,
                    max_mismatches: int = 20) -> VerifyReport:
    """Simulate to the horizon and compare f(x, t) mod k against the target
    on every promised cell."""
    params = target.params
    k = params.k
    cone = (ORIGIN, 1) if target.cone else (ORIGIN, target.radius)
    traj = rotor_run(config, target.horizon, budget, cone=cone)
    balls: dict[int, list[Vertex]] = {}
    mismatches: list[tuple[Vertex, int, int, int]] = []
    checked = 0
    for t in range(target.horizon + 1):
        bound = target.promised_radius(t)
        if bound < 0:
            continue
        if bound not in balls:
            balls[bound] = ball_vertices(bound, params)
        chips = traj.chips_at(t)
        want_all = target.residues
        for v in balls[bound]:
            got = chips.get(v, 0) % k
            want = want_all.get((v, t), 0)
            checked += 1
            if got != want and len(mismatches) < max_mismatches:
                mismatches.append((v, t, got, want))
    return VerifyReport(ok=not mismatches, cells_checked=checked, mismatches=mismatches)


def placement_rows(result: ForcingResult):
    """CSV rows (stage, vertex, epsilon) in placement order."""
    for p in result.placements:
        yield p.stage, vertex_to_str(p.vertex), p.epsilon


# -- serialization -----------------------------------------------------------

def target_to_json(target: ResidueTarget) -> dict:
    return {
        "k": target.params.k,
        "horizon": target.horizon,
        "radius": target.radius,
        "cone": target.cone,
        "residues": {f"{vertex_to_str(v)}@{t}": r
                     for (v, t), r in target.residues.items()},
    }


def target_from_json(data: dict) -> ResidueTarget:
    params = TreeParams(int(data["k"]))
    residues = {}
    for key, r in data.get("residues", {}).items():
        vpart, _, tpart = key.rpartition("@")
        residues[(vertex_from_str(vpart, params), int(tpart))] = int(r)
    return ResidueTarget(
        params,
        horizon=int(data["horizon"]),
        radius=int(data["radius"]),
        residues=residues,
        cone=bool(data.get("cone", False)),
    )
