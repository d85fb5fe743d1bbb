"""The two chip propagation machines on the k-regular tree.

Rotor-router machine: every vertex carries a rotor pointing at one of its k
edge letters plus a cyclic order over all k letters.  In one round each
vertex dispatches its chips one at a time, each chip leaving along the
current rotor direction and advancing the rotor to the next letter of the
cycle.  Rounds are simultaneous: all outflows are computed from the time-t
snapshot, then summed.

Linear machine: the expectation of the random walk; each vertex forwards
exactly 1/k of its mass along every edge.  Masses are ExactAmount values,
so both machines agree bit for bit whenever all chip counts stay divisible
by k (an evenly splitting pile moves rotor-independently).

Chip counts are arbitrary big integers; maps are sparse and never store
zero entries.  A cone-pruned run drops vertices that can no longer affect
the focus ball by the final time, which is exact for everything inside the
shrinking cone (chips move at most one edge per round).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from typing import NamedTuple

from .errors import BudgetExceeded, LetterOutOfRange, ParityViolation
from .exact import ExactAmount
from .tree import ORIGIN, TreeParams, Vertex, distance, neighbor, vertex_from_str, vertex_to_str

DEFAULT_BUDGET = 50_000_000
_BUDGET_ENV = "ROTOR_TREE_BUDGET"

ROTOR_MODES = ("canonical", "toward_origin")


def occupancy_budget() -> int:
    """Cap on simultaneously occupied vertices; ROTOR_TREE_BUDGET overrides."""
    raw = os.environ.get(_BUDGET_ENV)
    if raw is None:
        return DEFAULT_BUDGET
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"{_BUDGET_ENV} must be an integer, got {raw!r}") from exc
    if value <= 0:
        raise ValueError(f"{_BUDGET_ENV} must be positive, got {value}")
    return value


@dataclass(frozen=True)
class RotorPolicy:
    """Cyclic rotor order per vertex: a shared canonical cycle (0, 1, ...,
    k-1) with optional per-vertex overrides, each a permutation of the
    letters."""

    params: TreeParams
    overrides: dict[Vertex, tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        want = list(range(self.params.k))
        for v, seq in self.overrides.items():
            if sorted(seq) != want:
                raise LetterOutOfRange(f"rotor sequence {seq} at {vertex_to_str(v)!r} "
                                       f"is not a permutation of 0..{self.params.k - 1}")

    def sequence(self, v: Vertex) -> tuple[int, ...]:
        seq = self.overrides.get(v)
        if seq is not None:
            return seq
        return tuple(range(self.params.k))


def default_rotor_direction(v: Vertex, mode: str, params: TreeParams) -> int:
    """Rotor for a vertex never assigned one explicitly.

    canonical: letter 0, or 1 when 0 is the inward letter.
    toward_origin: the inward letter (0 at the origin, which has none).
    """
    if mode not in ROTOR_MODES:
        raise ValueError(f"unknown default rotor mode {mode!r}")
    if mode == "toward_origin":
        return v[-1] if v else 0
    return 1 if (v and v[-1] == 0) else 0


@dataclass
class RotorConfig:
    """One time-slice of the rotor-router machine.

    chips: sparse positive counts.  rotors: sparse explicit directions;
    anything absent falls back to the default_rotor rule.  even, when set,
    asserts the support lies on the even-distance bipartition class.
    """

    params: TreeParams
    chips: dict[Vertex, int]
    rotors: dict[Vertex, int] = field(default_factory=dict)
    policy: RotorPolicy | None = None
    default_rotor: str = "canonical"
    even: bool = False

    def __post_init__(self) -> None:
        if self.policy is None:
            self.policy = RotorPolicy(self.params)
        if self.default_rotor not in ROTOR_MODES:
            raise ValueError(f"unknown default rotor mode {self.default_rotor!r}")
        k = self.params.k
        cleaned = {}
        for v, c in self.chips.items():
            if c < 0:
                raise ValueError(f"negative chip count {c} at {vertex_to_str(v)!r}")
            if c:
                cleaned[v] = c
                if self.even and len(v) % 2:
                    raise ParityViolation(f"even configuration has chips at odd vertex "
                                          f"{vertex_to_str(v)!r}")
        self.chips = cleaned
        for v, d in self.rotors.items():
            if not 0 <= d < k:
                raise LetterOutOfRange(f"rotor {d} at {vertex_to_str(v)!r} not in [0, {k})")

    def rotor_at(self, v: Vertex) -> int:
        d = self.rotors.get(v)
        if d is None:
            return default_rotor_direction(v, self.default_rotor, self.params)
        return d

    def total_chips(self) -> int:
        return sum(self.chips.values())


def outflow_split(count: int, rotor: int, sequence: tuple[int, ...]) -> tuple[dict[int, int], int]:
    """Dispatch `count` chips starting at `rotor` along the cyclic order.

    The direction at cyclic offset p from the rotor receives
    ceil((count - p) / k) chips, i.e. #{j in [0, count) : j = p mod k};
    the new rotor is the direction at offset count mod k.
    """
    if count < 0:
        raise ValueError(f"chip count must be nonnegative, got {count}")
    k = len(sequence)
    try:
        pos0 = sequence.index(rotor)
    except ValueError as exc:
        raise LetterOutOfRange(f"rotor {rotor} not in sequence {sequence}") from exc
    q, r = divmod(count, k)
    counts: dict[int, int] = {}
    for p in range(k):
        c = q + (1 if p < r else 0)
        if c:
            counts[sequence[(pos0 + p) % k]] = c
    return counts, sequence[(pos0 + count) % k]


def rotor_step(config: RotorConfig, budget: int | None = None) -> RotorConfig:
    """One simultaneous round.  Vertex iteration order cannot matter: all
    outflows are read from the input snapshot and arrivals are summed."""
    if budget is None:
        budget = occupancy_budget()
    params = config.params
    policy = config.policy
    new_chips: dict[Vertex, int] = {}
    new_rotors = dict(config.rotors)
    for v, c in config.chips.items():
        seq = policy.sequence(v)
        counts, new_rotors[v] = outflow_split(c, config.rotor_at(v), seq)
        for d, cnt in counts.items():
            u = neighbor(v, d, params)
            new_chips[u] = new_chips.get(u, 0) + cnt
    if len(new_chips) > budget:
        raise BudgetExceeded(f"{len(new_chips)} occupied vertices exceed budget {budget}")
    return replace(config, chips=new_chips, rotors=new_rotors, even=False)


class Burst(NamedTuple):
    """A round where a vertex held chips not divisible by k: the residue
    and the rotor direction the burst started from (full cycles cancel)."""

    time: int
    residue: int
    rotor: int


@dataclass(frozen=True)
class ResidueSchedule:
    """Per vertex, every burst with nonzero mod-k residue before `horizon`."""

    params: TreeParams
    horizon: int
    policy: RotorPolicy
    bursts: dict[Vertex, list[Burst]]


@dataclass
class RotorTrajectory:
    """Snapshots (chips, rotors) for t = 0..horizon of one rotor run.

    cone, when present, is (center, radius): frame t only keeps vertices v
    with dist(v, center) <= radius + (horizon - t), which is exact for all
    cells inside that shrinking cone and empty outside it.
    """

    config: RotorConfig
    frames: list[tuple[dict[Vertex, int], dict[Vertex, int]]]
    horizon: int
    cone: tuple[Vertex, int] | None = None

    def chips_at(self, t: int) -> dict[Vertex, int]:
        return self.frames[t][0]

    def chip_count(self, v: Vertex, t: int) -> int:
        return self.frames[t][0].get(v, 0)

    def rotor_at(self, v: Vertex, t: int) -> int:
        d = self.frames[t][1].get(v)
        if d is None:
            return default_rotor_direction(v, self.config.default_rotor, self.config.params)
        return d

    def schedule(self, horizon: int | None = None) -> ResidueSchedule:
        if horizon is None:
            horizon = self.horizon
        if not 0 <= horizon <= self.horizon:
            raise ValueError(f"schedule horizon {horizon} outside run of length {self.horizon}")
        k = self.config.params.k
        bursts: dict[Vertex, list[Burst]] = {}
        for s in range(horizon):
            chips, _ = self.frames[s]
            for v, c in chips.items():
                r = c % k
                if r:
                    bursts.setdefault(v, []).append(Burst(s, r, self.rotor_at(v, s)))
        return ResidueSchedule(self.config.params, horizon, self.config.policy, bursts)


def rotor_run(config: RotorConfig, horizon: int,
              budget: int | None = None,
              cone: tuple[Vertex, int] | None = None) -> RotorTrajectory:
    """Run `horizon` rounds, recording every snapshot.

    With cone=(center, radius), each frame drops vertices farther than
    radius + (horizon - t) from the center.  Chips move one edge per round,
    so dropped vertices can never influence kept cells again.
    """
    if horizon < 0:
        raise ValueError(f"horizon must be nonnegative, got {horizon}")
    if budget is None:
        budget = occupancy_budget()

    def prune(cfg: RotorConfig, t: int) -> RotorConfig:
        if cone is None:
            return cfg
        center, radius = cone
        keep = radius + (horizon - t)
        kept = {v: c for v, c in cfg.chips.items() if distance(v, center) <= keep}
        if len(kept) == len(cfg.chips):
            return cfg
        return replace(cfg, chips=kept, even=False)

    cur = prune(config, 0)
    frames = [(cur.chips, cur.rotors)]
    for t in range(horizon):
        cur = prune(rotor_step(cur, budget), t + 1)
        frames.append((cur.chips, cur.rotors))
    return RotorTrajectory(config, frames, horizon, cone)


@dataclass
class LinearState:
    """Exact expected-occupancy masses of the linear machine."""

    params: TreeParams
    masses: dict[Vertex, ExactAmount]

    @classmethod
    def from_chips(cls, chips: dict[Vertex, int], params: TreeParams) -> "LinearState":
        return cls(params, {v: ExactAmount.from_int(c, params.k)
                            for v, c in chips.items() if c})

    def mass(self, v: Vertex) -> ExactAmount:
        return self.masses.get(v, ExactAmount.zero(self.params.k))

    def total(self) -> ExactAmount:
        out = ExactAmount.zero(self.params.k)
        for m in self.masses.values():
            out = out + m
        return out


def linear_step(state: LinearState) -> LinearState:
    """Every vertex forwards exactly 1/k of its mass along each edge."""
    params = state.params
    new: dict[Vertex, ExactAmount] = {}
    for v, m in state.masses.items():
        share = m.div_by_k()
        for d in range(params.k):
            u = neighbor(v, d, params)
            prev = new.get(u)
            new[u] = share if prev is None else prev + share
    return LinearState(params, {v: m for v, m in new.items() if m})


def linear_analytic(initial: dict[Vertex, int], horizon: int, target: Vertex,
                    table) -> ExactAmount:
    """Mass at `target` after `horizon` rounds, via hitting probabilities:
    sum over sources of chips(v) * n(dist(v, target), horizon) / k^horizon."""
    k = table.params.k
    num = 0
    for v, c in initial.items():
        num += c * table.path_count(distance(v, target), horizon)
    return ExactAmount(k, num, horizon)


# -- serialization ----------------------------------------------------------

def config_to_json(config: RotorConfig) -> dict:
    seqs: dict | str = "canonical"
    if config.policy.overrides:
        seqs = {vertex_to_str(v): list(seq) for v, seq in config.policy.overrides.items()}
    return {
        "k": config.params.k,
        "even": config.even,
        "default_rotor": config.default_rotor,
        "rotor_sequences": seqs,
        "chips": {vertex_to_str(v): str(c) for v, c in config.chips.items()},
        "rotors": {vertex_to_str(v): d for v, d in config.rotors.items()},
    }


def config_from_json(data: dict) -> RotorConfig:
    params = TreeParams(int(data["k"]))
    seqs = data.get("rotor_sequences", "canonical")
    overrides: dict[Vertex, tuple[int, ...]] = {}
    if seqs != "canonical":
        overrides = {vertex_from_str(key, params): tuple(int(d) for d in seq)
                     for key, seq in seqs.items()}
    chips = {vertex_from_str(key, params): int(c)
             for key, c in data.get("chips", {}).items()}
    rotors = {vertex_from_str(key, params): int(d)
              for key, d in data.get("rotors", {}).items()}
    return RotorConfig(
        params=params,
        chips=chips,
        rotors=rotors,
        policy=RotorPolicy(params, overrides),
        default_rotor=data.get("default_rotor", "canonical"),
        even=bool(data.get("even", False)),
    )


def trajectory_rows(traj: RotorTrajectory):
    """CSV rows (t, vertex, chips, rotor), deterministically ordered."""
    for t in range(traj.horizon + 1):
        chips = traj.chips_at(t)
        for v in sorted(chips, key=lambda w: (len(w), w)):
            yield t, vertex_to_str(v), chips[v], traj.rotor_at(v, t)
