"""Command-line interface: kernel queries, simulation, residue forcing,
divergence experiments, and self-check suites.

Every run builds a manifest (command, inputs, parameters, output dir) whose
sha256 hash is embedded in each emitted artifact; identical manifests
produce byte-identical outputs.  Exit codes: 0 success, 1 verification
failure, 2 usage error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .analysis import (DivergenceSpec, contribution_terms, decompose, discrepancy,
                       divergence_analytic, divergence_growth, divergence_target)
from .errors import BudgetExceeded, OddHorizon, RotorTreeError
from .exact import ExactAmount
from .forcing import (placement_rows, synthesize, target_from_json, target_to_json,
                      verify_residues)
from .kernels import (KernelTable, ballot_kernel, influence_peak_time, path_count)
from .machines import (ROTOR_MODES, config_from_json, config_to_json, rotor_run,
                       trajectory_rows)
from .tree import ORIGIN, TreeParams, vertex_from_str, vertex_to_str
from .verify import SUITES, run_suite

FORMAT_VERSION = "1"
DECIMAL_PLACES = 12


@dataclass
class RunManifest:
    """Reproducibility record embedded (by hash) in every artifact."""

    command: str
    inputs: list[str] = field(default_factory=list)
    parameters: dict = field(default_factory=dict)
    out_dir: str | None = None
    format_version: str = FORMAT_VERSION

    def canonical_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, separators=(",", ":"))

    @property
    def hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()


def _write_manifest(manifest: RunManifest, out_dir: Path) -> None:
    data = asdict(manifest)
    data["hash"] = manifest.hash
    (out_dir / "manifest.json").write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def _write_csv(path: Path, header: list[str], rows, manifest: RunManifest) -> None:
    lines = [f"# manifest_hash={manifest.hash}", ",".join(header)]
    lines.extend(",".join(str(c) for c in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def _write_json(path: Path, data: dict, manifest: RunManifest) -> None:
    data = dict(data)
    data["_manifest_hash"] = manifest.hash
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def _exact_line(numerator: int, k: int, kpow: int) -> str:
    """Render `numerator / k^kpow` as raw form, simplified value, decimal."""
    raw = f"{numerator}/{k}^{kpow}"
    amount = ExactAmount(k, numerator, kpow)
    if amount.is_integer():
        return f"{raw} = {amount}"
    return f"{raw} = {amount} ≈ {amount.decimal_str(DECIMAL_PLACES)}"


# -- kernels ------------------------------------------------------------------

def cmd_kernels(args) -> int:
    params = TreeParams(args.k)
    table = KernelTable(params)
    what = args.what
    if what == "tmax":
        if args.x is None:
            raise ValueError("--what tmax needs --x")
        print(influence_peak_time(args.x, params))
        return 0
    if args.x is None or args.t is None:
        raise ValueError(f"--what {what} needs --x and --t")
    x, t, k = args.x, args.t, args.k
    if what == "n":
        print(_exact_line(path_count(x, t, table), k, 0))
    elif what == "H":
        print(_exact_line(path_count(x, t, table), k, t))
    elif what == "i":
        print(_exact_line(ballot_kernel(x, t, table), k, 0))
    elif what == "inf":
        if args.a not in (-1, 1):
            raise ValueError("--what inf needs --a -1 (inward) or --a 1 (outward)")
        i_val = ballot_kernel(x, t, table)
        numerator = i_val if args.a == -1 else -(i_val // (k - 1))
        print(_exact_line(numerator, k, t))
    return 0


# -- simulate -----------------------------------------------------------------

def cmd_simulate(args) -> int:
    config_path = Path(args.config)
    config = config_from_json(json.loads(config_path.read_text()))
    params = config.params
    table = KernelTable(params)
    watch = vertex_from_str(args.watch, params)
    manifest = RunManifest(
        "simulate", inputs=[str(config_path)],
        parameters={"k": params.k, "T": args.T, "watch": args.watch},
        out_dir=args.out)
    traj = rotor_run(config, args.T)
    d = discrepancy(traj, args.T, watch, table)
    label = args.watch or "origin"
    print(f"discrepancy at {label} after T={args.T}: "
          f"{d.as_kpow_str()} = {d} ≈ {d.decimal_str(DECIMAL_PLACES)}")
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        _write_csv(out_dir / "trajectory.csv", ["t", "vertex", "chips", "rotor"],
                   trajectory_rows(traj), manifest)
        k = params.k
        schedule = traj.schedule(args.T)
        rows = []
        for v in sorted(schedule.bursts, key=lambda u: (len(u), u)):
            for term in contribution_terms(v, schedule, args.T, table):
                coeff = "1" if term.inward else f"-1/{k - 1}"
                rows.append((vertex_to_str(v), term.time, coeff,
                             term.value.as_kpow_str(),
                             term.value.decimal_str(DECIMAL_PLACES)))
        _write_csv(out_dir / "decomposition.csv",
                   ["vertex", "s", "coefficient", "value-exact", "value-decimal"],
                   rows, manifest)
        total = decompose(traj, args.T, table).total
        _write_json(out_dir / "discrepancy.json", {
            "watch": args.watch, "T": args.T,
            "discrepancy": d.as_kpow_str(),
            "origin_decomposition_total": total.as_kpow_str(),
        }, manifest)
        _write_manifest(manifest, out_dir)
    return 0


# -- force --------------------------------------------------------------------

def cmd_force(args) -> int:
    target_path = Path(args.target)
    target = target_from_json(json.loads(target_path.read_text()))
    manifest = RunManifest(
        "force", inputs=[str(target_path)],
        parameters={"k": target.params.k, "horizon": target.horizon,
                    "radius": target.radius, "cone": target.cone,
                    "mode": args.mode, "default_rotor": args.default_rotor},
        out_dir=args.out)
    result = synthesize(target, default_rotor=args.default_rotor, mode=args.mode)
    report = verify_residues(result.config, target)
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        _write_json(out_dir / "config.json", config_to_json(result.config), manifest)
        _write_json(out_dir / "target.json", target_to_json(target), manifest)
        _write_csv(out_dir / "placements.csv", ["stage", "vertex", "epsilon"],
                   placement_rows(result), manifest)
        _write_manifest(manifest, out_dir)
    if report.ok:
        print(f"verified 100% ({report.cells_checked} cells, "
              f"{len(result.placements)} placements, "
              f"{result.total_chips()} chips)")
        return 0
    v, t, got, want = report.mismatches[0]
    print(f"verification FAILED: {len(report.mismatches)}+ mismatches of "
          f"{report.cells_checked} cells; first at {vertex_to_str(v)!r}@{t}: "
          f"got {got}, want {want}", file=sys.stderr)
    return 1


# -- diverge ------------------------------------------------------------------

def cmd_diverge(args) -> int:
    params = TreeParams(args.k)
    horizons = sorted({int(s) for s in args.T.split(",")})
    manifest = RunManifest(
        "diverge", parameters={"k": args.k, "T": horizons, "mode": args.mode},
        out_dir=args.out)
    rows = divergence_growth(params, horizons)
    simulated: dict[int, ExactAmount] = {}
    if args.mode in ("simulate", "both"):
        table = KernelTable(params)
        for T in horizons:
            if args.k != 3 or T > args.sim_cap:
                raise ValueError(
                    f"simulate mode is capped at k=3, T <= {args.sim_cap} "
                    f"(got k={args.k}, T={T}); raise --sim-cap to override")
            spec = DivergenceSpec(params, T)
            target, rotor_mode = divergence_target(spec)
            result = synthesize(target, default_rotor=rotor_mode)
            traj = rotor_run(result.config, T, cone=(ORIGIN, 0))
            simulated[T] = discrepancy(traj, T, ORIGIN, table)

    header = ["T", "discrepancy-exact", "discrepancy-decimal",
              "sqrt(kT)", "ratio", "comparator"]
    if simulated:
        header.append("simulated-exact")
    table_rows = []
    mismatch = None
    for row in rows:
        out = [row.horizon, row.exact.as_kpow_str(),
               f"{row.decimal:.{DECIMAL_PLACES}f}", f"{row.sqrt_kt:.{DECIMAL_PLACES}f}",
               f"{row.ratio:.{DECIMAL_PLACES}f}", f"{row.comparator:.{DECIMAL_PLACES}f}"]
        if simulated:
            sim = simulated[row.horizon]
            out.append(sim.as_kpow_str())
            if args.mode == "both" and sim != row.exact:
                mismatch = (row.horizon, sim, row.exact)
        table_rows.append(out)
    print(",".join(header))
    for out in table_rows:
        print(",".join(str(c) for c in out))
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        _write_csv(out_dir / "growth.csv", header, table_rows, manifest)
        _write_manifest(manifest, out_dir)
    if mismatch:
        T, sim, exact = mismatch
        print(f"simulated discrepancy diverges from analytic at T={T}: "
              f"{sim.as_kpow_str()} != {exact.as_kpow_str()}", file=sys.stderr)
        return 1
    return 0


# -- verify -------------------------------------------------------------------

def cmd_verify(args) -> int:
    results = run_suite(args.suite, seed=args.seed)
    failed = 0
    for r in results:
        mark = "PASS" if r.ok else "FAIL"
        line = f"{mark} [{r.suite}] {r.name}: {r.checks} checks"
        if not r.ok:
            failed += 1
            line += f", {r.failures} failures; first: {r.counterexample}"
        print(line)
    print(f"{len(results) - failed}/{len(results)} checks passed "
          f"({sum(r.checks for r in results)} cases)")
    return 1 if failed else 0


# -- entry point --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rotortree",
        description="Exact rotor-router and linear machines on the k-regular tree.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kernels", help="print one exact kernel value")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--what", choices=("n", "H", "i", "inf", "tmax"), required=True)
    p.add_argument("--x", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--a", type=int, help="direction for inf: -1 inward, 1 outward")
    p.set_defaults(func=cmd_kernels)

    p = sub.add_parser("simulate", help="run the rotor-router machine from a config")
    p.add_argument("--config", required=True, help="configuration JSON path")
    p.add_argument("--T", type=int, required=True, help="rounds to run")
    p.add_argument("--watch", default="", help="vertex to report (default origin)")
    p.add_argument("--out", help="directory for trajectory/decomposition CSVs")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("force", help="synthesize a configuration hitting residues")
    p.add_argument("--target", required=True, help="residue target JSON path")
    p.add_argument("--out", help="directory for config JSON and placements CSV")
    p.add_argument("--mode", choices=("resimulate", "incremental"),
                   default="resimulate")
    p.add_argument("--default-rotor", choices=ROTOR_MODES, default="canonical")
    p.set_defaults(func=cmd_force)

    p = sub.add_parser("diverge", help="divergence-family growth table")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--T", required=True, help="even horizon or comma list, e.g. 4,6,8")
    p.add_argument("--mode", choices=("analytic", "simulate", "both"),
                   default="analytic")
    p.add_argument("--sim-cap", type=int, default=12,
                   help="largest T allowed in simulate mode (default 12)")
    p.add_argument("--out", help="directory for growth.csv")
    p.set_defaults(func=cmd_diverge)

    p = sub.add_parser("verify", help="run a self-check suite")
    p.add_argument("--suite", choices=SUITES, default="all")
    p.add_argument("--seed", type=int, default=2024)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse uses its own exit code for usage errors
        return 2 if exc.code else 0
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 3
    except (RotorTreeError, ValueError, KeyError, OSError,
            json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
