"""Command line tool: optimize wire layouts, evaluate and plot designs.

Subcommands: optimize, evaluate, plot, oracle. Exit codes: 0 success,
1 runtime failure, 2 usage or configuration error. The TLO_THREADS
environment variable caps parallel design evaluation (default 1).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .arrangement import (
    ConstantArrangement,
    design_from_jsonable,
    design_to_jsonable,
    genome_decode,
    space_for,
)
from .config import ConfigError, ScenarioConfig, load_config
from .feasibility import (
    InfeasibleDesign,
    evaluate,
    gravity_center,
    make_evaluator,
    trace_polygon,
)
from .model import joint_jacobian
from .nsga2 import evolve
from .oracle import force_polytope_exact, ray_h, velocity_polytope_exact

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


def _dump_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _effective_raw(cfg: ScenarioConfig) -> dict:
    """Config echo with any command line overrides folded in."""
    raw = json.loads(json.dumps(cfg.raw))
    raw["optimizer"] = {
        "population": cfg.optimizer.population,
        "budget": cfg.optimizer.budget,
        "seed": cfg.optimizer.seed,
    }
    return raw


def cmd_optimize(args) -> int:
    cfg = load_config(args.config)
    if args.population is not None:
        cfg.optimizer.population = args.population
    if args.budget is not None:
        cfg.optimizer.budget = args.budget
    if args.seed is not None:
        cfg.optimizer.seed = args.seed
    opt = cfg.optimizer
    if opt.population < 2 or opt.population % 2:
        raise ConfigError("population must be even and at least 2", ("optimizer", "population"))
    if opt.budget < opt.population:
        raise ConfigError("budget must be at least the population size", ("optimizer", "budget"))

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    scenario = cfg.scenario()
    evaluator = make_evaluator(cfg.robot, scenario)

    progress_path = out / "progress.ndjson"
    t0 = time.perf_counter()
    with progress_path.open("w") as stream:

        def on_generation(entry: dict):
            stream.write(json.dumps(entry, sort_keys=True) + "\n")

        archive = evolve(
            evaluator,
            cfg.space,
            population=opt.population,
            budget=opt.budget,
            seed=opt.seed,
            max_objective=scenario.max_objective,
            on_generation=on_generation,
        )
    elapsed = time.perf_counter() - t0

    with (out / "samples.csv").open("w", newline="") as f:
        writer = csv.writer(f)
        n_r, n_c = cfg.space.n_reals, cfg.space.n_cats
        writer.writerow(
            ["index", "feasible", "e_force", "e_velocity"]
            + [f"real_{i}" for i in range(n_r)]
            + [f"cat_{i}" for i in range(n_c)]
        )
        for idx, ind in enumerate(archive.individuals):
            writer.writerow(
                [idx, int(ind.feasible), repr(float(ind.e_force)), repr(float(ind.e_velocity))]
                + [repr(float(v)) for v in ind.genome.reals]
                + [int(v) for v in ind.genome.cats]
            )

    front = [
        {
            "e_force": ind.e_force,
            "e_velocity": ind.e_velocity,
            "genome": {
                "reals": ind.genome.reals.tolist(),
                "cats": [int(v) for v in ind.genome.cats],
            },
            "design": design_to_jsonable(genome_decode(ind.genome, cfg.space), cfg.robot),
        }
        for ind in archive.front
    ]
    _dump_json(
        out / "pareto.json",
        {
            "schema_version": 1,
            "seed": archive.seed,
            "evaluation_count": archive.evaluation_count,
            "front": front,
        },
    )
    n_feasible = sum(1 for ind in archive.individuals if ind.feasible)
    _dump_json(
        out / "run_meta.json",
        {
            "schema_version": 1,
            "seed": archive.seed,
            "budget": opt.budget,
            "population": opt.population,
            "generations": archive.generations,
            "evaluation_count": archive.evaluation_count,
            "n_feasible": n_feasible,
            "n_pruned": archive.evaluation_count - n_feasible,
            "timings": {"total_s": elapsed},
            "tool_version": __version__,
            "config": _effective_raw(cfg),
        },
    )
    print(
        f"{cfg.name}: {archive.evaluation_count} evaluations, "
        f"{n_feasible} feasible, front size {len(archive.front_indices)} -> {out}"
    )
    return EXIT_OK


def _load_design(path: str, cfg: ScenarioConfig):
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid design JSON: {exc.msg}", (), exc.lineno) from exc
    try:
        design = design_from_jsonable(doc, cfg.robot)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad design document: {exc}") from exc
    space = space_for(design, cfg.robot.n_joints)
    if space != cfg.space:
        raise ConfigError(
            f"design shape {space.kind} M={space.n_wires} N={space.n_relay_points} "
            f"does not match config mode {cfg.space.kind} M={cfg.space.n_wires} "
            f"N={cfg.space.n_relay_points}"
        )
    return design


def cmd_evaluate(args) -> int:
    cfg = load_config(args.config)
    design = _load_design(args.design, cfg)
    scenario = cfg.scenario()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    result = evaluate(cfg.robot, design, scenario)
    report = {
        "schema_version": 1,
        "feasible": result.feasible,
        "design": design_to_jsonable(design, cfg.robot),
        "scenario": _effective_raw(cfg),
        "e_force": result.e_force,
        "e_velocity": result.e_velocity,
    }
    if result.feasible:
        per_state = []
        for k, q in enumerate(scenario.joint_states):
            if scenario.gravity:
                gc = gravity_center(cfg.robot, q)
                center = gc.center
                residual = gc.residual
            else:
                center = scenario.target.force_center
                residual = None
            force_poly = trace_polygon(
                cfg.robot, design, q, "force", scenario.limits,
                n_rays=args.rays, center=center, gravity=scenario.gravity,
            )
            velocity_poly = trace_polygon(
                cfg.robot, design, q, "velocity", scenario.limits, n_rays=args.rays
            )
            per_state.append(
                {
                    "theta_deg": np.rad2deg(q).tolist(),
                    "h_force": result.h_force[k].tolist(),
                    "h_velocity": result.h_velocity[k].tolist(),
                    "force_center": np.asarray(center, dtype=float).tolist(),
                    "gravity_center_residual": residual,
                    "force_polygon": np.round(force_poly, 12).tolist(),
                    "velocity_polygon": np.round(velocity_poly, 12).tolist(),
                }
            )
        report["per_state"] = per_state
    path = out / "report.json"
    _dump_json(path, report)
    print(
        f"feasible={result.feasible} e_force={result.e_force} "
        f"e_velocity={result.e_velocity} -> {path}"
    )
    return EXIT_OK


def cmd_plot(args) -> int:
    try:
        report = json.loads(Path(args.report).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid report JSON: {exc.msg}", (), exc.lineno) from exc
    from .config import parse_config
    from .svgplot import arrangement_panel, space_panel

    cfg = parse_config(report["scenario"])
    design = design_from_jsonable(report["design"], cfg.robot)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for k, state in enumerate(report.get("per_state", [])):
        theta = ", ".join(f"{v:.0f}" for v in state["theta_deg"])
        force = space_panel(
            np.array(state["force_polygon"]),
            np.array(state["force_center"]),
            cfg.target.force_radii,
            f"force space, state {k + 1} (theta = {theta} deg)",
            "N",
            "F",
        )
        velocity = space_panel(
            np.array(state["velocity_polygon"]),
            np.zeros(2),
            cfg.target.velocity_radii,
            f"velocity space, state {k + 1} (theta = {theta} deg)",
            "m/s",
            "v",
        )
        for name, text in ((f"force_state{k + 1}.svg", force), (f"velocity_state{k + 1}.svg", velocity)):
            (out / name).write_text(text)
            written.append(name)
    q0 = cfg.joint_states[0]
    theta = ", ".join(f"{v:.0f}" for v in np.rad2deg(q0))
    (out / "arrangement.svg").write_text(
        arrangement_panel(cfg.robot, design, q0, f"wire arrangement (theta = {theta} deg)")
    )
    written.append("arrangement.svg")
    print(f"wrote {len(written)} SVG files -> {out}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    cfg = load_config(args.config)
    if cfg.space.kind != "constant":
        raise ConfigError("oracle cross-check needs a constant-mode config", ("mode", "kind"))
    scenario = cfg.scenario()
    rng = np.random.default_rng(args.seed if args.seed is not None else cfg.optimizer.seed)
    from .feasibility import (
        _force_h_all,
        _velocity_h_all,
        force_directions,
        velocity_directions,
    )
    from .model import gravity_torque
    from .arrangement import muscle_jacobian

    wf = force_directions(scenario.target)
    wv = velocity_directions(scenario.target)
    worst = 0.0
    failures = 0
    done = 0
    attempts = 0
    while done < args.trials and attempts < 200 * max(args.trials, 1) + 1000:
        attempts += 1
        q = rng.uniform(-np.pi / 2, np.pi / 2, size=cfg.robot.n_joints)
        J = joint_jacobian(cfg.robot, q)
        if abs(np.linalg.det(J)) < 0.05:
            continue
        design = ConstantArrangement(rng.random((cfg.space.n_wires, cfg.robot.n_joints)))
        G = muscle_jacobian(cfg.robot, design, q)
        if scenario.gravity:
            rhs = gravity_torque(cfg.robot, q)
            center = np.linalg.solve(J.T, rhs)
        else:
            center = scenario.target.force_center
            rhs = J.T @ center
        hf = _force_h_all(G, J.T, rhs, wf @ J, scenario.limits, scenario.h_cap)
        if hf is None:
            continue  # pruned design: both routes agree it is infeasible
        hv = _velocity_h_all(G, J, wv, scenario.limits, scenario.h_cap)
        force_poly = force_polytope_exact(G, J, scenario.limits.f_min, scenario.limits.f_max)
        velocity_poly = velocity_polytope_exact(
            G, J, scenario.limits.ldot_min, scenario.limits.ldot_max
        )
        for i in range(scenario.target.n_directions):
            ref = min(ray_h(force_poly, center, wf[i]), scenario.h_cap)
            worst = max(worst, abs(hf[i] - ref))
            failures += abs(hf[i] - ref) > args.tol
            ref = min(ray_h(velocity_poly, np.zeros(2), wv[i]), scenario.h_cap)
            worst = max(worst, abs(hv[i] - ref))
            failures += abs(hv[i] - ref) > args.tol
        done += 1
    print(
        f"oracle cross-check: {done} trials, max |h_lp - h_geometric| = {worst:.3e}, "
        f"{failures} failures at tol {args.tol:g}"
    )
    if done < args.trials:
        print(f"warning: only {done}/{args.trials} unpruned trials found", file=sys.stderr)
    return EXIT_OK if failures == 0 else EXIT_RUNTIME


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tlo",
        description="Wire arrangement optimization for planar tendon-driven manipulators",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize", help="run the evolutionary search on a scenario")
    p.add_argument("--config", required=True, help="scenario JSON path")
    p.add_argument("--out", default="tlo-out", help="output directory")
    p.add_argument("--seed", type=int, default=None, help="override optimizer.seed")
    p.add_argument("--budget", type=int, default=None, help="override optimizer.budget")
    p.add_argument("--population", type=int, default=None, help="override optimizer.population")
    p.set_defaults(fn=cmd_optimize)

    p = sub.add_parser("evaluate", help="score one design and trace its feasible spaces")
    p.add_argument("--config", required=True)
    p.add_argument("--design", required=True, help="design JSON path")
    p.add_argument("--out", default="tlo-out")
    p.add_argument("--rays", type=int, default=64, help="boundary rays per polygon")
    p.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser("plot", help="render SVG panels from an evaluation report")
    p.add_argument("report", help="report.json produced by the evaluate command")
    p.add_argument("--out", default="tlo-out")
    p.set_defaults(fn=cmd_plot)

    p = sub.add_parser("oracle", help="cross-check LP scores against exact geometry")
    p.add_argument("--config", required=True, help="constant-mode scenario JSON")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(fn=cmd_oracle)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InfeasibleDesign as exc:
        print(f"infeasible design: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
