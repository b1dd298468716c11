"""Command-line front end: config parsing, dispatch, artifact emission.

One command per invocation.  Configuration comes from an optional JSON
file plus flat flag overrides (flags win).  Every workflow writes JSON
reports (validated against the schemas shipped with the package) and CSV
field dumps into the output directory, prints one machine-readable summary
line, and exits 0 exactly when the scientific assertions of the invoked
workflow hold.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .radial import ModelParams, RadialField, build_grid, field_to_csv
from .potentials import KernelKind, oracle_pair, pair_energy
from .solver import (
    ProjectionError,
    SolverConfig,
    make_seed,
    project_to_manifold,
    solve_ground_state,
    solve_sp_ground_state,
)
from .studies import identity_audit, nonexistence_scan, sweep_a

__all__ = ["RunConfig", "parse_config", "run", "main"]

COMMANDS = ("solve", "solve_sp", "fiber", "sweep_a", "nonexist_scan", "audit", "oracle_check")

_DEFAULTS = {
    "command": None,
    "a": 1.0,
    "q": 1.0,
    "p": 5.0,
    "n": 512,
    "r_max": 40.0,
    "spacing": "graded",
    "max_iters": 4000,
    "tol_residual": 1e-6,
    "tol_root": 1e-11,
    "step0": 0.5,
    "shrink": 0.5,
    "armijo": 1e-4,
    "t_min": 0.05,
    "t_max": 20.0,
    "n_scan": 33,
    "seed_profile": "gaussian",
    "experimental": False,
    "a_list": [1.0, 0.3, 0.1, 0.03],
    "p_values": [6.0],
    "n_samples": 100,
    "rng_seed": 20240,
    "out_dir": "sbp_out",
    "input_profile": None,
}


@dataclass
class RunConfig:
    command: str
    model: ModelParams
    grid_n: int
    grid_r_max: float
    grid_spacing: str
    solver: SolverConfig
    a_list: list
    p_values: list
    n_samples: int
    rng_seed: int
    out_dir: Path
    input_profile: str | None

    def build_grid(self):
        return build_grid(self.grid_n, self.grid_r_max, self.grid_spacing)


def _load_file(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ValueError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ValueError(f"config file is not valid JSON: {exc}")
    if not isinstance(data, dict):
        raise ValueError("config file must hold a JSON object")
    for key in data:
        if key not in _DEFAULTS:
            raise ValueError(f"unknown config field {key!r}")
    return data


def parse_config(argv=None) -> RunConfig:
    """Merge defaults, config file and flags (flags win) into a validated
    RunConfig.  Raises ValueError with the offending field named."""
    ap = argparse.ArgumentParser(
        prog="sbp",
        description="Ground states of the zero-mass Schrodinger-Bopp-Podolsky system",
    )
    ap.add_argument("command", nargs="?", choices=COMMANDS, help="workflow to run")
    ap.add_argument("--config", help="JSON config file; flags override its values")
    ap.add_argument("--a", type=float)
    ap.add_argument("--q", type=float)
    ap.add_argument("--p", type=float)
    ap.add_argument("--n", type=int)
    ap.add_argument("--r-max", dest="r_max", type=float)
    ap.add_argument("--spacing", choices=("uniform", "graded"))
    ap.add_argument("--max-iters", dest="max_iters", type=int)
    ap.add_argument("--tol-residual", dest="tol_residual", type=float)
    ap.add_argument("--tol-root", dest="tol_root", type=float)
    ap.add_argument("--step0", type=float)
    ap.add_argument("--shrink", type=float)
    ap.add_argument("--armijo", type=float)
    ap.add_argument("--t-min", dest="t_min", type=float)
    ap.add_argument("--t-max", dest="t_max", type=float)
    ap.add_argument("--n-scan", dest="n_scan", type=int)
    ap.add_argument("--seed-profile", dest="seed_profile", choices=("gaussian", "bump", "file"))
    ap.add_argument("--experimental", action="store_true", default=None)
    ap.add_argument("--a-list", dest="a_list", type=float, nargs="+")
    ap.add_argument("--p-values", dest="p_values", type=float, nargs="+")
    ap.add_argument("--n-samples", dest="n_samples", type=int)
    ap.add_argument("--rng-seed", dest="rng_seed", type=int)
    ap.add_argument("--out-dir", dest="out_dir")
    ap.add_argument("--input-profile", dest="input_profile")
    ns = ap.parse_args(argv)

    merged = dict(_DEFAULTS)
    if ns.config:
        merged.update(_load_file(ns.config))
    for key in _DEFAULTS:
        flag = getattr(ns, key, None)
        if flag is not None:
            merged[key] = flag

    command = merged["command"]
    if command is None:
        raise ValueError("missing required field 'command' (flag or config file)")
    if command not in COMMANDS:
        raise ValueError(f"unknown command {command!r}")

    model = ModelParams(a=float(merged["a"]), q=float(merged["q"]), p=float(merged["p"]))
    if command in ("solve", "audit", "sweep_a"):
        # refuse exponents outside the solvable window up front
        try:
            model.require_solver_range(bool(merged["experimental"]))
        except ValueError as exc:
            raise ValueError(f"field 'p': {exc}")

    solver = SolverConfig(
        max_iters=int(merged["max_iters"]),
        tol_residual=float(merged["tol_residual"]),
        tol_root=float(merged["tol_root"]),
        step0=float(merged["step0"]),
        shrink=float(merged["shrink"]),
        armijo=float(merged["armijo"]),
        t_scan=(float(merged["t_min"]), float(merged["t_max"]), int(merged["n_scan"])),
        seed_profile=str(merged["seed_profile"]),
        seed_path=merged["input_profile"],
        experimental=bool(merged["experimental"]),
    )
    return RunConfig(
        command=command,
        model=model,
        grid_n=int(merged["n"]),
        grid_r_max=float(merged["r_max"]),
        grid_spacing=str(merged["spacing"]),
        solver=solver,
        a_list=[float(x) for x in merged["a_list"]],
        p_values=[float(x) for x in merged["p_values"]],
        n_samples=int(merged["n_samples"]),
        rng_seed=int(merged["rng_seed"]),
        out_dir=Path(merged["out_dir"]),
        input_profile=merged["input_profile"],
    )


# ---------------------------------------------------------------------------
# emission helpers
# ---------------------------------------------------------------------------

def _schema(name: str) -> dict:
    with resources.files("sbp.schemas").joinpath(name).open() as fh:
        return json.load(fh)


def _plain(obj):
    """Recursively convert numpy scalars/arrays to plain JSON types."""
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj


def _write_json(path: Path, payload: dict, schema_name: str) -> None:
    import jsonschema

    payload = _plain({"schema_version": 1, **payload})
    jsonschema.validate(payload, _schema(schema_name))
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _summary(command: str, ok: bool, **kv) -> None:
    parts = [f"command={command}", f"status={'pass' if ok else 'fail'}"]
    parts += [f"{k}={v}" for k, v in kv.items()]
    print("SBP " + " ".join(parts))


def _emit_solve(cfg: RunConfig, report, out: Path, with_audit: bool = True) -> bool:
    field_to_csv(report.u, out / "u.csv", label="u")
    field_to_csv(report.phi, out / "phi.csv", label="phi")
    payload = {
        "kind": "solve_report",
        **report.summary_dict(),
        "config": {
            "n": cfg.grid_n,
            "r_max": cfg.grid_r_max,
            "spacing": cfg.grid_spacing,
            "tol_residual": cfg.solver.tol_residual,
            "tol_root": cfg.solver.tol_root,
            "max_iters": cfg.solver.max_iters,
            "seed_profile": cfg.solver.seed_profile,
        },
    }
    _write_json(out / "report.json", payload, "report.schema.json")
    ok = bool(report.converged)
    if with_audit and report.converged:
        table = identity_audit(report)
        _write_json(out / "audit.json", {"kind": "audit", **table.to_dict()},
                    "audit.schema.json")
        ok = ok and table.all_passed
    return ok


def run(cfg: RunConfig) -> int:
    """Dispatch one workflow; returns the process exit status."""
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    grid = cfg.build_grid()

    try:
        if cfg.command == "solve":
            report = solve_ground_state(cfg.model, grid, cfg.solver)
            ok = _emit_solve(cfg, report, out)
            _summary("solve", ok, a=cfg.model.a, q=cfg.model.q, p=cfg.model.p,
                     c_a=f"{report.energy_c:.12g}", converged=report.converged,
                     residual=f"{report.residual_norm:.3e}")
            return 0 if ok else 1

        if cfg.command == "solve_sp":
            report = solve_sp_ground_state(cfg.model.q, cfg.model.p, grid, cfg.solver)
            ok = _emit_solve(cfg, report, out)
            _summary("solve_sp", ok, q=cfg.model.q, p=cfg.model.p,
                     c0=f"{report.energy_c:.12g}", converged=report.converged)
            return 0 if ok else 1

        if cfg.command == "audit":
            report = solve_ground_state(cfg.model, grid, cfg.solver)
            if not report.converged:
                _summary("audit", False, reason="solve-not-converged")
                return 1
            table = identity_audit(report)
            _write_json(out / "audit.json", {"kind": "audit", **table.to_dict()},
                        "audit.schema.json")
            _summary("audit", table.all_passed,
                     rows=len(table.rows), a=cfg.model.a)
            return 0 if table.all_passed else 1

        if cfg.command == "fiber":
            if cfg.input_profile:
                seed = make_seed(grid, "file", cfg.input_profile)
            else:
                seed = make_seed(grid, cfg.solver.seed_profile)
            fib = project_to_manifold(seed, cfg.model, t_scan=cfg.solver.t_scan,
                                      tol_root=cfg.solver.tol_root)
            payload = {"kind": "fiber", "params": {"a": cfg.model.a, "q": cfg.model.q,
                       "p": cfg.model.p}, **fib.to_dict()}
            _write_json(out / "fiber.json", payload, "fiber.schema.json")
            ok = fib.unique_sign_change
            _summary("fiber", ok, t_star=f"{fib.t_star:.10g}",
                     zeta=f"{fib.zeta_at_t:.10g}")
            return 0 if ok else 1

        if cfg.command == "sweep_a":
            rep = sweep_a(cfg.a_list, cfg.model.q, cfg.model.p, grid, cfg.solver)
            _write_json(out / "sweep.json", {"kind": "sweep", **rep.to_dict()},
                        "sweep.schema.json")
            rows = np.array([[e.a, e.c_a, e.gap, e.dirichlet_norm] for e in rep.entries])
            np.savetxt(out / "sweep.csv", rows, fmt="%.17g", delimiter=",",
                       header="a,c_a,gap,dirichlet_norm", comments="")
            ok = rep.monotone_ok and rep.bounded_ok and rep.gap_shrinks and rep.all_converged
            _summary("sweep_a", ok, c0=f"{rep.c0:.10g}",
                     entries=len(rep.entries))
            return 0 if ok else 1

        if cfg.command == "nonexist_scan":
            rep = nonexistence_scan(cfg.p_values, cfg.model.a, cfg.model.q,
                                    cfg.n_samples, cfg.rng_seed)
            _write_json(out / "scan.json", {"kind": "scan", **rep.to_dict()},
                        "scan.schema.json")
            ok = rep.violations == 0
            _summary("nonexist_scan", ok, violations=rep.violations,
                     p_values=",".join(str(p) for p in rep.p_values))
            return 0 if ok else 1

        if cfg.command == "oracle_check":
            rows, worst = _oracle_fixture_rows()
            payload = {"kind": "oracle", "worst_rel_error": worst, "rows": rows}
            _write_json(out / "oracle.json", payload, "oracle.schema.json")
            ok = worst <= 1e-6
            _summary("oracle_check", ok, worst=f"{worst:.3e}", cases=len(rows))
            return 0 if ok else 1
    except ProjectionError as exc:
        _summary(cfg.command, False, error=f"projection:{exc}")
        return 1

    raise AssertionError(f"unhandled command {cfg.command}")


def oracle_fixture_profiles(grid):
    """The five smooth fixture profiles of the oracle suite."""
    r = grid.nodes
    return {
        "gaussian": np.exp(-(r**2)),
        "wide_gaussian": np.exp(-((r / 2.0) ** 2)),
        "shifted_bump": np.exp(-((r - 1.5) ** 2)),
        "lorentzian": (1.0 + r**2) ** -2,
        "two_scale": np.exp(-(r**2)) + 0.5 * np.exp(-((r - 2.0) ** 2) / 4.0),
    }


def _oracle_fixture_rows():
    grid = build_grid(256, 8.0, "uniform")
    kinds = [
        ("coulomb", KernelKind.coulomb()),
        ("yukawa", KernelKind.yukawa(1.0)),
        ("bopp_podolsky", KernelKind.bopp_podolsky(1.0)),
        ("pure_exponential", KernelKind.pure_exponential(1.0)),
    ]
    rows = []
    worst = 0.0
    for pname, vals in oracle_fixture_profiles(grid).items():
        u = RadialField(grid, vals)
        for kname, kind in kinds:
            fast = pair_energy(kind, u)
            slow = oracle_pair(kind, u)
            rel = abs(fast - slow) / abs(slow)
            worst = max(worst, rel)
            rows.append({"profile": pname, "kernel": kname,
                         "pair_energy": fast, "oracle": slow, "rel_error": rel})
    return rows, worst


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
    except ValueError as exc:
        print(f"SBP command=parse status=fail error={exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
