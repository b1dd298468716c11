"""Orchestrated experiments on top of the solver.

Three workflows: the screening sweep a -> 0 against the Poisson reference
(energy ordering, gap shrinkage, uniform Dirichlet bound), randomized sign
scans certifying the nonexistence combinations outside the solvable
exponent range, and the identity audit that certifies a converged report
against every variational identity.

The sweep asserts only energy-level facts; profile distances to the a = 0
solution are reported as diagnostics because the limit theorem guarantees
weak convergence only.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict

import numpy as np

from .radial import (
    ModelParams,
    RadialField,
    RadialGrid,
    build_grid,
    dirichlet_energy,
    lp_norm,
)
from .potentials import (
    KernelKind,
    anorm_identity_residual,
    delta_phi_sq,
    pair_energy,
)
from .functionals import identity_scales, nonexistence_combos
from .solver import SolveReport, SolverConfig, project_to_manifold, solve_ground_state, solve_sp_ground_state

__all__ = [
    "SweepEntry",
    "SweepReport",
    "ScanReport",
    "AuditRow",
    "AuditTable",
    "sweep_a",
    "random_profile",
    "nonexistence_scan",
    "identity_audit",
]


# ---------------------------------------------------------------------------
# the a -> 0 sweep
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepEntry:
    a: float
    c_a: float
    t_u: float
    gap: float
    l2_distance: float
    dirichlet_distance: float
    dirichlet_norm: float
    residual_norm: float
    nehari_rel: float
    pohozaev_rel: float
    manifold_rel: float
    converged: bool
    iters: int

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class SweepReport:
    entries: list
    c0: float
    monotone_ok: bool
    bounded_ok: bool
    gap_shrinks: bool
    all_converged: bool
    q: float
    p: float
    reports: list = field(default_factory=list, repr=False)
    report_sp: SolveReport | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "p": self.p,
            "c0": self.c0,
            "monotone_ok": self.monotone_ok,
            "bounded_ok": self.bounded_ok,
            "gap_shrinks": self.gap_shrinks,
            "all_converged": self.all_converged,
            "entries": [e.to_dict() for e in self.entries],
        }


def sweep_a(a_list, q: float, p: float, grid: RadialGrid,
            cfg: SolverConfig = SolverConfig()) -> SweepReport:
    """Solve along a decreasing list of screening lengths, warm-starting
    each solve from the previous profile, against the a = 0 reference.

    Checks: c_a <= c0, c_a nonincreasing in a, |c_a - c0| shrinking along
    the list, and the Dirichlet bound (2p-3)/(p-3) * c0 from the level
    identity with positive pair terms.
    """
    a_list = [float(a) for a in a_list]
    if any(a <= 0.0 for a in a_list):
        raise ValueError("sweep needs positive screening lengths")
    if any(x <= y for x, y in zip(a_list, a_list[1:])):
        raise ValueError("a_list must be strictly decreasing")
    ModelParams(a=a_list[0], q=q, p=p).require_solver_range(cfg.experimental)

    report_sp = solve_sp_ground_state(q, p, grid, cfg)
    c0 = report_sp.energy_c
    u0 = report_sp.u
    d_bound = (2.0 * p - 3.0) / (p - 3.0) * c0

    entries = []
    reports = []
    seed = None
    for a in a_list:
        params = ModelParams(a=a, q=q, p=p)
        rep = solve_ground_state(params, grid, cfg, seed_field=seed)
        seed = rep.u
        reports.append(rep)
        b = rep.breakdown
        scales = identity_scales(b, q, p, a)
        fib = project_to_manifold(u0, params, t_scan=cfg.t_scan, tol_root=cfg.tol_root)
        diff = rep.u.values - u0.values
        l2_dist = lp_norm(RadialField(grid, diff), 2.0)
        dir_dist = float(np.sqrt(max(dirichlet_energy(RadialField(grid, diff)), 0.0)))
        entries.append(SweepEntry(
            a=a,
            c_a=rep.energy_c,
            t_u=fib.t_star,
            gap=abs(rep.energy_c - c0),
            l2_distance=l2_dist,
            dirichlet_distance=dir_dist,
            dirichlet_norm=b.dirichlet,
            residual_norm=rep.residual_norm,
            nehari_rel=abs(b.nehari) / scales["nehari"],
            pohozaev_rel=abs(b.pohozaev) / scales["pohozaev"],
            manifold_rel=abs(b.manifold) / scales["manifold"],
            converged=rep.converged,
            iters=rep.iters,
        ))

    cs = [e.c_a for e in entries]
    gaps = [e.gap for e in entries]
    monotone_ok = all(x <= y + 1e-10 for x, y in zip(cs, cs[1:]))
    bounded_ok = all(e.c_a <= c0 + 1e-8 for e in entries) and all(
        e.dirichlet_norm <= d_bound + 1e-6 for e in entries
    )
    gap_shrinks = all(x > y for x, y in zip(gaps, gaps[1:]))
    return SweepReport(
        entries=entries,
        c0=c0,
        monotone_ok=monotone_ok,
        bounded_ok=bounded_ok,
        gap_shrinks=gap_shrinks,
        all_converged=all(e.converged for e in entries),
        q=q,
        p=p,
        reports=reports,
        report_sp=report_sp,
    )


# ---------------------------------------------------------------------------
# nonexistence sign scans
# ---------------------------------------------------------------------------

def random_profile(rng: np.random.Generator, grid: RadialGrid) -> RadialField:
    """One sample of the nontrivial test ensemble: 1 to 4 radial Gaussian
    bumps, widths log-uniform in [0.2, 4], centers in [0, 6], amplitudes
    uniform in [-1, 1] with at least one bounded away from zero."""
    n_bumps = int(rng.integers(1, 5))
    vals = np.zeros(grid.n)
    for _ in range(n_bumps):
        amp = float(rng.uniform(-1.0, 1.0))
        width = float(np.exp(rng.uniform(np.log(0.2), np.log(4.0))))
        center = float(rng.uniform(0.0, 6.0))
        vals += amp * np.exp(-((grid.nodes - center) ** 2) / (2.0 * width**2))
    if float(np.max(np.abs(vals))) < 1e-3:
        vals += np.exp(-grid.nodes**2)
    return RadialField(grid, vals)


@dataclass
class ScanReport:
    p_values: list
    samples_per_p: int
    a: float
    q: float
    rng_seed: int
    combos: dict
    violations: int

    def to_dict(self) -> dict:
        return {
            "p_values": list(self.p_values),
            "samples_per_p": self.samples_per_p,
            "a": self.a,
            "q": self.q,
            "rng_seed": self.rng_seed,
            "violations": self.violations,
            "combos": {str(k): [c.to_dict() for c in v] for k, v in self.combos.items()},
        }


def _sign_rules(p: float):
    """(field, predicate) pairs asserted for this exponent."""
    rules = []
    if p >= 6.0:
        rules.append(("d_high", lambda v: v < 0.0))
    if p < 12.0 / 7.0:
        rules.append(("d_low", lambda v: v > 0.0))
    if p <= 2.0:
        rules.append(("d_radial", lambda v: v > 0.0))
    return rules


def nonexistence_scan(p_values, a: float, q: float, n_samples: int,
                      rng_seed: int, grid: RadialGrid | None = None) -> ScanReport:
    """Evaluate the nonexistence combinations on the random ensemble and
    count sign violations (strict comparisons, no tolerance slack: every
    asserted term is a definite quadrature)."""
    if n_samples < 1:
        raise ValueError("need at least one sample per exponent")
    if grid is None:
        grid = build_grid(256, 24.0, "uniform")
    rng = np.random.default_rng(rng_seed)
    combos: dict = {}
    violations = 0
    for p in p_values:
        params = ModelParams(a=a, q=q, p=float(p))
        rules = _sign_rules(float(p))
        row = []
        for _ in range(n_samples):
            u = random_profile(rng, grid)
            c = nonexistence_combos(u, params)
            row.append(c)
            for fieldname, ok in rules:
                if not ok(getattr(c, fieldname)):
                    violations += 1
        combos[float(p)] = row
    return ScanReport(
        p_values=[float(p) for p in p_values],
        samples_per_p=int(n_samples),
        a=float(a),
        q=float(q),
        rng_seed=int(rng_seed),
        combos=combos,
        violations=int(violations),
    )


# ---------------------------------------------------------------------------
# identity audit
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AuditRow:
    name: str
    residual: float
    tolerance: float
    passed: bool

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class AuditTable:
    rows: list

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def to_dict(self) -> dict:
        return {"rows": [r.to_dict() for r in self.rows], "all_passed": self.all_passed}


IDENTITY_TOL = 1e-5        # algebraic identities, relative to term scale
DERIVATIVE_TOL = 1e-3      # identities limited by finite-difference error


def identity_audit(report: SolveReport) -> AuditTable:
    """Five-row pass/fail table for a converged report: Nehari, Pohozaev,
    manifold, potential-norm and Laplacian-norm identities."""
    if not report.converged:
        raise ValueError("identity audit requires a converged report")
    b = report.breakdown
    params = report.params
    scales = identity_scales(b, params.q, params.p, params.a)
    rows = [
        AuditRow("nehari", abs(b.nehari) / scales["nehari"], IDENTITY_TOL,
                 abs(b.nehari) / scales["nehari"] < IDENTITY_TOL),
        AuditRow("pohozaev", abs(b.pohozaev) / scales["pohozaev"], IDENTITY_TOL,
                 abs(b.pohozaev) / scales["pohozaev"] < IDENTITY_TOL),
        AuditRow("manifold", abs(b.manifold) / scales["manifold"], IDENTITY_TOL,
                 abs(b.manifold) / scales["manifold"] < IDENTITY_TOL),
    ]
    if params.a > 0.0:
        anorm = anorm_identity_residual(report.u, params.a)
        rows.append(AuditRow("potential_norm", anorm, DERIVATIVE_TOL,
                             anorm < DERIVATIVE_TOL))
        lhs = delta_phi_sq(report.u, params.a)
        rhs = (2.0 * np.pi / params.a**3) * pair_energy(
            KernelKind.pure_exponential(params.a), report.u
        )
        dres = abs(lhs - rhs) / rhs if rhs > 0.0 else 0.0
        rows.append(AuditRow("laplacian_norm", dres, DERIVATIVE_TOL,
                             dres < DERIVATIVE_TOL))
    return AuditTable(rows=rows)
