"""Command-line front end.

Subcommands ``solve``, ``verify-kernel``, ``invariants``, ``compare`` and
``sweep`` read an optional JSON run configuration (``--config``) and write
CSV/JSON/SVG artifacts into ``--out``. The exit status is 0 iff every
executed check passed.

Configuration document (every key optional)::

    {
      "problem": {"alpha": 1.0, "T": 0.05,
                  "data": {"type": "step", "u_minus": -1, "u_plus": 1}},
      "solver": {"L": 2.5, "nx": 2001, "picard_tol": 1e-8, "max_iterations": 40,
                 "time_panels": 72, "t_min_report": null,
                 "quad": {"hermite_order": 60, "panel_count": 200}},
      "fd": {"L": 2.5, "nx": 2001, "dt_factor": 0.4, "scheme": "explicit",
             "advection": "central"},
      "checks": ["max_principle", "monotonicity", ...],
      "report_times": [],
      "kernel": {"dts": [1e-4, 1e-2, 1, 100]},
      "invariants": {"beta": 0.5, "gap": 0.01, "far_field_probes": null},
      "compare": {"tolerance": 1e-3},
      "sweep": {"alpha": [0.5, 1, 2], "states": [[-1, 1], [1, -1]]}
    }

Data types: ``step`` (``u_minus``, ``u_plus``), ``constant`` (``value``),
``piecewise_constant`` (``breakpoints``, ``values``) and ``tanh``
(``u_left``, ``u_right``, ``width``, ``centre``).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import backend
from .coeff import Coefficient
from .errors import ConfigurationError, DomainError, SolverError
from .fd_oracle import FdConfig, compare, solve_fd
from .initial_data import InitialData, PiecewiseConstant, Step, constant, tanh_profile
from .invariants import (NOT_APPLICABLE, PASS, check_derivative_decay, check_far_field,
                         check_holder, check_max_principle, check_monotonicity, check_small_time,
                         continuous_dependence, pde_residual_study)
from .io import patch_metadata, write_json, write_profiles_svg, write_rows, write_solution_csv
from .kernel import IDENTITY_DTS, IDENTITY_TOLERANCES, QuadratureSpec, identity_checks
from .mild_solver import SolverConfig, all_fields, certified_step, solve_global

CHECKS = ("max_principle", "monotonicity", "far_field", "derivative_decay", "small_time",
          "holder", "pde_residual", "continuous_dependence")

_TOP_KEYS = {"problem", "solver", "fd", "checks", "report_times", "kernel", "invariants",
             "compare", "sweep", "output_dir"}


@dataclass
class RunConfig:
    alpha: float = 1.0
    data: dict = field(default_factory=lambda: {"type": "step", "u_minus": -1.0, "u_plus": 1.0})
    T: float = 0.05
    solver: SolverConfig = field(default_factory=SolverConfig)
    fd: FdConfig = field(default_factory=FdConfig)
    checks: tuple = CHECKS
    report_times: tuple = ()
    kernel_dts: tuple = IDENTITY_DTS
    kernel_quad: dict = field(default_factory=dict)
    beta: float = 0.5
    gap: float = 0.01
    far_field_probes: tuple | None = None
    compare_tolerance: float = 1e-3
    sweep_alpha: tuple = (0.5, 1.0, 2.0)
    sweep_states: tuple = ((-1.0, 1.0),)
    output_dir: str | None = None

    @property
    def coefficient(self) -> Coefficient:
        return Coefficient(self.alpha)

    @property
    def initial_data(self) -> InitialData:
        return build_data(self.data)


_DATA_KEYS = {
    "step": ({"u_minus", "u_plus"}, set()),
    "constant": ({"value"}, set()),
    "piecewise_constant": ({"breakpoints", "values"}, set()),
    "tanh": ({"u_left", "u_right", "width"}, {"centre"}),
}


def build_data(spec: dict) -> InitialData:
    spec = dict(spec)
    kind = spec.pop("type", "step")
    if kind not in _DATA_KEYS:
        raise ConfigurationError(f"unknown initial data type {kind!r}")
    required, optional = _DATA_KEYS[kind]
    missing = required - set(spec)
    unknown = set(spec) - required - optional
    if missing or unknown:
        raise ConfigurationError(
            f"{kind!r} data: missing keys {sorted(missing)}, unknown keys {sorted(unknown)}")
    if kind == "step":
        return Step(float(spec["u_minus"]), float(spec["u_plus"]))
    if kind == "constant":
        return constant(float(spec["value"]))
    if kind == "piecewise_constant":
        return PiecewiseConstant(spec["breakpoints"], spec["values"])
    return tanh_profile(float(spec["u_left"]), float(spec["u_right"]), float(spec["width"]),
                        float(spec.get("centre", 0.0)))


def _quad(spec: dict, underresolved_ok: bool = False) -> QuadratureSpec:
    spec = dict(spec)
    if underresolved_ok:
        spec.setdefault("allow_underresolved", True)
    try:
        return QuadratureSpec(**spec)
    except TypeError as exc:
        raise ConfigurationError(f"bad quadrature settings: {exc}") from None


def _section(doc, key, cls, convert=None):
    raw = dict(doc.get(key, {}))
    if convert:
        raw = convert(raw)
    try:
        return cls(**raw)
    except TypeError as exc:
        raise ConfigurationError(f"bad {key!r} section: {exc}") from None


def parse_config(doc: dict) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigurationError("configuration must be a JSON object")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ConfigurationError(f"unknown configuration keys: {sorted(unknown)}")
    cfg = RunConfig()
    prob = dict(doc.get("problem", {}))
    extra = set(prob) - {"alpha", "data", "T"}
    if extra:
        raise ConfigurationError(f"unknown problem keys: {sorted(extra)}")
    cfg.alpha = float(prob.get("alpha", cfg.alpha))
    cfg.data = dict(prob.get("data", cfg.data))
    cfg.T = float(prob.get("T", cfg.T))

    def solver_convert(raw):
        if "quad" in raw:
            raw["quad"] = _quad(raw["quad"])
        return raw

    cfg.solver = _section(doc, "solver", SolverConfig, solver_convert)
    cfg.fd = _section(doc, "fd", FdConfig)
    checks = tuple(doc.get("checks", CHECKS))
    bad = [c for c in checks if c not in CHECKS]
    if bad:
        raise ConfigurationError(f"unknown checks {bad}; available: {list(CHECKS)}")
    cfg.checks = checks
    cfg.report_times = tuple(float(t) for t in doc.get("report_times", ()))
    kern = dict(doc.get("kernel", {}))
    cfg.kernel_dts = tuple(float(t) for t in kern.get("dts", IDENTITY_DTS))
    cfg.kernel_quad = dict(kern.get("quad", {}))
    inv = dict(doc.get("invariants", {}))
    cfg.beta = float(inv.get("beta", cfg.beta))
    cfg.gap = float(inv.get("gap", cfg.gap))
    probes = inv.get("far_field_probes")
    cfg.far_field_probes = None if probes is None else tuple(float(p) for p in probes)
    cfg.compare_tolerance = float(doc.get("compare", {}).get("tolerance", cfg.compare_tolerance))
    sweep = dict(doc.get("sweep", {}))
    cfg.sweep_alpha = tuple(float(a) for a in sweep.get("alpha", cfg.sweep_alpha))
    cfg.sweep_states = tuple(tuple(float(v) for v in s) for s in sweep.get("states", cfg.sweep_states))
    cfg.output_dir = doc.get("output_dir")
    # fail early on invalid physics parameters
    cfg.coefficient
    cfg.initial_data
    if not cfg.T > 0:
        raise ConfigurationError("T must be positive")
    return cfg


def load_config(path) -> RunConfig:
    if path is None:
        return RunConfig()
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(
            f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_config(doc)


def config_metadata(cfg: RunConfig) -> dict:
    return {
        "alpha": cfg.alpha, "data": cfg.data, "T": cfg.T,
        "solver": {**asdict(replace(cfg.solver)), "quad": asdict(cfg.solver.quad)},
        "fd": asdict(cfg.fd), "checks": list(cfg.checks),
    }


# ---------------------------------------------------------------- commands

def cmd_solve(cfg: RunConfig, out: Path, seed: int, only=None) -> int:
    d, c = cfg.initial_data, cfg.coefficient
    meta = {"config": config_metadata(cfg), "t_star": certified_step(d.sup_norm, c),
            "backend": backend.NAME}
    try:
        patches = solve_global(d, cfg.T, c, cfg.solver, report_times=cfg.report_times)
    except SolverError as exc:
        write_json(out / "error.json", {**meta, "error": type(exc).__name__, "message": str(exc),
                                        "patch_index": exc.patch_index,
                                        "residual_history": list(exc.residual_history)})
        print(f"solver failed: {exc}", file=sys.stderr)
        return 1
    write_solution_csv(out / "solution.csv", patches, "mild")
    meta["patches"] = [patch_metadata(p) for p in patches]
    write_json(out / "metadata.json", meta)
    write_profiles_svg(out / "profiles.svg", all_fields(patches),
                       title=f"alpha = {cfg.alpha:g}")
    print(f"{len(patches)} patch(es), T* = {meta['t_star']:.6g}, "
          f"iterations {[p.iterations for p in patches]}")
    return 0


def cmd_verify_kernel(cfg: RunConfig, out: Path, seed: int, only=None) -> int:
    q = _quad(cfg.kernel_quad, underresolved_ok=True)
    names = None
    if only:
        bad = [n for n in only if n not in IDENTITY_TOLERANCES]
        if bad:
            raise ConfigurationError(f"unknown identities {bad}; available: {list(IDENTITY_TOLERANCES)}")
        names = only
    rows = identity_checks(cfg.kernel_dts, q, names)
    write_rows(out / "kernel_identities.csv",
               ("identity", "dt", "value", "error", "tolerance", "passed"), rows)
    for r in rows:
        print(f"{r[0]:<16} dt={r[1]:<8g} error={r[3]:.3e} tol={r[4]:.0e} "
              f"{'PASS' if r[5] else 'FAIL'}")
    return 0 if all(r[5] for r in rows) else 1


def run_checks(cfg: RunConfig, d: InitialData, c: Coefficient, names, seed: int):
    """Solve once and run the named checks; returns the list of reports."""
    t_star = certified_step(d.sup_norm, c)
    patches = solve_global(d, cfg.T, c, cfg.solver, report_times=cfg.report_times)
    L = cfg.solver.L
    reports = []
    for name in names:
        if name == "max_principle":
            r = check_max_principle(patches, d)
        elif name == "monotonicity":
            r = check_monotonicity(patches, d)
        elif name == "far_field":
            probes = cfg.far_field_probes or (L - 1.5, L - 1.25, L - 1.0)
            r = check_far_field(patches, d, probes)
        elif name == "derivative_decay":
            r = check_derivative_decay(patches[0], c)
        elif name == "small_time":
            r = check_small_time(patches, d)
        elif name == "holder":
            r = check_holder(patches, cfg.beta, seed=seed)
        elif name == "pde_residual":
            coarse = replace(cfg.solver, nx=(cfg.solver.nx - 1) // 4 + 1,
                             time_panels=max(cfg.solver.time_panels // 2, 24))
            r = pde_residual_study(d, c, coarse, min(cfg.T, t_star) / 2.0)
        elif name == "continuous_dependence":
            if not isinstance(d, PiecewiseConstant):
                raise ConfigurationError("continuous_dependence needs piecewise-constant data")
            vals = np.asarray(d.values) + cfg.gap
            d2 = Step(*vals) if isinstance(d, Step) else PiecewiseConstant(d.breakpoints, vals)
            r = continuous_dependence(d, d2, min(cfg.T, t_star), c, cfg.solver)
        else:  # pragma: no cover - guarded by parse_config
            raise ConfigurationError(f"unknown check {name}")
        reports.append(r)
    return reports


def _report_rows(reports, prefix=()):
    rows = []
    for r in reports:
        for group in ("measured", "threshold"):
            for key, val in sorted(getattr(r, group).items()):
                vals = val if isinstance(val, (list, tuple)) else [val]
                for i, v in enumerate(vals):
                    rows.append((*prefix, r.name, r.status, group, key, i, v))
    return rows


def _executed_ok(reports) -> bool:
    return all(r.status in (PASS, NOT_APPLICABLE) for r in reports)


def _print_table(reports, prefix=""):
    for r in reports:
        print(f"{prefix}{r.name:<24} {r.status.upper()}")


def cmd_invariants(cfg: RunConfig, out: Path, seed: int, only=None) -> int:
    names = tuple(only) if only else cfg.checks
    bad = [n for n in names if n not in CHECKS]
    if bad:
        raise ConfigurationError(f"unknown checks {bad}; available: {list(CHECKS)}")
    d, c = cfg.initial_data, cfg.coefficient
    reports = run_checks(cfg, d, c, names, seed)
    write_rows(out / "invariants.csv", ("check", "status", "group", "key", "index", "value"),
               _report_rows(reports))
    write_json(out / "invariants.json", {"config": config_metadata(cfg), "seed": seed,
                                         "reports": [r.to_dict() for r in reports]})
    _print_table(reports)
    return 0 if _executed_ok(reports) else 1


def cmd_compare(cfg: RunConfig, out: Path, seed: int, only=None) -> int:
    d, c = cfg.initial_data, cfg.coefficient
    times = sorted(set(cfg.report_times) | {cfg.T})
    patches = solve_global(d, cfg.T, c, cfg.solver, report_times=times)
    fine = solve_fd(d, cfg.T, c, cfg.fd, report_times=times)
    coarse_cfg = replace(cfg.fd, nx=max((cfg.fd.nx - 1) // 2 + 1, 128))
    coarse = solve_fd(d, cfg.T, c, coarse_cfg, report_times=times)
    rep_fine = compare(patches, fine)
    rep_coarse = compare(patches, coarse)
    rows = []
    for label, rep, nx in (("fd", rep_fine, cfg.fd.nx), ("fd_coarse", rep_coarse, coarse_cfg.nx)):
        for t, s, l2 in zip(rep.times, rep.sup, rep.l2):
            rows.append((label, nx, t, s, l2))
    write_rows(out / "compare.csv", ("fd_run", "fd_nx", "t", "sup", "l2"), rows)
    within = rep_fine.max_sup <= cfg.compare_tolerance
    ordered = rep_coarse.max_sup > rep_fine.max_sup
    checks = [("tolerance", rep_fine.max_sup, cfg.compare_tolerance, within),
              ("ordering", rep_coarse.max_sup, rep_fine.max_sup, ordered)]
    write_rows(out / "compare_checks.csv", ("check", "measured", "threshold", "passed"), checks)
    write_solution_csv(out / "fd_solution.csv", fine, "fd")
    print(f"mild vs fd (nx={cfg.fd.nx}): max sup {rep_fine.max_sup:.3e} "
          f"[{'PASS' if within else 'FAIL'}]")
    print(f"coarse fd (nx={coarse_cfg.nx}) disagreement larger: "
          f"{rep_coarse.max_sup:.3e} > {rep_fine.max_sup:.3e} [{'PASS' if ordered else 'FAIL'}]")
    return 0 if within and ordered else 1


def cmd_sweep(cfg: RunConfig, out: Path, seed: int, only=None) -> int:
    names = tuple(only) if only else cfg.checks
    rows, ok = [], True
    for alpha in cfg.sweep_alpha:
        for um, up in cfg.sweep_states:
            d, c = Step(um, up), Coefficient(alpha)
            reports = run_checks(cfg, d, c, names, seed)
            ok = ok and _executed_ok(reports)
            for r in reports:
                rows.append((alpha, um, up, r.name, r.status))
            _print_table(reports, prefix=f"alpha={alpha:g} ({um:g},{up:g}) ")
    write_rows(out / "sweep.csv", ("alpha", "u_minus", "u_plus", "check", "status"), rows)
    return 0 if ok else 1


COMMANDS = {
    "solve": cmd_solve,
    "verify-kernel": cmd_verify_kernel,
    "invariants": cmd_invariants,
    "compare": cmd_compare,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="genburgers", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--out", default=None, help="output directory (default: ./out)")
        p.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
        p.add_argument("--check", action="append", default=None,
                       help="restrict to one check or identity (repeatable)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.seed < 0 or args.seed >= 2 ** 64:
        print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return 2
    try:
        cfg = load_config(args.config)
    except (ConfigurationError, DomainError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    out = Path(args.out or cfg.output_dir or "out")
    out.mkdir(parents=True, exist_ok=True)
    try:
        return COMMANDS[args.command](cfg, out, args.seed, args.check)
    except (ConfigurationError, DomainError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        write_json(out / "error.json", {"error": type(exc).__name__, "message": str(exc),
                                        "patch_index": exc.patch_index,
                                        "residual_history": list(exc.residual_history)})
        print(f"solver failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
