"""Command-line front-end: ``ufhc {check,plan,construct,verify,run}``.

Exit codes: 0 pass, 1 construction postcondition failure, 2 certificate
failure, 3 criterion not applicable, 4 budget exceeded, 5 config error,
6 inverse series not summable / tail not certifiable.
"""

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path

from . import __version__
from .config import load_config
from .constructor import ConstructionPlan, build, plan
from .criterion_checker import check_shift_criterion, is_applicable
from .errors import BudgetExceeded, ConfigError, ConstructionError, NonSummable, NotApplicable
from .sequence_space import SparseVector
from .verifier import default_grid, plan_digest, verify_density_certificate

log = logging.getLogger("ufhc")

EXIT_OK = 0
EXIT_CONSTRUCTION = 1
EXIT_CERTIFICATE = 2
EXIT_NOT_APPLICABLE = 3
EXIT_BUDGET = 4
EXIT_CONFIG = 5
EXIT_NON_SUMMABLE = 6


def _write_json(path, obj):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")


class Run:
    """Collects artifacts and the manifest of one invocation."""

    def __init__(self, out_dir, command, cfg=None):
        self.out = Path(out_dir)
        self.out.mkdir(parents=True, exist_ok=True)
        self.manifest = {"command": command, "version": __version__, "artifacts": {}}
        if cfg is not None:
            self.manifest.update(
                config_hash=cfg.config_hash(),
                config=cfg.source,
                metric=cfg.metric.to_json(),
                family=cfg.family.describe(),
            )

    def emit(self, name, obj):
        _write_json(self.out / name, obj)
        self.manifest["artifacts"][name.rsplit(".", 1)[0]] = name

    def finish(self, status, **extra):
        self.manifest["exit_status"] = status
        self.manifest.update(extra)
        _write_json(self.out / "manifest.json", self.manifest)
        return status


def _overrides(args):
    out = {}
    if getattr(args, "cap", None) is not None:
        out["budget_cap"] = args.cap
    if getattr(args, "grid", None) is not None:
        out["grid_per_block"] = args.grid
    if getattr(args, "metric", None) is not None:
        out["metric"] = args.metric
    if getattr(args, "policy", None) is not None:
        out["horizon_policy"] = args.policy
    return out


def _out_dir(args, cfg=None, fallback="runs/out"):
    if args.out:
        return args.out
    if cfg is not None and cfg.output_dir:
        return cfg.output_dir
    if getattr(args, "config", None):
        return os.path.join("runs", Path(args.config).stem)
    return fallback


def _derived(pl: ConstructionPlan):
    d = pl.to_json()
    return {k: d[k] for k in ("J", "J_x", "eta", "s0", "N0", "c", "tau", "delta", "lambda_points", "l_schedule", "budget")}


def _plan_or_exit(run, cfg, verdicts):
    """Plan, or return an exit status after recording why planning stopped."""
    try:
        pl = plan(cfg.family, cfg.K, cfg.p, cfg.U, cfg.V, cfg.M, cap=cfg.budget_cap, verdicts=verdicts)
    except NotApplicable as exc:
        log.error("not applicable: %s", exc)
        return None, run.finish(EXIT_NOT_APPLICABLE, error=str(exc))
    except BudgetExceeded as exc:
        log.error("budget exceeded: %s", exc)
        return None, run.finish(EXIT_BUDGET, error=str(exc), tau=exc.tau, l_tau=exc.l_tau, cap=exc.cap)
    except NonSummable as exc:
        log.error("not summable: %s", exc)
        return None, run.finish(EXIT_NON_SUMMABLE, error=str(exc))
    run.emit("plan.json", pl.to_json())
    return pl, None


def _check(cfg, run):
    try:
        verdicts = check_shift_criterion(cfg.family, cfg.K, cfg.p)
    except NonSummable as exc:
        return None, run.finish(EXIT_NON_SUMMABLE, error=str(exc))
    run.emit("verdicts.json", [v.to_json() for v in verdicts])
    for v in verdicts:
        log.info("%-28s %s", v.condition, v.status.value)
    return verdicts, None


def _verify(run, pl, z, per_block, policy):
    grid = default_grid(pl, per_block)
    cert = verify_density_certificate(pl, z, grid, policy=policy)
    run.emit("certificate.json", cert.to_json())
    cert.write_csv(run.out / "certificate.csv")
    run.manifest["artifacts"]["certificate_csv"] = "certificate.csv"
    worst = min((r.density.best_density for r in cert.results), default=None)
    log.info(
        "certificate: %s over %d grid points (delta = %s, worst density = %s)",
        "PASS" if cert.overall else "FAIL",
        len(cert.grid),
        pl.delta,
        worst,
    )
    return cert


def cmd_check(args):
    cfg = load_config(args.config, _overrides(args))
    run = Run(_out_dir(args, cfg), "check", cfg)
    verdicts, status = _check(cfg, run)
    if status is not None:
        return status
    ok = is_applicable(verdicts, cfg.K)
    return run.finish(EXIT_OK if ok else EXIT_NOT_APPLICABLE, applicable=ok)


def cmd_plan(args):
    cfg = load_config(args.config, _overrides(args))
    run = Run(_out_dir(args, cfg), "plan", cfg)
    verdicts, status = _check(cfg, run)
    if status is not None:
        return status
    pl, status = _plan_or_exit(run, cfg, verdicts)
    if status is not None:
        return status
    return run.finish(EXIT_OK, derived=_derived(pl), plan_digest=plan_digest(pl))


def _load_plan(path):
    with open(path) as fh:
        return ConstructionPlan.from_json(json.load(fh))


def _build_or_exit(run, pl):
    try:
        z = build(pl)
    except ConstructionError as exc:
        log.error("construction failed: %s", exc)
        return None, run.finish(EXIT_CONSTRUCTION, error=str(exc))
    run.emit("vector.json", {"support_size": len(z), "entries": z.to_json()})
    return z, None


def cmd_construct(args):
    pl = _load_plan(args.plan)
    run = Run(args.out or str(Path(args.plan).parent), "construct")
    run.manifest["plan_digest"] = plan_digest(pl)
    z, status = _build_or_exit(run, pl)
    if status is not None:
        return status
    return run.finish(EXIT_OK, support_size=len(z))


def cmd_verify(args):
    pl = _load_plan(args.plan)
    with open(args.vector) as fh:
        z = SparseVector.from_json(json.load(fh)["entries"])
    run = Run(args.out or str(Path(args.plan).parent), "verify")
    run.manifest.update(plan_digest=plan_digest(pl), metric=pl.metric.to_json())
    cert = _verify(run, pl, z, args.grid or 20, args.policy or "scheduled")
    return run.finish(EXIT_OK if cert.overall else EXIT_CERTIFICATE, overall=cert.overall)


def run_pipeline(cfg, out_dir):
    """check -> plan -> build -> verify; returns the exit status."""
    run = Run(out_dir, "run", cfg)
    started = time.perf_counter()
    verdicts, status = _check(cfg, run)
    if status is not None:
        return status
    pl, status = _plan_or_exit(run, cfg, verdicts)
    if status is not None:
        return status
    run.manifest.update(derived=_derived(pl), plan_digest=plan_digest(pl))
    log.info("plan: s0 = %d, N0 = %d, c = %d, tau = %d, l = %s", pl.s0, pl.N0, pl.c, pl.tau, list(pl.l_schedule))
    z, status = _build_or_exit(run, pl)
    if status is not None:
        return status
    cert = _verify(run, pl, z, cfg.grid_per_block, cfg.horizon_policy)
    return run.finish(
        EXIT_OK if cert.overall else EXIT_CERTIFICATE,
        overall=cert.overall,
        seconds=round(time.perf_counter() - started, 3),
    )


def cmd_run(args):
    cfg = load_config(args.config, _overrides(args))
    return run_pipeline(cfg, _out_dir(args, cfg))


def _config_flags(p):
    p.add_argument("config", help="experiment config (JSON)")
    p.add_argument("--cap", type=int, help="budget cap on scheduled checks and block starts")
    p.add_argument("--grid", type=int, help="grid points per parameter block")
    p.add_argument("--metric", choices=("lp", "fnorm"))
    p.add_argument("--policy", choices=("scheduled", "exhaustive"))


def build_parser():
    parser = argparse.ArgumentParser(prog="ufhc", description=__doc__.splitlines()[0])
    parser.add_argument("--out", help="output directory")
    parser.add_argument("-q", "--quiet", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="evaluate the criterion's hypotheses")
    _config_flags(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("plan", help="compute construction parameters")
    _config_flags(p)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("construct", help="build the vector from a plan file")
    p.add_argument("plan")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", help="certify a built vector on a parameter grid")
    p.add_argument("plan")
    p.add_argument("vector")
    p.add_argument("--grid", type=int)
    p.add_argument("--policy", choices=("scheduled", "exhaustive"))
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("run", help="check, plan, build and verify")
    _config_flags(p)
    p.set_defaults(func=cmd_run)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except ConfigError as exc:
        for e in exc.errors:
            log.error("config: %s", e)
        return EXIT_CONFIG
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        log.error("cannot read input: %s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
