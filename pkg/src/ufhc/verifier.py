"""Finite-grid checks that a built vector does what its plan promises.

For each grid parameter the verifier walks the scheduled visit times of the
parameter's own block, counts how many orbit points land in the target ball
and compares the resulting finite-horizon density with ``plan.delta`` in exact
rational arithmetic. A passing certificate is evidence on the grid only; it is
labelled ``"empirical"``.
"""

import csv
import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .constructor import ConstructionPlan
from .density_analysis import DensityReport, VisitProfile, best_density_from, orbit_distance, visiting_times
from .sequence_space import OpenBall, SparseVector, in_ball

DEFAULT_EXHAUSTIVE_CAP = 200_000


def plan_digest(plan: ConstructionPlan) -> str:
    blob = json.dumps(plan.to_json(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def verify_membership(z: SparseVector, U: OpenBall) -> bool:
    return in_ball(z, U)


def default_grid(plan: ConstructionPlan, per_block: int = 20):
    """At least ``per_block`` equally spaced points owned by each block, breakpoints included."""
    if per_block < 1:
        raise ValueError("per_block must be >= 1")
    pts = plan.lambda_points
    if plan.K.degenerate:
        return [plan.K.a]
    n = max(per_block, 2)
    grid = []
    for t in range(1, plan.tau + 1):
        # block t owns (lam_{t-1}, lam_t]; block 1 also owns a
        if t == 1:
            grid.extend(np.linspace(pts[0], pts[1], n).tolist())
        else:
            grid.extend(np.linspace(pts[t - 1], pts[t], n + 1)[1:].tolist())
        grid.append(pts[t])
    return _normalise_grid(plan, grid)


def _normalise_grid(plan, grid):
    """Sorted, deduplicated grid containing ``a``, ``b`` and every ``lam_t``."""
    grid = [float(g) for g in grid]
    for lam in grid:
        plan.block_of(lam)  # rejects points outside [a, b]
    if grid:
        grid.extend(plan.lambda_points)
    return sorted(set(grid))


@dataclass(frozen=True)
class VisitCount:
    lam: float
    block: int
    checked: int
    passed: int
    times: tuple

    @property
    def ok(self):
        return self.passed == self.checked


def _scheduled_visits(plan, z, lam):
    t = plan.block_of(lam)
    times = plan.block_times(t)
    y, eps, metric = plan.V.center, plan.V.radius, plan.V.metric
    hits = tuple(
        int(m)
        for m in times
        if orbit_distance(plan.family, lam, int(m), z.indices, z.coefs, y, metric) < eps
    )
    return VisitCount(lam, t, len(times), len(hits), hits)


def verify_scheduled_visits(plan: ConstructionPlan, z: SparseVector, grid):
    """Per grid parameter: how many of its block's scheduled times land in ``V``."""
    return [_scheduled_visits(plan, z, lam) for lam in _normalise_grid(plan, grid)]


@dataclass(frozen=True)
class LambdaResult:
    lam: float
    block: int
    membership: bool
    visits: VisitCount
    density: DensityReport

    @property
    def passed(self):
        return self.membership and self.visits.ok and self.density.passed

    def to_json(self):
        return {
            "lambda": self.lam,
            "block": self.block,
            "membership": self.membership,
            "scheduled_checked": self.visits.checked,
            "scheduled_passed": self.visits.passed,
            "density": self.density.to_json(),
            "passed": self.passed,
        }


@dataclass(frozen=True)
class Certificate:
    plan_digest: str
    policy: str
    grid: tuple
    results: tuple
    delta: Fraction

    label = "empirical"

    @property
    def degenerate(self):
        return not self.results

    @property
    def overall(self):
        return all(r.passed for r in self.results)

    @property
    def grid_resolution(self):
        if len(self.grid) < 2:
            return 0.0
        return float(np.max(np.diff(self.grid)))

    def to_json(self):
        return {
            "label": self.label,
            "plan_digest": self.plan_digest,
            "policy": self.policy,
            "delta": [self.delta.numerator, self.delta.denominator],
            "grid_size": len(self.grid),
            "grid_resolution": self.grid_resolution,
            "degenerate": self.degenerate,
            "overall": self.overall,
            "results": [r.to_json() for r in self.results],
        }

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True, indent=2)

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["lambda", "t", "checked_times", "passed_times", "best_density_num", "best_density_den"])
            for r in self.results:
                d = r.density.best_density
                w.writerow([repr(r.lam), r.block, r.visits.checked, r.visits.passed, d.numerator, d.denominator])


def verify_density_certificate(
    plan: ConstructionPlan,
    z: SparseVector,
    grid,
    policy: str = "scheduled",
    exhaustive_cap: int = DEFAULT_EXHAUSTIVE_CAP,
) -> Certificate:
    """Check membership, scheduled visits and the density bound at every grid point.

    ``policy="scheduled"`` counts only the scheduled visit times, an
    undercount of the true visit set. ``policy="exhaustive"`` scans every
    ``n`` up to the block horizon and is refused when that horizon exceeds
    ``exhaustive_cap``.
    """
    if policy not in ("scheduled", "exhaustive"):
        raise ValueError(f"unknown horizon policy {policy!r}")
    grid = _normalise_grid(plan, grid)
    if policy == "exhaustive":
        top = max((plan.horizon(plan.block_of(lam)) for lam in grid), default=0)
        if top > exhaustive_cap:
            raise ValueError(f"exhaustive scan to n = {top} exceeds the cap {exhaustive_cap}")
    member = verify_membership(z, plan.U)
    results = []
    for lam in grid:
        visits = _scheduled_visits(plan, z, lam)
        horizon = plan.horizon(visits.block)
        if policy == "scheduled":
            profile = VisitProfile(visits.times, horizon)
        else:
            profile = visiting_times(plan.family, lam, z, plan.V, horizon)
        report = best_density_from(profile, plan.M, plan.delta)
        results.append(LambdaResult(lam, visits.block, member, visits, report))
    return Certificate(plan_digest(plan), policy, tuple(grid), tuple(results), plan.delta)
