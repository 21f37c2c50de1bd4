"""Visit-time sets of orbits and their finite-horizon densities.

Densities are exact ``Fraction`` objects: the count of visits in ``[0, n]``
over ``n + 1``. Pass/fail comparisons against a threshold happen in exact
rational arithmetic.
"""

import bisect
import csv
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .sequence_space import OpenBall, SparseVector, in_ball, norm_of_arrays
from .weight_families import WeightFamily, _check_param


@dataclass(frozen=True)
class VisitProfile:
    times: tuple
    horizon: int

    def __post_init__(self):
        times = tuple(int(t) for t in self.times)
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("visit times must be strictly increasing")
        if times and (times[0] < 0 or times[-1] > self.horizon):
            raise ValueError("visit times must lie in [0, horizon]")
        object.__setattr__(self, "times", times)

    def count_upto(self, n):
        return bisect.bisect_right(self.times, n)


@dataclass(frozen=True)
class DensityReport:
    best_density: Fraction
    achieved_at: int
    threshold: Fraction
    passed: bool
    horizon: int

    def to_json(self):
        return {
            "best_density": [self.best_density.numerator, self.best_density.denominator],
            "best_density_float": float(self.best_density),
            "achieved_at": self.achieved_at,
            "threshold": [self.threshold.numerator, self.threshold.denominator],
            "passed": self.passed,
            "horizon": self.horizon,
        }


def finite_density(profile: VisitProfile, n: int) -> Fraction:
    """``#(times in [0, n]) / (n + 1)``."""
    if n < 0 or n > profile.horizon:
        raise ValueError(f"n = {n} outside [0, {profile.horizon}]")
    return Fraction(profile.count_upto(n), n + 1)


def best_density_from(profile: VisitProfile, M: int, threshold=Fraction(0)) -> DensityReport:
    """Max of ``finite_density(profile, n)`` over ``M <= n <= horizon``.

    Between two visits the count is constant while ``n + 1`` grows, so the
    maximum is attained at ``n = M`` or at a visit time ``>= M``; only those
    candidates are scanned. Ties go to the smallest ``n``.
    """
    if M < 0 or M > profile.horizon:
        raise ValueError(f"M = {M} outside [0, {profile.horizon}]")
    threshold = Fraction(threshold)
    start = bisect.bisect_left(profile.times, M)
    best, at = Fraction(profile.count_upto(M), M + 1), M
    for j in range(start, len(profile.times)):
        n = profile.times[j]
        d = Fraction(j + 1, n + 1)
        if d > best:
            best, at = d, n
    return DensityReport(best, at, threshold, best > threshold, profile.horizon)


def orbit_distance(fam, lam, m, indices, coefs, center: SparseVector, metric):
    """Distance from ``B^m x`` to ``center``, with ``x`` given as sorted arrays.

    Avoids building intermediate vectors; used in the verification loops.
    """
    start = int(np.searchsorted(indices, m))
    idx = indices[start:]
    if idx.size:
        vals = coefs[start:] * np.exp(np.asarray(fam.log_product(idx - m + 1, idx, lam)))
        idx = idx - m
    else:
        vals = np.zeros(0)
    if center.is_zero():
        return norm_of_arrays(idx, vals, metric)
    vals = vals.copy()
    pos = np.searchsorted(idx, center.indices)
    extra_idx, extra_val = [], []
    for p, i, c in zip(pos, center.indices, center.coefs):
        if p < idx.size and idx[p] == i:
            vals[p] -= c
        else:
            extra_idx.append(i)
            extra_val.append(-c)
    if extra_idx:
        idx = np.concatenate([idx, np.asarray(extra_idx, dtype=np.int64)])
        vals = np.concatenate([vals, np.asarray(extra_val)])
    return norm_of_arrays(idx, vals, metric)


def visiting_times(
    fam: WeightFamily,
    lam: float,
    x: SparseVector,
    V: OpenBall,
    horizon: int,
    schedule=None,
) -> VisitProfile:
    """``{n <= horizon : B^n x in V}``, or only the ``schedule`` times if given."""
    _check_param(fam, lam)
    if horizon < 0:
        raise ValueError("negative horizon")
    candidates = range(horizon + 1) if schedule is None else sorted({int(n) for n in schedule if 0 <= n <= horizon})
    # past the top of the support the orbit is identically zero
    zero_inside = in_ball(SparseVector.zero(), V)
    times = []
    for n in candidates:
        if n > x.max_index:
            if zero_inside:
                times.append(n)
            continue
        d = orbit_distance(fam, lam, n, x.indices, x.coefs, V.center, V.metric)
        if d < V.radius:
            times.append(n)
    return VisitProfile(tuple(times), horizon)


def write_profile_csv(path, rows):
    """Rows of ``(lam, n, count, density)`` at each visit time."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["lambda", "n", "count", "density"])
        for lam, profile in rows:
            for j, n in enumerate(profile.times):
                w.writerow([repr(lam), n, j + 1, repr(float(Fraction(j + 1, n + 1)))])
