"""Block construction of a common upper frequently hypercyclic witness.

Given a weight family on a compact parameter interval ``K = [a, b]``, an open
ball ``U = B(x, r)`` and a target ball ``V = B(y, eps)`` with finitely
supported centres, the planner fixes

* ``eta``    so that ``|xi| <= eta`` moves each ``xi * y_nu e_nu`` by at most
  ``(eps/4) / #supp(y)``;
* ``d_n = eta / (L_1 + ... + L_{n+J})``, the parameter tolerance at time ``n``;
* ``s0``     the gap between scheduled visits, large enough that all cross
  terms of the orbit stay below ``eps/4``;
* ``N0``     the first admissible block start, so that ``||z - x|| < r`` and
  ``B^n x = 0`` for ``n >= N0``;
* ``c = max(N0, 2 + s0, M)``, block starts ``l_t = c^t`` and the subdivision
  ``lam_t = a + d_{c^2} + ... + d_{c^{t+1}}`` of ``K``;

and :func:`build` assembles

    z = x + sum_{t=1}^{tau} sum_{l=0}^{l_t} F^{l_t + l*s0}(lam_t) y.

For every ``lam`` in ``[lam_{t-1}, lam_t]`` the orbit of ``z`` then visits ``V``
at the ``l_t + 1`` times ``l_t + l*s0``, giving a visit density above
``1/(2 + s0)`` at time ``l_t (1 + s0)``.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .criterion_checker import check_shift_criterion, is_applicable, required_conditions
from .errors import BudgetExceeded, ConstructionError, NotApplicable
from .sequence_space import (
    FNormLadder,
    LpNorm,
    OpenBall,
    SparseVector,
    SpaceMetric,
    f_norm,
    in_ball,
    metric_bounded_by_lp,
    metric_from_json,
    norm,
)
from .weight_families import (
    CompactInterval,
    WeightFamily,
    _check_interval,
    family_from_json,
    inverse_tail_bound,
    lipschitz_sum,
)

DEFAULT_CAP = 10**6


def compute_eta(y: SparseVector, eps: float, metric: SpaceMetric) -> float:
    """Largest ``eta`` with ``|xi| <= eta => ||xi y_nu e_nu|| <= eps / #supp(y)`` for all nu.

    Zero coefficients contribute nothing, so the budget ``eps`` is shared among
    the support only.
    """
    if y.is_zero():
        raise ValueError("the target centre must be nonzero")
    if not eps > 0:
        raise ValueError("eps must be positive")
    share = eps / len(y)
    if isinstance(metric, LpNorm):
        return share / float(np.max(np.abs(y.coefs)))
    return min(_fnorm_scale_limit(metric, int(i), abs(float(c)), share) for i, c in y.pairs())


def _fnorm_scale_limit(ladder: FNormLadder, index, coef, share):
    """``sup {t >= 0 : f(t * coef * e_index) <= share}`` by bisection."""
    def f(t):
        return f_norm(SparseVector.basis(index, t * coef), ladder)

    hi = 1.0
    while f(hi) <= share:
        hi *= 2.0
        if hi > 1e300:
            return math.inf
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if f(mid) <= share:
            lo = mid
        else:
            hi = mid
    return lo


def compute_d(family: WeightFamily, K: CompactInterval, J: int, eta: float, n: int) -> float:
    """``eta / (L_1(K) + ... + L_{n+J}(K))``."""
    if n < 1:
        raise ValueError("d_n is indexed from 1")
    total = lipschitz_sum(family, K, n + J)
    if total == 0:
        return math.inf
    return eta / total


def _weighted_tail(family, a, y, s, p):
    return math.fsum(
        abs(c) * inverse_tail_bound(family, a, int(nu), s, p) for nu, c in y.pairs()
    )


def _least_passing(start, passes, limit, what):
    """Least integer ``s >= start`` with ``passes(s)``, by galloping then bisection.

    The certified bound decreases in ``s``; the final downward walk keeps the
    answer minimal even if rounding makes it non-monotone near the threshold.
    Raises :class:`BudgetExceeded` when no ``s <= limit`` passes.
    """
    if passes(start):
        return start
    lo, step = start, 1
    hi = start + step
    while not passes(hi):
        if hi >= limit:
            raise BudgetExceeded(f"{what} exceeds {limit}", tau=1, l_tau=None, cap=limit)
        lo = hi
        step *= 2
        hi = min(start + step, limit)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if passes(mid):
            hi = mid
        else:
            lo = mid
    while hi > start and passes(hi - 1):
        hi -= 1
    return hi


SEARCH_LIMIT = 1 << 40


def compute_gap_s0(family, K, p, y: SparseVector, eps: float, limit=SEARCH_LIMIT) -> int:
    """Least gap ``s0 >= J + 1`` with ``sum_nu |y_nu| tail(a, nu, s0) < eps/4``.

    ``s0 > J`` makes every backward cross term vanish exactly (``B^m F^{m-n}
    e_nu = 0`` once ``n > nu``); the tail inequality bounds the forward ones.
    """
    _check_interval(family, K)
    if y.is_zero():
        raise ValueError("the target centre must be nonzero")
    return _least_passing(
        max(1, y.max_index + 1), lambda s: _weighted_tail(family, K.a, y, s, p) < eps / 4, limit, "the visit gap s0"
    )


def compute_start_N0(family, K, p, x: SparseVector, y: SparseVector, r: float, limit=SEARCH_LIMIT) -> int:
    """Least ``N0 > max supp(x)`` with ``sum_nu |y_nu| tail(a, nu, N0) < r``."""
    _check_interval(family, K)
    return _least_passing(
        max(1, x.max_index + 1), lambda s: _weighted_tail(family, K.a, y, s, p) < r, limit, "the block start N0"
    )


@dataclass(frozen=True)
class Budget:
    scheduled_checks: int
    support_size: int
    max_time: int
    coefficient_ops: int

    def to_json(self):
        return {
            "scheduled_checks": self.scheduled_checks,
            "support_size": self.support_size,
            "max_time": self.max_time,
            "coefficient_ops": self.coefficient_ops,
        }


@dataclass(frozen=True)
class ConstructionPlan:
    family: WeightFamily
    K: CompactInterval
    p: float
    U: OpenBall
    V: OpenBall
    M: int
    J: int
    J_x: int
    eta: float
    s0: int
    N0: int
    c: int
    tau: int
    lambda_points: tuple
    l_schedule: tuple
    delta: Fraction
    budget: Budget
    d_steps: tuple = field(default=())
    cap: int = DEFAULT_CAP

    @property
    def metric(self):
        return self.V.metric

    def block_times(self, t):
        """Scheduled visit times ``l_t + l*s0``, ``0 <= l <= l_t``, of block ``t`` (1-based)."""
        lt = self.l_schedule[t - 1]
        return lt + self.s0 * np.arange(lt + 1, dtype=np.int64)

    def horizon(self, t):
        lt = self.l_schedule[t - 1]
        return lt + lt * self.s0

    def block_of(self, lam):
        """Own block of ``lam``: the least ``t`` with ``lam <= lam_t``."""
        if not self.K.a <= lam <= self.K.b:
            raise ValueError(f"parameter {lam} outside [{self.K.a}, {self.K.b}]")
        for t in range(1, self.tau + 1):
            if lam <= self.lambda_points[t]:
                return t
        return self.tau

    def d(self, n):
        return compute_d(self.family, self.K, self.J, self.eta, n)

    def to_json(self):
        return {
            "family": self.family.to_json(),
            "K": self.K.to_json(),
            "p": self.p,
            "metric": self.metric.to_json(),
            "U": self.U.to_json(),
            "V": self.V.to_json(),
            "M": self.M,
            "J": self.J,
            "J_x": self.J_x,
            "eta": self.eta,
            "s0": self.s0,
            "N0": self.N0,
            "c": self.c,
            "tau": self.tau,
            "d_log": "d_n = eta / sum_{i=1}^{n+J} L_i(K)",
            "d_steps": list(self.d_steps),
            "lambda_points": list(self.lambda_points),
            "l_schedule": list(self.l_schedule),
            "delta": [self.delta.numerator, self.delta.denominator],
            "budget": self.budget.to_json(),
            "cap": self.cap,
        }

    @classmethod
    def from_json(cls, data):
        metric = metric_from_json(data["metric"])

        def ball(d):
            return OpenBall(SparseVector.from_json(d["center"]), float(d["radius"]), metric)

        return cls(
            family=family_from_json(data["family"]),
            K=CompactInterval(*data["K"]),
            p=float(data["p"]),
            U=ball(data["U"]),
            V=ball(data["V"]),
            M=int(data["M"]),
            J=int(data["J"]),
            J_x=int(data["J_x"]),
            eta=float(data["eta"]),
            s0=int(data["s0"]),
            N0=int(data["N0"]),
            c=int(data["c"]),
            tau=int(data["tau"]),
            lambda_points=tuple(float(v) for v in data["lambda_points"]),
            l_schedule=tuple(int(v) for v in data["l_schedule"]),
            delta=Fraction(*data["delta"]),
            budget=Budget(**data["budget"]),
            d_steps=tuple(float(v) for v in data.get("d_steps", ())),
            cap=int(data.get("cap", DEFAULT_CAP)),
        )


def _subdivide(K, d_at, c, cap):
    """Return ``(tau, lambda_points, d_steps)``; abort once ``c^t`` passes ``cap``.

    ``lam_t - lam_{t-1} <= d_{c^{t+1}}`` holds exactly in floating point: each
    rounded partial sum is nudged down if it overshoots its step.
    """
    a, b = K.a, K.b
    points, steps = [a], []
    t = 1
    while True:
        if c**t > cap:
            raise BudgetExceeded(
                f"block start l_{t} = {c**t} exceeds the cap {cap} before [a, b] is covered",
                tau=t,
                l_tau=c**t,
                cap=cap,
            )
        step = d_at(c ** (t + 1))
        steps.append(step)
        prev = points[-1]
        if b - prev < step:
            points.append(b)
            return t, tuple(points), tuple(steps)
        lam = prev + step
        while lam - prev > step:
            lam = math.nextafter(lam, -math.inf)
        points.append(lam)
        t += 1


def _coefficient_ops(l_schedule, s0, support):
    """Orbit coefficients evaluated when verifying one parameter per block.

    At time ``m`` only entries of ``z`` with index ``>= m`` survive ``B^m``.
    """
    starts = np.concatenate(
        [lt + s0 * np.arange(lt + 1, dtype=np.int64) for lt in l_schedule]
    )
    total = 0
    for lt in l_schedule:
        times = lt + s0 * np.arange(lt + 1, dtype=np.int64)
        alive = starts.size - np.searchsorted(starts, times)
        total += int(alive.sum()) * support
    return total


def budget_for(l_schedule, s0, y_support):
    checks = sum(lt + 1 for lt in l_schedule)
    support = checks * y_support
    max_time = l_schedule[-1] * (1 + s0)
    return Budget(checks, support, max_time, _coefficient_ops(l_schedule, s0, y_support))


def plan(
    family: WeightFamily,
    K: CompactInterval,
    p: float,
    U: OpenBall,
    V: OpenBall,
    M: int,
    cap: int = DEFAULT_CAP,
    s_list=(2, 3, 10),
    verdicts=None,
) -> ConstructionPlan:
    """Compute every parameter of the block construction without building ``z``."""
    if M < 1:
        raise ValueError("M must be >= 1")
    if cap < 1:
        raise ValueError("cap must be >= 1")
    if U.metric != V.metric:
        raise ValueError("U and V must use the same metric")
    if not metric_bounded_by_lp(V.metric, p):
        raise ValueError(f"metric {V.metric} is not dominated by the l^{p:g} norm")
    _check_interval(family, K)
    if verdicts is None:
        verdicts = check_shift_criterion(family, K, p, s_list)
    if not is_applicable(verdicts, K):
        failing = [v.condition for v in verdicts if v.condition in required_conditions(K) and not v.holds]
        raise NotApplicable(f"criterion not verified: {', '.join(failing)}", verdicts)

    x, r = U.center, U.radius
    y, eps = V.center, V.radius
    J = y.max_index
    eta = compute_eta(y, eps / 4, V.metric)
    # c >= max(2 + s0, N0) is the first block start, so both searches stop at the cap
    s0 = compute_gap_s0(family, K, p, y, eps, limit=cap)
    N0 = compute_start_N0(family, K, p, x, y, r, limit=cap)
    c = max(N0, 2 + s0, M)

    tau, points, steps = _subdivide(K, lambda n: compute_d(family, K, J, eta, n), c, cap)
    l_schedule = tuple(c**t for t in range(1, tau + 1))
    checks = sum(lt + 1 for lt in l_schedule)
    if checks > cap:
        raise BudgetExceeded(
            f"{checks} scheduled visits exceed the cap {cap}", tau=tau, l_tau=l_schedule[-1], cap=cap
        )
    return ConstructionPlan(
        family=family,
        K=K,
        p=p,
        U=U,
        V=V,
        M=M,
        J=J,
        J_x=x.max_index,
        eta=eta,
        s0=s0,
        N0=N0,
        c=c,
        tau=tau,
        lambda_points=points,
        l_schedule=l_schedule,
        delta=Fraction(1, 2 + s0),
        budget=budget_for(l_schedule, s0, len(y)),
        d_steps=steps,
        cap=cap,
    )


def budget_estimate(family, K, p, U, V, M, cap=DEFAULT_CAP):
    pl = plan(family, K, p, U, V, M, cap=cap)
    return {
        "tau": pl.tau,
        "l_tau": pl.l_schedule[-1],
        "s0": pl.s0,
        "c": pl.c,
        **pl.budget.to_json(),
    }


def build(pl: ConstructionPlan) -> SparseVector:
    """Assemble ``z = x + sum_t sum_l F^{l_t + l s0}(lam_t) y`` and check ``z in U``."""
    y = pl.V.center
    fam = pl.family
    idx_parts, coef_parts = [pl.U.center.indices], [pl.U.center.coefs]
    for t in range(1, pl.tau + 1):
        lam = pl.lambda_points[t]
        k = pl.block_times(t)
        for nu, c in y.pairs():
            logs = np.asarray(fam.log_product(nu + 1, nu + k, lam), dtype=np.float64)
            coefs = c * np.exp(-logs)
            if np.any(np.abs(coefs) < np.finfo(np.float64).tiny):
                raise ConstructionError(
                    f"block {t} coefficients underflow double precision (max index {nu + int(k[-1])})"
                )
            idx_parts.append(nu + k)
            coef_parts.append(coefs)
    idx = np.concatenate(idx_parts)
    if np.unique(idx).size != idx.size:
        raise ConstructionError("block supports overlap")
    z = SparseVector.from_arrays(idx, np.concatenate(coef_parts))
    if not in_ball(z, pl.U):
        gap = norm(z - pl.U.center, pl.U.metric)
        raise ConstructionError(f"||z - x|| = {gap} is not below r = {pl.U.radius}")
    return z
