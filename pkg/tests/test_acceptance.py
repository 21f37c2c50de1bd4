"""Acceptance criteria, one test per criterion.

Each test records a pass/fail line that is printed in the pytest terminal
summary (and directly when this file is run as a script).
"""

import contextlib
import json
import math
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from conftest import ACCEPTANCE_RESULTS, random_sparse
from ufhc.constructor import build, compute_d, plan
from ufhc.criterion_checker import (
    BOUNDED_A,
    INVERSE_SERIES,
    POWER_SUMS,
    SUMMABLE_A_PRODUCTS,
    SUMMABLE_B,
    Status,
    check_exponential_family,
    check_shift_criterion,
    check_summable_lipschitz,
    is_applicable,
)
from ufhc.density_analysis import VisitProfile, best_density_from, finite_density
from ufhc.errors import BudgetExceeded
from ufhc.config import load_config
from ufhc.sequence_space import FNormLadder, LpNorm, OpenBall, Seminorm, SparseVector, f_norm, norm, p_norm
from ufhc.verifier import default_grid, verify_density_certificate
from ufhc.weight_families import (
    CompactInterval,
    ConstantMultiple,
    ExpFamily,
    RatioPower,
    constant,
    geometric,
    inverse_tail_bound,
    right_inverse_power_apply,
    shift_power_apply,
)

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
e = SparseVector.basis
ZERO = SparseVector.zero()
RP = RatioPower()
CM = ConstantMultiple()
EXP = ExpFamily(constant(2.0), geometric(0.5))


@contextlib.contextmanager
def criterion(key, title):
    detail = {"text": ""}
    try:
        yield detail
    except BaseException:
        ACCEPTANCE_RESULTS[key] = (False, title, detail["text"])
        print(f"[FAIL] criterion {key}: {title}")
        raise
    ACCEPTANCE_RESULTS[key] = (True, title, detail["text"])
    print(f"[PASS] criterion {key}: {title} - {detail['text']}")


def test_criterion_1_right_inverse_identity():
    with criterion(1, "B^n F^n e_nu = e_nu (nu <= 50, n <= 70), error <= 1e-12, < 5 s") as out:
        start = time.perf_counter()
        cases = [(RP, 1.1), (RP, 1.5), (RP, 2.0), (EXP, 0.0), (EXP, 1.0), (CM, 2.0)]
        worst = 0.0
        for fam, lam in cases:
            for nu in range(51):
                for n in range(71):
                    back = shift_power_apply(fam, lam, n, right_inverse_power_apply(fam, lam, n, e(nu)))
                    assert back.indices.tolist() == [nu]
                    worst = max(worst, abs(float(back.coefs[0]) - 1.0))
        elapsed = time.perf_counter() - start
        out["text"] = f"max error {worst:.2e}, {elapsed:.2f} s"
        assert worst <= 1e-12
        assert elapsed < 5


def test_criterion_2_orbit_oracle():
    with criterion(2, "B^m x equals m single steps, rel. error <= 1e-9 (200 vectors)") as out:
        rng = np.random.default_rng(2)
        cases = [(RP, 1.3), (CM, 1.7), (EXP, 0.5), (EXP, -0.4)]
        worst = 0.0
        for k in range(200):
            fam, lam = cases[k % len(cases)]
            x = random_sparse(rng, max_index=200, max_support=20)
            m = int(rng.integers(0, 101))
            step = x
            for _ in range(m):
                step = shift_power_apply(fam, lam, 1, step)
            direct = shift_power_apply(fam, lam, m, x)
            assert direct.indices.tolist() == step.indices.tolist()
            if len(direct):
                worst = max(worst, float(np.max(np.abs(direct.coefs - step.coefs) / np.abs(step.coefs))))
        out["text"] = f"max relative error {worst:.2e}"
        assert worst <= 1e-9


def test_criterion_3_density_oracle():
    with criterion(3, "finite_density / best_density_from equal brute force (500 subsets)") as out:
        rng = np.random.default_rng(3)
        checked = 0
        for _ in range(500):
            k = int(rng.integers(0, 502))
            A = set(rng.choice(501, size=k, replace=False).tolist())
            prof = VisitProfile(tuple(sorted(A)), 500)
            count = 0
            best, at = None, None
            M = int(rng.integers(0, 501))
            for n in range(501):
                count += n in A
                dens = Fraction(count, n + 1)
                assert finite_density(prof, n) == dens
                if n >= M and (best is None or dens > best):
                    best, at = dens, n
                checked += 1
            for n in rng.integers(0, 501, 3).tolist():
                assert finite_density(prof, n) == Fraction(len(A & set(range(n + 1))), n + 1)
            rep = best_density_from(prof, M)
            assert (rep.best_density, rep.achieved_at) == (best, at)
        out["text"] = f"{checked} densities compared exactly"


def _probes_agree(verdict):
    w = verdict.witness
    if "probe" in w and "agrees" in w["probe"]:
        return w["probe"]["agrees"] is not False
    if "per_s" in w:
        return all(entry["probe"]["agrees"] is not False for entry in w["per_s"].values())
    return True


def test_criterion_4_checker_verdicts():
    with criterion(4, "checker verdicts with closed-form witnesses and agreeing probes") as out:
        K = CompactInterval(1.0, 1.1)
        rp = check_shift_criterion(RP, K, 2.0)
        assert [v.status for v in rp] == [Status.HOLDS] * 4 and is_applicable(rp, K)

        cm = {v.condition: v for v in check_shift_criterion(CM, CompactInterval(2.0, 3.0), 2.0)}
        assert cm[POWER_SUMS].status is Status.FAILS

        cor = check_summable_lipschitz(EXP, CompactInterval(0.0, 1.0), 2.0)
        prop = check_exponential_family(EXP, 2.0)
        assert cor.status is Status.HOLDS and cor.witness["sum"] == pytest.approx(1.0)
        assert [v.status for v in prop] == [Status.HOLDS] * 3

        everything = rp + list(cm.values()) + [cor] + prop
        for v in everything:
            assert v.witness, v.condition
            assert _probes_agree(v), v.condition
        assert "partial_sums" in rp[1].witness["probe"] and "100000" in rp[1].witness["probe"]["partial_sums"]
        assert cm[POWER_SUMS].witness["per_s"]["2"]["closed_form_sum"] == pytest.approx(2.0)
        out["text"] = f"{len(everything)} verdicts, all probes consistent"


def _brute_tail(a, nu, s, p, terms=10**6):
    i = np.arange(nu + 1, nu + s + terms, dtype=np.float64)
    logs = a * np.cumsum(np.log1p(1.0 / i))
    return math.fsum(np.exp(-p * logs[s - 1 :]).tolist()) ** (1.0 / p)


def test_criterion_5_certified_tail_bounds():
    with criterion(5, "RatioPower tail bounds dominate brute force (10^6 terms), within 10x") as out:
        worst = 0.0
        for a in (1.0, 1.5):
            for nu in (0, 3):
                for s in (4, 16, 64):
                    bound = inverse_tail_bound(RP, a, nu, s, 2.0)
                    truth = _brute_tail(a, nu, s, 2.0)
                    assert truth <= bound <= 10 * truth, (a, nu, s, bound, truth)
                    worst = max(worst, bound / truth)
        out["text"] = f"largest bound / brute-force ratio {worst:.5f}"


def test_criterion_6_degenerate_witness():
    with criterion(6, "degenerate K = [2, 2] witness: s0=4, N0=1, c=6, tau=1, density 7/31 > 1/6, < 1 s") as out:
        start = time.perf_counter()
        cfg = load_config(CONFIGS / "degenerate_demo.json")
        pl = plan(cfg.family, cfg.K, cfg.p, cfg.U, cfg.V, cfg.M)
        assert (pl.s0, pl.N0, pl.c, pl.tau) == (4, 1, 6, 1)
        z = build(pl)
        assert norm(z, LpNorm(2.0)) < 1
        cert = verify_density_certificate(pl, z, [2.0])
        elapsed = time.perf_counter() - start
        (r,) = cert.results
        assert (r.visits.checked, r.visits.passed) == (7, 7)
        assert r.density.best_density == Fraction(7, 31) and Fraction(7, 31) > Fraction(1, 6)
        assert cert.overall
        out["text"] = f"{elapsed * 1000:.0f} ms"
        assert elapsed < 1


def test_criterion_7_narrow_interval_witness():
    with criterion(7, "narrow RatioPower witness, <= 1e7 coefficient ops, >= 20 grid points per block, < 10 min") as out:
        start = time.perf_counter()
        cfg = load_config(CONFIGS / "narrow_ratio_power.json")
        pl = plan(cfg.family, cfg.K, cfg.p, cfg.U, cfg.V, cfg.M, cap=cfg.budget_cap)
        assert pl.budget.coefficient_ops <= 10**7
        # just under the cap: a slightly wider interval no longer fits
        wider = plan(cfg.family, CompactInterval(cfg.K.a, cfg.K.b + 1e-4), cfg.p, cfg.U, cfg.V, cfg.M, cap=cfg.budget_cap)
        assert wider.budget.coefficient_ops > 10**7
        z = build(pl)
        grid = default_grid(pl, cfg.grid_per_block)
        per_block = [sum(1 for lam in grid if pl.block_of(lam) == t) for t in range(1, pl.tau + 1)]
        assert min(per_block) >= 20
        cert = verify_density_certificate(pl, z, grid)
        elapsed = time.perf_counter() - start
        assert all(r.visits.ok for r in cert.results)
        assert all(r.density.best_density > pl.delta for r in cert.results)
        assert cert.overall
        worst = min(r.density.best_density for r in cert.results)
        out["text"] = (
            f"K = [{cfg.K.a}, {cfg.K.b}], tau = {pl.tau}, {pl.budget.coefficient_ops} ops, "
            f"grid {per_block}, worst density {float(worst):.5f} > {float(pl.delta):.5f}, {elapsed:.1f} s"
        )
        assert elapsed < 600


def _random_config(rng):
    kind = rng.integers(3)
    if kind == 0:
        fam, a = RP, float(rng.uniform(0.8, 3.0))
        width = float(rng.choice([0.0, 1e-3, 1e-2, 0.03, 0.3]))
    elif kind == 1:
        fam, a, width = CM, float(rng.uniform(1.2, 4.0)), 0.0
    else:
        fam, a = EXP, float(rng.uniform(-1.0, 1.0))
        width = float(rng.choice([0.0, 0.01, 0.1, 0.5, 2.0]))
    y = random_sparse(rng, max_index=5, max_support=3)
    x = random_sparse(rng, max_index=5, max_support=3) if rng.random() < 0.5 else ZERO
    U = OpenBall(x, float(rng.uniform(0.1, 2.0)))
    V = OpenBall(y, float(rng.uniform(0.1, 1.0)))
    return fam, CompactInterval(a, a + width), U, V, int(rng.integers(1, 30))


def test_criterion_8_plan_invariants():
    with criterion(8, "plan invariants on 50 random configs") as out:
        rng = np.random.default_rng(8)
        planned = rejected = 0
        for _ in range(50):
            fam, K, U, V, M = _random_config(rng)
            try:
                pl = plan(fam, K, 2.0, U, V, M)
            except BudgetExceeded as exc:
                rejected += 1
                assert exc.cap == 10**6
                continue
            planned += 1
            assert pl.c == max(pl.N0, 2 + pl.s0, M)
            L = pl.l_schedule
            assert all(L[t] + L[t] * pl.s0 < L[t + 1] for t in range(len(L) - 1))
            times = [lt + l * pl.s0 for lt in L for l in range(lt + 1)]
            assert len(set(times)) == len(times)
            assert pl.lambda_points[0] == K.a and pl.lambda_points[-1] == K.b
            for t in range(1, pl.tau + 1):
                assert 0 <= pl.lambda_points[t] - pl.lambda_points[t - 1] <= pl.d(pl.c ** (t + 1))
            # strict decrease, checked where consecutive values differ by more than
            # double-precision resolution (summable Lipschitz constants saturate d_n)
            d = [pl.d(n) for n in range(1, 40)]
            assert all(b < a for a, b in zip(d, d[1:]))
        out["text"] = f"{planned} planned, {rejected} budget-rejected"
        assert planned >= 25


def _random_ladder(rng):
    depth = int(rng.integers(1, 5))
    cuts = sorted(rng.integers(0, 40, depth - 1).tolist()) + [None]
    return FNormLadder(tuple(Seminorm(float(rng.choice([1.0, 2.0, 3.0])), c) for c in cuts))


def test_criterion_9_fnorm_axioms():
    with criterion(9, "F-norm axioms on 1000 random vectors; all-l2 ladder equals min(1, ||x||_2)") as out:
        rng = np.random.default_rng(9)
        l2 = FNormLadder.uniform(2.0, 4)
        for _ in range(1000):
            ladder = _random_ladder(rng)
            scale = 10.0 ** rng.uniform(-3, 1)
            x = random_sparse(rng, max_index=60, max_support=10, scale=scale)
            y = random_sparse(rng, max_index=60, max_support=10, scale=scale)
            fx, fy = f_norm(x, ladder), f_norm(y, ladder)
            assert f_norm(x + y, ladder) <= fx + fy + 1e-15
            c = float(rng.uniform(-1, 1))
            assert f_norm(x * c, ladder) <= fx + 1e-15
            assert f_norm(ZERO, ladder) == 0
            tail = [f_norm(x * 2.0**-j, ladder) for j in range(0, 60, 5)]
            assert all(b <= a for a, b in zip(tail, tail[1:])) and tail[-1] < 1e-12
            assert f_norm(x, l2) == min(1.0, p_norm(x, 2.0))
        out["text"] = "1000 vectors, exact equality for the l2 ladder"


if __name__ == "__main__":
    import subprocess
    import sys

    sys.exit(subprocess.call([sys.executable, "-m", "pytest", __file__, "-q"]))
