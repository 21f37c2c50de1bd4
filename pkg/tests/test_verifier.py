import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ufhc.constructor import ConstructionPlan, build, plan
from ufhc.sequence_space import LpNorm, OpenBall, SparseVector, in_ball
from ufhc.verifier import default_grid, verify_density_certificate, verify_membership, verify_scheduled_visits
from ufhc.weight_families import CompactInterval, ConstantMultiple, ExpFamily, RatioPower, constant, geometric, shift_power_apply

e = SparseVector.basis
ZERO = SparseVector.zero()


@pytest.fixture(scope="module")
def demo():
    pl = plan(ConstantMultiple(), CompactInterval(2.0, 2.0), 2.0, OpenBall(ZERO, 1.0), OpenBall(e(0), 0.5), 1)
    return pl, build(pl)


@pytest.fixture(scope="module")
def small_rp():
    # two blocks, cheap enough for exhaustive scans
    pl = plan(RatioPower(), CompactInterval(1.5, 1.59), 2.0, OpenBall(ZERO, 1.0), OpenBall(e(0), 0.9), 1)
    assert pl.tau == 2
    return pl, build(pl)


def test_membership_examples(demo):
    x = SparseVector.from_pairs([(0, 0.3)])
    U = OpenBall(x, 0.5, LpNorm(2.0))
    assert verify_membership(x, U)
    assert not verify_membership(x + e(4, 0.5), U)
    pl, z = demo
    assert verify_membership(z, pl.U)


def test_demo_scheduled_visits(demo):
    pl, z = demo
    (vc,) = verify_scheduled_visits(pl, z, [2.0])
    assert vc.times == (6, 10, 14, 18, 22, 26, 30)
    assert vc.ok
    # independent check through the generic operator
    for m in vc.times:
        orbit = shift_power_apply(pl.family, 2.0, m, z)
        assert orbit.coefficient(0) == pytest.approx(1.0, rel=1e-12)
        assert in_ball(orbit, pl.V)


def test_schedule_never_contains_zero(demo):
    pl, _ = demo
    assert pl.block_times(1)[0] >= 3


def test_demo_certificate(demo):
    pl, z = demo
    cert = verify_density_certificate(pl, z, [2.0])
    (r,) = cert.results
    assert r.density.best_density == Fraction(7, 31)
    assert r.density.best_density > Fraction(1, 6)
    assert cert.overall and not cert.degenerate
    assert cert.label == "empirical"


def test_grid_outside_interval_rejected(demo):
    pl, z = demo
    with pytest.raises(ValueError):
        verify_scheduled_visits(pl, z, [2.5])


def test_empty_grid_is_degenerate(demo):
    pl, z = demo
    cert = verify_density_certificate(pl, z, [])
    assert cert.overall and cert.degenerate


def test_default_grid_contains_breakpoints(small_rp):
    pl, _ = small_rp
    g = default_grid(pl, 5)
    assert g == sorted(set(g))
    assert set(pl.lambda_points) <= set(g)
    assert g[0] == pl.K.a and g[-1] == pl.K.b


def test_boundary_assigned_to_own_block(small_rp):
    pl, _ = small_rp
    assert pl.block_of(pl.lambda_points[0]) == 1
    assert pl.block_of(pl.lambda_points[1]) == 1
    assert pl.block_of(np.nextafter(pl.lambda_points[1], 2.0)) == 2


def test_rp_certificate_passes_and_is_deterministic(small_rp):
    pl, z = small_rp
    grid = default_grid(pl, 6)
    a = verify_density_certificate(pl, z, grid)
    b = verify_density_certificate(pl, z, grid)
    assert a.overall
    assert a.dumps() == b.dumps()
    assert all(r.density.best_density > pl.delta for r in a.results)


def test_scheduled_density_is_conservative(small_rp):
    pl, z = small_rp
    grid = default_grid(pl, 3)
    sched = verify_density_certificate(pl, z, grid, "scheduled")
    full = verify_density_certificate(pl, z, grid, "exhaustive")
    for s, f in zip(sched.results, full.results):
        assert s.density.best_density <= f.density.best_density


def test_exhaustive_cap(small_rp):
    pl, z = small_rp
    with pytest.raises(ValueError):
        verify_density_certificate(pl, z, [pl.K.b], "exhaustive", exhaustive_cap=10)


@settings(max_examples=15)
@given(st.lists(st.floats(0, 1), max_size=6), st.lists(st.floats(0, 1), max_size=6))
def test_refinement_is_monotone(small_rp, u, v):
    pl, z = small_rp
    # a bump on a block-2 visit index breaks block 2 but not block 1
    bad = z + e(int(pl.block_times(2)[3]), 1e-2)
    pts = lambda w: [pl.K.a + t * (pl.K.b - pl.K.a) for t in w]
    coarse = verify_density_certificate(pl, bad, pts(u)).overall
    fine = verify_density_certificate(pl, bad, pts(u + v)).overall
    assert not (fine and not coarse)


def test_certificate_csv(tmp_path, demo):
    pl, z = demo
    cert = verify_density_certificate(pl, z, [2.0])
    cert.write_csv(tmp_path / "c.csv")
    assert (tmp_path / "c.csv").read_text().splitlines() == [
        "lambda,t,checked_times,passed_times,best_density_num,best_density_den",
        "2.0,1,7,7,7,31",
    ]


def test_plan_round_trip_reproduces_certificate(small_rp):
    pl, z = small_rp
    again = ConstructionPlan.from_json(json.loads(json.dumps(pl.to_json())))
    grid = default_grid(pl, 4)
    assert verify_density_certificate(pl, z, grid).dumps() == verify_density_certificate(again, build(again), grid).dumps()
