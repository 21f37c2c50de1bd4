"""Applicability checks for the common upper-frequent-hypercyclicity criterion
for weighted backward shifts on l^p.

Every verdict is decided from closed forms (the growth classes of the
families' partial sums). Numerical partial sums are attached as probes to
corroborate the verdict, never to decide it.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NonSummable
from .series import reciprocal_at_powers_diverges, summable_exp_neg
from .weight_families import (
    CompactInterval,
    ExpFamily,
    WeightFamily,
    _check_interval,
    inverse_tail_bound,
)

PROBE_CHECKPOINTS = (1_000, 10_000, 50_000, 100_000)

MONOTONE = "monotone_weights"
INVERSE_SERIES = "inverse_series_converges"
LOG_LIPSCHITZ = "log_lipschitz"
POWER_SUMS = "lipschitz_sums_at_powers"
SUMMABLE_LIPSCHITZ = "summable_lipschitz"
BOUNDED_A = "bounded_positive_a"
SUMMABLE_B = "summable_b"
SUMMABLE_A_PRODUCTS = "summable_inverse_a_products"

SHIFT_CRITERION = (MONOTONE, INVERSE_SERIES, LOG_LIPSCHITZ, POWER_SUMS)


class Status(str, enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Verdict:
    condition: str
    status: Status
    witness: dict = field(default_factory=dict)

    @property
    def holds(self):
        return self.status is Status.HOLDS

    def to_json(self):
        return {"condition": self.condition, "status": self.status.value, "witness": self.witness}


def probe_trend(partials):
    """``"stable"`` if the last doubling moved the partial sum by < 0.1%, else ``"growing"``."""
    vals = [v for _, v in sorted(partials.items())]
    if len(vals) < 2 or not math.isfinite(vals[-1]):
        return "growing"
    step = vals[-1] - vals[-2]
    return "stable" if step <= 1e-3 * max(1.0, abs(vals[-2])) else "growing"


def _partials(terms):
    cum = np.cumsum(terms)
    return {n: float(cum[n - 1]) for n in PROBE_CHECKPOINTS if n <= cum.size}


def _probe(converges, partials):
    trend = probe_trend(partials)
    agrees = None if converges is None else (trend == "stable") == converges
    return {"partial_sums": {str(k): v for k, v in partials.items()}, "trend": trend, "agrees": agrees}


def _status(flag):
    if flag is None:
        return Status.INCONCLUSIVE
    return Status.HOLDS if flag else Status.FAILS


def inverse_series_probe(fam, a, p, terms=PROBE_CHECKPOINTS[-1]):
    """Brute-force partial sums of ``sum_nu (w_1(a)...w_nu(a))^-p``, term by term."""
    logs = np.cumsum(np.asarray(fam.log_weight(np.arange(1, terms + 1), a), dtype=np.float64))
    with np.errstate(over="ignore"):
        return _partials(np.exp(-p * logs))


def power_sums_probe(fam, K, s, terms=PROBE_CHECKPOINTS[-1]):
    """Partial sums of ``sum_t 1 / (L_1 + ... + L_{s^t})``."""
    log_m = np.arange(1, terms + 1, dtype=np.float64) * math.log(s)
    S = np.asarray(fam.lipschitz_prefix_exp(K, log_m), dtype=np.float64)
    with np.errstate(divide="ignore"):
        return _partials(1.0 / S)


def _check_monotone(fam, K, n_probe):
    certified, formula = fam.monotonicity()
    lams = np.unique(np.linspace(K.a, K.b, 11))
    n = np.arange(1, n_probe + 1)
    table = np.array([np.asarray(fam.log_weight(n, lam), dtype=np.float64) for lam in lams])
    violations = int(np.sum(np.diff(table, axis=0) < -1e-14 * (1 + np.abs(table[:-1]))))
    witness = {
        "closed_form": formula,
        "probe": {"n_max": n_probe, "lambda_points": len(lams), "violations": violations},
    }
    if certified and violations:
        return Verdict(MONOTONE, Status.INCONCLUSIVE, witness | {"note": "probe contradicts formula"})
    return Verdict(MONOTONE, _status(certified), witness)


def _check_inverse_series(fam, K, p):
    growth = fam.log_product_growth(K.a).scale(p)
    converges = summable_exp_neg(growth)
    witness = {
        "at_lambda": K.a,
        "series": fam.inverse_series_formula(K.a, p),
        "log_term_growth": growth.describe(),
        "probe": _probe(converges, inverse_series_probe(fam, K.a, p)),
    }
    if converges:
        try:
            witness["certified_norm_bound"] = inverse_tail_bound(fam, K.a, 0, 1, p)
        except NonSummable as exc:
            witness["certified_norm_bound"] = None
            witness["note"] = str(exc)
    return Verdict(INVERSE_SERIES, _status(converges), witness)


def _check_log_lipschitz(fam, K, n_probe):
    rng = np.random.default_rng(0)
    lam = rng.uniform(K.a, K.b, 64)
    mu = rng.uniform(K.a, K.b, 64)
    n = np.arange(1, n_probe + 1)
    L = np.asarray(fam.lipschitz(K, n), dtype=np.float64)
    worst = 0.0
    for x, y in zip(lam, mu):
        gap = np.abs(np.asarray(fam.log_weight(n, x)) - np.asarray(fam.log_weight(n, y)))
        worst = max(worst, float(np.max(gap - L * abs(x - y))))
    ok = worst <= 1e-12
    witness = {
        "closed_form": fam.lipschitz_formula(),
        "first_values": [float(v) for v in L[:5]],
        "probe": {"pairs": 64, "n_max": n_probe, "max_excess": worst},
    }
    return Verdict(LOG_LIPSCHITZ, Status.HOLDS if ok else Status.INCONCLUSIVE, witness)


def _check_power_sums(fam, K, s_list):
    growth = fam.lipschitz_growth(K)
    diverges = reciprocal_at_powers_diverges(growth)
    try:
        lead = growth.leading()
    except ValueError:
        lead = None
    if lead is None:
        reason = "sum_n L_n converges, so 1/S(s^t) tends to a positive constant"
    else:
        (e, d, k), c = lead
        if e == 0 and d == 0 and k == 1:
            reason = f"S(m) ~ {c:g} log m, so S(s^t) ~ {c:g} t log s: harmonic comparison"
        else:
            reason = f"S(m) ~ {growth.describe()}: sum_t 1/S(s^t) is dominated by a geometric series"
    per_s = {}
    for s in s_list:
        entry = {"probe": _probe(None if diverges is None else not diverges, power_sums_probe(fam, K, s))}
        if lead is not None and diverges is False:
            (e, d, k), c = lead
            if e == 0 and k == 0:
                # S(s^t) ~ c s^{dt}: sum_t ~ 1/(c (s^d - 1)); exact when S(m) = c m
                entry["closed_form_sum"] = 1.0 / (c * (s ** d - 1))
        per_s[str(s)] = entry
    witness = {"partial_sum_growth": growth.describe(), "reason": reason, "per_s": per_s}
    return Verdict(POWER_SUMS, _status(diverges), witness)


def check_shift_criterion(fam: WeightFamily, K: CompactInterval, p: float, s_list=(2, 3, 10), n_probe=100):
    """One verdict per hypothesis of the weighted-shift criterion on ``K``."""
    _check_interval(fam, K)
    if any(s < 2 for s in s_list):
        raise ValueError("s values must be >= 2")
    return [
        _check_monotone(fam, K, n_probe),
        _check_inverse_series(fam, K, p),
        _check_log_lipschitz(fam, K, n_probe),
        _check_power_sums(fam, K, s_list),
    ]


def check_summable_lipschitz(fam: WeightFamily, K: CompactInterval, p: float) -> Verdict:
    """Does ``sum_n L_n(K)`` converge (the stronger, summable-Lipschitz variant)?"""
    _check_interval(fam, K)
    growth = fam.lipschitz_growth(K)
    try:
        converges = growth.leading() is None
    except ValueError:
        converges = None
    n = np.arange(1, PROBE_CHECKPOINTS[-1] + 1)
    witness = {
        "closed_form": fam.lipschitz_formula(),
        "partial_sum_growth": growth.describe(),
        "probe": _probe(converges, _partials(np.asarray(fam.lipschitz(K, n), dtype=np.float64))),
    }
    if converges:
        witness["sum"] = float(fam.lipschitz_prefix(K, math.inf))
    return Verdict(SUMMABLE_LIPSCHITZ, _status(converges), witness)


def check_exponential_family(fam: ExpFamily, p: float):
    """Conditions on ``a_n`` and ``b_n`` for ``w_n(lam) = a_n exp(lam b_n)`` on l^p."""
    if not isinstance(fam, ExpFamily):
        raise TypeError("an exponential family (a_n, b_n) is required")
    a, b = fam.a, fam.b
    n = np.arange(1, PROBE_CHECKPOINTS[-1] + 1)

    bounded = a.is_positive() and a.is_bounded()
    a_terms = np.asarray(a.term(n[:1000]), dtype=np.float64)
    v1 = Verdict(
        BOUNDED_A,
        _status(bounded),
        {
            "a_n": a.describe(),
            "sup": a.sup_from(1),
            "inf": a.inf_from(1),
            "probe": {"max_first_1000": float(a_terms.max()), "min_first_1000": float(a_terms.min())},
        },
    )

    b_growth = b.sum_growth()
    b_conv = b.is_nonnegative() and b_growth.leading() is None
    w2 = {
        "b_n": b.describe(),
        "partial_sum_growth": b_growth.describe(),
        "probe": _probe(b_conv, _partials(np.asarray(b.term(n), dtype=np.float64))),
    }
    if b_conv:
        w2["sum"] = float(b.prefix_sum(math.inf))
    v2 = Verdict(SUMMABLE_B, _status(b_conv), w2)

    a_growth = a.log_growth().scale(p)
    prod_conv = summable_exp_neg(a_growth)
    logs = np.cumsum(np.log(np.asarray(a.term(n), dtype=np.float64)))
    with np.errstate(over="ignore"):
        partials = _partials(np.exp(-p * logs))
    w3 = {
        "series": f"sum_n (prod_(i<=n) a_i)^(-{p:g})",
        "log_term_growth": a_growth.describe(),
        "probe": _probe(prod_conv, partials),
    }
    if a.kind == "constant" and a.scale > 1:
        w3["sum"] = 1.0 / (a.scale ** p - 1)
    v3 = Verdict(SUMMABLE_A_PRODUCTS, _status(prod_conv), w3)
    return [v1, v2, v3]


def required_conditions(K: CompactInterval):
    """Conditions the block construction actually uses on ``K``.

    On a one-point interval no subdivision is needed, so the growth condition
    on the Lipschitz sums plays no role.
    """
    if K.degenerate:
        return (MONOTONE, INVERSE_SERIES, LOG_LIPSCHITZ)
    return SHIFT_CRITERION


def is_applicable(verdicts, K: CompactInterval):
    by_name = {v.condition: v for v in verdicts}
    return all(by_name[c].holds for c in required_conditions(K))
