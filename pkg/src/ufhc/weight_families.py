"""Parametric weight families for backward shifts on l^p.

A family maps a real parameter ``lam`` to positive weights ``w_n(lam)``,
``n >= 1``. The backward shift acts by ``B e_nu = w_nu e_{nu-1}`` (``B e_0 = 0``)
and its right inverse by ``F e_nu = e_{nu+1} / w_{nu+1}``. Every product of
weights is handled as a sum of logarithms and exponentiated once at the end.

Besides point evaluation each family knows, in closed form:

* partial sums of ``log w_i(lam)`` (``log_prefix``), used for orbit formulas;
* a log-Lipschitz bound ``L_n(K)`` and its partial sums;
* the asymptotic growth of both partial sums, used by the criterion checker;
* an analytic majorant for tails of ``sum_n e_{nu+n} / (w_{nu+1}...w_{nu+n})``.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import NonSummable, UncertifiedTail
from .sequence_space import SparseVector
from .series import LOG_N, N_LOG_N, Growth, exp_key, poly_key, summable_exp_neg

EULER_GAMMA = 0.5772156649015329

# exact terms summed before switching to the analytic tail majorant
TAIL_WINDOW = 4096
# relative slack absorbing rounding in the certified tail bounds
TAIL_SLACK = 1e-12


def _as_float(k):
    """Float view of an index or index array; Python ints too large become inf."""
    if isinstance(k, (int, np.integer)):
        try:
            return float(k)
        except OverflowError:
            return math.inf
    return np.asarray(k, dtype=np.float64)


def _scalar(v):
    v = np.asarray(v)
    return float(v) if v.ndim == 0 else v


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    lo_open: bool = True
    hi_open: bool = True

    def contains(self, x):
        above = x > self.lo if self.lo_open else x >= self.lo
        below = x < self.hi if self.hi_open else x <= self.hi
        return bool(above and below)

    def describe(self):
        left = "(" if self.lo_open else "["
        right = ")" if self.hi_open else "]"
        return f"{left}{self.lo:g}, {self.hi:g}{right}"


REALS = Interval(-math.inf, math.inf)


@dataclass(frozen=True)
class CompactInterval:
    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError("interval endpoints must be finite")
        if self.a > self.b:
            raise ValueError(f"empty interval [{self.a}, {self.b}]")

    @property
    def degenerate(self):
        return self.a == self.b

    def within(self, domain: Interval):
        return domain.contains(self.a) and domain.contains(self.b)

    def to_json(self):
        return [self.a, self.b]


# -- coefficient sequences -------------------------------------------------


@dataclass(frozen=True)
class CoefficientSequence:
    """Closed-form sequence ``n -> scale * f(n)``, ``n >= 1``.

    ``f`` is ``1`` (constant), ``ratio**n`` (geometric) or ``n**exponent``
    (power). All three are monotone, which the tail majorants rely on.
    """

    kind: str
    scale: float = 1.0
    ratio: float = 1.0
    exponent: float = 0.0

    def __post_init__(self):
        if self.kind not in ("constant", "geometric", "power"):
            raise ValueError(f"unknown sequence kind {self.kind!r}")
        if self.kind == "geometric" and not self.ratio > 0:
            raise ValueError("geometric ratio must be positive")

    def term(self, n):
        n = _as_float(n)
        if self.kind == "constant":
            return _scalar(self.scale * np.ones_like(n))
        if self.kind == "geometric":
            return _scalar(self.scale * np.power(self.ratio, n))
        return _scalar(self.scale * np.power(n, self.exponent))

    def prefix_sum(self, k):
        """``sum_{i=1}^k term(i)``; ``k`` may be an array or ``inf``."""
        k = _as_float(k)
        s = self.scale
        if s == 0:
            return _scalar(np.zeros_like(k))
        if self.kind == "constant" or (self.kind == "power" and self.exponent == 0):
            return _scalar(s * k)
        if self.kind == "geometric":
            r = self.ratio
            if r == 1:
                return _scalar(s * k)
            with np.errstate(over="ignore"):
                return _scalar(s * r * -np.expm1(k * math.log(r)) / (1 - r))
        e = self.exponent
        if e == -1:
            return _scalar(s * (special.digamma(k + 1) + EULER_GAMMA))
        if e < -1:
            with np.errstate(invalid="ignore"):
                tail = np.where(np.isinf(k), 0.0, special.zeta(-e, np.where(np.isinf(k), 1.0, k + 1)))
            return _scalar(s * (special.zeta(-e, 1) - tail))
        return _scalar(s * _power_prefix_slow(e, k))

    def prefix_log(self, k):
        """``sum_{i=1}^k log term(i)``; requires positive terms."""
        k = _as_float(k)
        ls = math.log(self.scale)
        if self.kind == "constant":
            return _scalar(k * ls)
        if self.kind == "geometric":
            return _scalar(k * ls + math.log(self.ratio) * k * (k + 1) / 2)
        return _scalar(k * ls + self.exponent * special.gammaln(k + 1))

    def limit(self):
        s = self.scale
        if s == 0:
            return 0.0
        if self.kind == "constant":
            return s
        if self.kind == "geometric":
            r = self.ratio
            return s if r == 1 else (0.0 if r < 1 else math.copysign(math.inf, s))
        e = self.exponent
        return s if e == 0 else (0.0 if e < 0 else math.copysign(math.inf, s))

    def inf_from(self, m):
        """``inf_{n >= m} term(n)`` for a monotone sequence."""
        return min(float(self.term(m)), self.limit())

    def sup_from(self, m):
        return max(float(self.term(m)), self.limit())

    def is_nonnegative(self):
        return self.scale >= 0

    def is_positive(self):
        return self.scale > 0

    def is_bounded(self):
        return math.isfinite(self.limit())

    def sum_growth(self) -> Growth:
        """Growth of ``sum_{i<=n} term(i)``."""
        s = self.scale
        if s == 0:
            return Growth()
        if self.kind == "constant":
            return Growth.single(poly_key(1), s)
        if self.kind == "geometric":
            r = self.ratio
            if r < 1:
                return Growth()
            if r == 1:
                return Growth.single(poly_key(1), s)
            return Growth.single(exp_key(math.log(r)), s * r / (r - 1))
        e = self.exponent
        if e > -1:
            return Growth.single(poly_key(e + 1), s / (e + 1))
        if e == -1:
            return Growth.single(LOG_N, s)
        return Growth()

    def log_growth(self) -> Growth:
        """Growth of ``sum_{i<=n} log term(i)``."""
        ls = math.log(self.scale)
        if self.kind == "constant":
            return Growth.single(poly_key(1), ls)
        if self.kind == "geometric":
            lr = math.log(self.ratio)
            return Growth.single(poly_key(2), lr / 2) + Growth.single(poly_key(1), ls + lr / 2)
        e = self.exponent
        # Stirling: log n! = n log n - n + (1/2) log n + O(1)
        return (
            Growth.single(N_LOG_N, e)
            + Growth.single(poly_key(1), ls - e)
            + Growth.single(LOG_N, e / 2)
        )

    def describe(self):
        s = f"{self.scale:g}"
        if self.kind == "constant":
            return s
        if self.kind == "geometric":
            return f"{s}*{self.ratio:g}^n"
        return f"{s}*n^{self.exponent:g}"

    def to_json(self):
        if self.kind == "constant":
            return {"kind": "constant", "value": self.scale}
        if self.kind == "geometric":
            return {"kind": "geometric", "ratio": self.ratio, "scale": self.scale}
        return {"kind": "power", "exponent": self.exponent, "scale": self.scale}

    @classmethod
    def from_json(cls, data):
        kind = data.get("kind")
        if kind == "constant":
            return constant(float(data["value"]))
        if kind == "geometric":
            return geometric(float(data["ratio"]), float(data.get("scale", 1.0)))
        if kind == "power":
            return power(float(data["exponent"]), float(data.get("scale", 1.0)))
        raise ValueError(f"unknown sequence kind {kind!r}")


def constant(value):
    return CoefficientSequence("constant", scale=value)


def geometric(ratio, scale=1.0):
    return CoefficientSequence("geometric", scale=scale, ratio=ratio)


def power(exponent, scale=1.0):
    return CoefficientSequence("power", scale=scale, exponent=exponent)


_SLOW_TABLE_LIMIT = 200_000


def _power_prefix_slow(e, k):
    """``sum_{i=1}^k i**e`` for ``e > -1``: a cumulative table, or mpmath for huge ``k``."""
    k = np.asarray(k, dtype=np.float64)
    out = np.empty(k.shape)
    flat_k, flat_out = k.reshape(-1), out.reshape(-1)
    finite = flat_k[np.isfinite(flat_k)]
    top = int(finite.max()) if finite.size else 0
    table = None
    if 0 < top <= _SLOW_TABLE_LIMIT:
        table = np.concatenate([[0.0], np.cumsum(np.arange(1, top + 1, dtype=np.float64) ** e)])
    for j, kj in enumerate(flat_k):
        if not np.isfinite(kj):
            flat_out[j] = math.inf
        elif kj <= 0:
            flat_out[j] = 0.0
        elif table is not None:
            flat_out[j] = table[int(kj)]
        else:
            import mpmath

            flat_out[j] = float(mpmath.zeta(-e) - mpmath.zeta(-e, kj + 1))
    return out


# -- families --------------------------------------------------------------


class WeightFamily:
    """Base class; concrete families override the closed forms."""

    kind = ""

    def weight_domain(self) -> Interval:
        """Parameters where every weight is defined and positive."""
        return REALS

    def parameter_domain(self, p) -> Interval:
        """The parameter set on which the family is meant to act on l^p."""
        return self.weight_domain()

    def head_length(self):
        return 0

    def log_weight(self, n, lam):
        raise NotImplementedError

    def log_prefix(self, k, lam):
        raise NotImplementedError

    def log_product(self, lo, hi, lam):
        """``sum_{i=lo}^{hi} log w_i(lam)``; zero on empty ranges."""
        lo = np.asarray(lo)
        return _scalar(self.log_prefix(np.asarray(hi), lam) - self.log_prefix(lo - 1, lam))

    def lipschitz(self, K, n):
        raise NotImplementedError

    def lipschitz_prefix(self, K, m):
        raise NotImplementedError

    def lipschitz_prefix_exp(self, K, log_m):
        """``lipschitz_prefix`` at ``m = exp(log_m)``, usable when ``m`` overflows."""
        with np.errstate(over="ignore"):
            m = np.exp(np.asarray(log_m, dtype=np.float64))
        return _scalar(self.lipschitz_prefix(K, m))

    def log_product_growth(self, lam) -> Growth:
        raise NotImplementedError

    def lipschitz_growth(self, K) -> Growth:
        raise NotImplementedError

    def monotonicity(self):
        """``(certified, derivative formula)`` for d/dlam log w_n(lam) >= 0."""
        raise NotImplementedError

    def tail_majorant(self, a, nu, p):
        """Bound on ``||sum_{n>=1} e_{nu+n} / (w_{nu+1}(a)...w_{nu+n}(a))||_p``."""
        raise NotImplementedError

    def closed_tail(self, a, nu, s, p):
        return None

    def describe(self):
        return self.kind

    def lipschitz_formula(self):
        raise NotImplementedError

    def to_json(self):
        raise NotImplementedError


@dataclass(frozen=True)
class RatioPower(WeightFamily):
    """``w_n(lam) = ((n+1)/n)**lam``."""

    kind = "ratio_power"

    def parameter_domain(self, p):
        return Interval(1.0 / p, math.inf)

    def log_weight(self, n, lam):
        return _scalar(lam * np.log1p(1.0 / _as_float(n)))

    def log_prefix(self, k, lam):
        return _scalar(lam * np.log1p(_as_float(k)))

    def log_product(self, lo, hi, lam):
        # telescoping: prod_{i=lo}^{hi} (i+1)/i = (hi+1)/lo
        lo = _as_float(lo)
        hi = _as_float(hi)
        return _scalar(lam * np.log1p((hi + 1 - lo) / lo))

    def lipschitz(self, K, n):
        return _scalar(np.log1p(1.0 / _as_float(n)))

    def lipschitz_prefix(self, K, m):
        if isinstance(m, (int, np.integer)):
            return math.log(int(m) + 1)
        return _scalar(np.log1p(_as_float(m)))

    def lipschitz_prefix_exp(self, K, log_m):
        log_m = np.asarray(log_m, dtype=np.float64)
        return _scalar(log_m + np.log1p(np.exp(-log_m)))

    def log_product_growth(self, lam):
        return Growth.single(LOG_N, lam)

    def lipschitz_growth(self, K):
        return Growth.single(LOG_N, 1.0)

    def monotonicity(self):
        return True, "d/dlam log w_n = log((n+1)/n) > 0"

    def tail_majorant(self, a, nu, p):
        sigma = a * p
        if sigma <= 1:
            raise NonSummable(f"sum_k k^(-{sigma:g}) diverges (need a*p > 1)")
        # sum_{n>=1} ((nu+1)/(nu+n+1))^sigma = (nu+1)^sigma sum_{k>=K} k^-sigma, K = nu+2,
        # and sum_{k>=K} k^-sigma <= K^-sigma + K^(1-sigma)/(sigma-1)
        K = nu + 2
        log_pth = sigma * math.log((nu + 1) / K) + math.log1p(K / (sigma - 1))
        return math.exp(log_pth / p)

    def describe(self):
        return "w_n(lam) = ((n+1)/n)^lam"

    def lipschitz_formula(self):
        return "L_n(K) = log((n+1)/n); sum_{i<=m} L_i = log(m+1)"

    def inverse_series_formula(self, a, p):
        return f"sum_nu (nu+1)^(-lam*p) at lam*p = {a * p:g}"

    def to_json(self):
        return {"kind": self.kind, "params": {}}


@dataclass(frozen=True)
class ConstantMultiple(WeightFamily):
    """``w_n(lam) = lam``, i.e. ``lam * B``."""

    kind = "constant_multiple"

    def weight_domain(self):
        return Interval(0.0, math.inf)

    def parameter_domain(self, p):
        return Interval(1.0, math.inf)

    def log_weight(self, n, lam):
        return _scalar(math.log(lam) * np.ones_like(_as_float(n)))

    def log_prefix(self, k, lam):
        return _scalar(_as_float(k) * math.log(lam))

    def log_product(self, lo, hi, lam):
        return _scalar((_as_float(hi) - _as_float(lo) + 1) * math.log(lam))

    def lipschitz(self, K, n):
        return _scalar(np.ones_like(_as_float(n)) / K.a)

    def lipschitz_prefix(self, K, m):
        return _scalar(_as_float(m) / K.a)

    def log_product_growth(self, lam):
        return Growth.single(poly_key(1), math.log(lam))

    def lipschitz_growth(self, K):
        return Growth.single(poly_key(1), 1.0 / K.a)

    def monotonicity(self):
        return True, "d/dlam log w_n = 1/lam > 0"

    def tail_majorant(self, a, nu, p):
        if a <= 1:
            raise NonSummable(f"geometric ratio 1/{a:g} >= 1: sum_n {a:g}^(-n p) diverges")
        return (1.0 / math.expm1(p * math.log(a))) ** (1.0 / p)

    def closed_tail(self, a, nu, s, p):
        if a <= 1:
            raise NonSummable(f"geometric ratio 1/{a:g} >= 1: sum_n {a:g}^(-n p) diverges")
        # (sum_{n>=s} a^{-np})^{1/p} = a^{-s} (1 - a^{-p})^{-1/p}, padded for rounding
        return math.exp(-s * math.log(a) - math.log(-math.expm1(-p * math.log(a))) / p) * (1 + TAIL_SLACK)

    def describe(self):
        return "w_n(lam) = lam"

    def lipschitz_formula(self):
        return "L_n(K) = 1/a; sum_{i<=m} L_i = m/a"

    def inverse_series_formula(self, a, p):
        return f"sum_nu {a:g}^(-nu p), geometric with ratio {a ** -p:.6g}"

    def to_json(self):
        return {"kind": self.kind, "params": {}}


@dataclass(frozen=True)
class ExpFamily(WeightFamily):
    """``w_n(lam) = a_n * exp(lam * b_n)``."""

    a: CoefficientSequence
    b: CoefficientSequence
    kind = "exp"

    def __post_init__(self):
        if not self.a.is_positive():
            raise ValueError("a_n must be positive")

    def log_weight(self, n, lam):
        return _scalar(np.log(self.a.term(n)) + lam * np.asarray(self.b.term(n)))

    def log_prefix(self, k, lam):
        out = np.asarray(self.a.prefix_log(k), dtype=np.float64)
        if lam != 0:
            out = out + lam * np.asarray(self.b.prefix_sum(k))
        return _scalar(out)

    def lipschitz(self, K, n):
        return _scalar(np.abs(self.b.term(n)))

    def lipschitz_prefix(self, K, m):
        if not self.b.is_nonnegative():
            raise ValueError("Lipschitz sums need b_n >= 0")
        return self.b.prefix_sum(m)

    def log_product_growth(self, lam):
        return self.a.log_growth() + self.b.sum_growth().scale(lam)

    def lipschitz_growth(self, K):
        return self.b.sum_growth()

    def monotonicity(self):
        return self.b.is_nonnegative(), f"d/dlam log w_n = b_n = {self.b.describe()}"

    def tail_majorant(self, a, nu, p):
        m = nu + 1
        inf_log_a = math.log(self.a.inf_from(m)) if self.a.inf_from(m) > 0 else -math.inf
        if a >= 0:
            inf_b = a * self.b.inf_from(m) if a > 0 else 0.0
        else:
            inf_b = a * self.b.sup_from(m)
        lower = inf_log_a + inf_b
        if not lower > 0:
            raise UncertifiedTail(
                f"inf_(n>{nu}) w_n({a:g}) <= 1: no geometric majorant for the inverse tail"
            )
        # weights beyond nu are all >= exp(lower): geometric tail with ratio exp(-lower)
        return (1.0 / math.expm1(p * lower)) ** (1.0 / p)

    def describe(self):
        return f"w_n(lam) = ({self.a.describe()}) * exp(lam * {self.b.describe()})"

    def lipschitz_formula(self):
        return f"L_n(K) = b_n = {self.b.describe()}"

    def inverse_series_formula(self, a, p):
        return f"sum_nu (prod_(i<=nu) a_i exp({a:g} b_i))^(-{p:g})"

    def to_json(self):
        return {"kind": self.kind, "params": {"a": self.a.to_json(), "b": self.b.to_json()}}


@dataclass(frozen=True)
class Tabulated(WeightFamily):
    """Finitely many explicit weights ``coef * exp(rate * lam)``, then ``tail``."""

    head: tuple
    tail: WeightFamily
    kind = "tabulated"

    def __post_init__(self):
        head = tuple((float(c), float(r)) for c, r in self.head)
        if any(c <= 0 for c, _ in head):
            raise ValueError("tabulated coefficients must be positive")
        object.__setattr__(self, "head", head)

    def _head_arrays(self):
        coef = np.array([c for c, _ in self.head], dtype=np.float64)
        rate = np.array([r for _, r in self.head], dtype=np.float64)
        return coef, rate

    def weight_domain(self):
        return self.tail.weight_domain()

    def parameter_domain(self, p):
        return self.tail.parameter_domain(p)

    def head_length(self):
        return len(self.head) + self.tail.head_length()

    def log_weight(self, n, lam):
        H = len(self.head)
        n_arr = np.asarray(n)
        coef, rate = self._head_arrays()
        idx = np.clip(n_arr.astype(np.int64) - 1, 0, max(H - 1, 0))
        head_val = np.log(coef[idx]) + rate[idx] * lam if H else 0.0
        return _scalar(np.where(n_arr <= H, head_val, self.tail.log_weight(np.maximum(n_arr, H + 1), lam)))

    def log_prefix(self, k, lam):
        H = len(self.head)
        coef, rate = self._head_arrays()
        head_prefix = np.concatenate([[0.0], np.cumsum(np.log(coef) + rate * lam)])
        kf = _as_float(k)
        k_head = np.minimum(kf, H).astype(np.int64)
        tail_part = self.tail.log_product(H + 1, np.maximum(kf, H), lam)
        return _scalar(head_prefix[k_head] + np.where(kf > H, tail_part, 0.0))

    def lipschitz(self, K, n):
        H = len(self.head)
        n_arr = np.asarray(n)
        _, rate = self._head_arrays()
        idx = np.clip(n_arr.astype(np.int64) - 1, 0, max(H - 1, 0))
        head_val = np.abs(rate[idx]) if H else 0.0
        return _scalar(np.where(n_arr <= H, head_val, self.tail.lipschitz(K, np.maximum(n_arr, H + 1))))

    def _head_lipschitz_total(self):
        return math.fsum(abs(r) for _, r in self.head)

    def lipschitz_prefix(self, K, m):
        H = len(self.head)
        _, rate = self._head_arrays()
        head_prefix = np.concatenate([[0.0], np.cumsum(np.abs(rate))])
        mf = _as_float(m)
        m_head = np.minimum(mf, H).astype(np.int64)
        base = float(self.tail.lipschitz_prefix(K, H))
        tail_part = np.asarray(self.tail.lipschitz_prefix(K, np.maximum(mf, H))) - base
        return _scalar(head_prefix[m_head] + np.where(mf > H, tail_part, 0.0))

    def lipschitz_prefix_exp(self, K, log_m):
        H = len(self.head)
        log_m = np.asarray(log_m, dtype=np.float64)
        inside = log_m <= math.log(max(H, 1))
        near = self.lipschitz_prefix(K, np.exp(np.minimum(log_m, math.log(max(H, 1)))))
        base = float(self.tail.lipschitz_prefix(K, H))
        far = self._head_lipschitz_total() + np.asarray(self.tail.lipschitz_prefix_exp(K, log_m)) - base
        return _scalar(np.where(inside, near, far))

    def log_product_growth(self, lam):
        return self.tail.log_product_growth(lam)

    def lipschitz_growth(self, K):
        return self.tail.lipschitz_growth(K)

    def monotonicity(self):
        ok, formula = self.tail.monotonicity()
        head_ok = all(r >= 0 for _, r in self.head)
        return ok and head_ok, f"head rates >= 0: {head_ok}; tail: {formula}"

    def tail_majorant(self, a, nu, p):
        if nu < len(self.head):
            raise ValueError("tail majorant requested inside the tabulated head")
        return self.tail.tail_majorant(a, nu, p)

    def describe(self):
        return f"{len(self.head)} tabulated weights, then {self.tail.describe()}"

    def lipschitz_formula(self):
        return f"|rate_n| for n <= {len(self.head)}, then {self.tail.lipschitz_formula()}"

    def inverse_series_formula(self, a, p):
        return f"finite head times tail series: {self.tail.inverse_series_formula(a, p)}"

    def to_json(self):
        return {
            "kind": self.kind,
            "params": {"head": [list(h) for h in self.head], "tail": self.tail.to_json()},
        }


def family_from_json(data) -> WeightFamily:
    kind = data.get("kind")
    params = data.get("params", {}) or {}
    if kind == "ratio_power":
        return RatioPower()
    if kind == "constant_multiple":
        return ConstantMultiple()
    if kind == "exp":
        return ExpFamily(
            CoefficientSequence.from_json(params["a"]), CoefficientSequence.from_json(params["b"])
        )
    if kind == "tabulated":
        return Tabulated(tuple(tuple(h) for h in params["head"]), family_from_json(params["tail"]))
    raise ValueError(f"unknown family kind {kind!r}")


# -- operations ------------------------------------------------------------


def _check_param(fam, lam):
    if not fam.weight_domain().contains(lam):
        raise ValueError(f"parameter {lam} outside {fam.weight_domain().describe()} for {fam.kind}")


def _check_interval(fam, K):
    if not K.within(fam.weight_domain()):
        raise ValueError(
            f"interval [{K.a}, {K.b}] not inside {fam.weight_domain().describe()} for {fam.kind}"
        )


def weight_at(fam: WeightFamily, n: int, lam: float) -> float:
    if n < 1:
        raise ValueError("weights are indexed from 1")
    _check_param(fam, lam)
    return math.exp(float(fam.log_weight(n, lam)))


def log_weight_product(fam: WeightFamily, lo: int, hi: int, lam: float) -> float:
    """``sum_{i=lo}^{hi} log w_i(lam)``; the empty range ``hi = lo - 1`` gives 0."""
    if lo < 1 or hi < lo - 1:
        raise ValueError(f"bad index range {lo}..{hi}")
    _check_param(fam, lam)
    if hi == lo - 1:
        return 0.0
    return float(fam.log_product(lo, hi, lam))


def shift_power_apply(fam: WeightFamily, lam: float, m: int, x: SparseVector) -> SparseVector:
    """``B^m x``: ``e_nu -> w_{nu-m+1}...w_nu e_{nu-m}`` for ``nu >= m``, else 0."""
    if m < 0:
        raise ValueError("negative power")
    _check_param(fam, lam)
    if m == 0 or x.is_zero():
        return x
    start = int(np.searchsorted(x.indices, m))
    idx = x.indices[start:]
    if idx.size == 0:
        return SparseVector.zero()
    logs = np.asarray(fam.log_product(idx - m + 1, idx, lam), dtype=np.float64)
    return SparseVector.from_arrays(idx - m, x.coefs[start:] * np.exp(logs))


def right_inverse_power_apply(fam: WeightFamily, lam: float, n: int, x: SparseVector) -> SparseVector:
    """``F^n x``: ``e_nu -> e_{nu+n} / (w_{nu+1}...w_{nu+n})``."""
    if n < 0:
        raise ValueError("negative power")
    _check_param(fam, lam)
    if n == 0 or x.is_zero():
        return x
    idx = x.indices
    logs = np.asarray(fam.log_product(idx + 1, idx + n, lam), dtype=np.float64)
    return SparseVector.from_arrays(idx + n, x.coefs * np.exp(-logs))


def lipschitz_constant(fam: WeightFamily, K: CompactInterval, n: int) -> float:
    if n < 1:
        raise ValueError("weights are indexed from 1")
    _check_interval(fam, K)
    return float(fam.lipschitz(K, n))


def lipschitz_sum(fam: WeightFamily, K: CompactInterval, m: int) -> float:
    """``sum_{i=1}^m L_i(K)``."""
    _check_interval(fam, K)
    if m <= 0:
        return 0.0
    return float(fam.lipschitz_prefix(K, m))


def inverse_tail_bound(fam: WeightFamily, a: float, nu: int, s: int, p: float) -> float:
    """Certified upper bound on ``||sum_{n>=s} e_{nu+n} / (w_{nu+1}(a)...w_{nu+n}(a))||_p``.

    Terms ``s <= n <= s + TAIL_WINDOW`` are summed exactly; the remainder is
    bounded by the family's analytic majorant.
    """
    if s < 1:
        raise ValueError("tail start must be >= 1")
    if not p >= 1:
        raise ValueError("p must be >= 1")
    _check_param(fam, a)
    if summable_exp_neg(fam.log_product_growth(a).scale(p)) is False:
        raise NonSummable(
            f"{fam.describe()}: inverse products are not p-summable at lam = {a:g}, p = {p:g}"
        )
    closed = fam.closed_tail(a, nu, s, p)
    if closed is not None:
        return closed
    cut = max(s + TAIL_WINDOW, fam.head_length() - nu)
    n = np.arange(s, cut + 1, dtype=np.float64)
    logq = -np.asarray(fam.log_product(nu + 1, nu + n, a), dtype=np.float64)
    remainder = fam.tail_majorant(a, nu + cut, p)
    # factor out the largest term so the p-th powers neither overflow nor underflow
    logs = np.append(p * logq, p * (logq[-1] + math.log(remainder)) if remainder > 0 else -np.inf)
    top = float(logs.max())
    total = math.fsum(np.exp(logs - top).tolist())
    return math.exp((top + math.log(total)) / p) * (1 + TAIL_SLACK)
