"""Finitely supported vectors over the canonical basis of l^p, and their metrics."""

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

EQ_TOL = 1e-12


def _readonly(a):
    a.flags.writeable = False
    return a


class SparseVector:
    """A finitely supported vector ``sum c_nu e_nu``.

    Indices are stored strictly increasing with no zero coefficients. Use
    :meth:`from_pairs` or :meth:`from_arrays` to build one from unsorted or
    duplicated data; the plain constructor expects canonical input and checks
    it.
    """

    __slots__ = ("indices", "coefs")

    def __init__(self, indices=(), coefs=()):
        idx = np.asarray(indices, dtype=np.int64).reshape(-1)
        val = np.asarray(coefs, dtype=np.float64).reshape(-1)
        if idx.shape != val.shape:
            raise ValueError("indices and coefficients differ in length")
        if idx.size:
            if idx[0] < 0:
                raise ValueError("negative basis index")
            if np.any(np.diff(idx) <= 0):
                raise ValueError("indices must be strictly increasing")
            if np.any(val == 0):
                raise ValueError("zero coefficients must not be stored")
            if not np.all(np.isfinite(val)):
                raise ValueError("non-finite coefficient")
        object.__setattr__(self, "indices", _readonly(idx.copy()))
        object.__setattr__(self, "coefs", _readonly(val.copy()))

    def __setattr__(self, name, value):
        raise AttributeError("SparseVector is immutable")

    @classmethod
    def _trusted(cls, idx, val):
        obj = cls.__new__(cls)
        object.__setattr__(obj, "indices", _readonly(idx))
        object.__setattr__(obj, "coefs", _readonly(val))
        return obj

    @classmethod
    def from_arrays(cls, indices, coefs):
        """Sort, merge duplicate indices by summation and drop zeros."""
        idx = np.asarray(indices, dtype=np.int64).reshape(-1)
        val = np.asarray(coefs, dtype=np.float64).reshape(-1)
        if idx.size and idx.min() < 0:
            raise ValueError("negative basis index")
        if idx.size and np.all(np.diff(idx) > 0):
            keep = val != 0
            return cls._trusted(idx[keep].copy(), val[keep].copy())
        uniq, inv = np.unique(idx, return_inverse=True)
        merged = np.zeros(uniq.shape, dtype=np.float64)
        np.add.at(merged, inv, val)
        keep = merged != 0
        return cls._trusted(uniq[keep], merged[keep])

    @classmethod
    def from_pairs(cls, pairs):
        pairs = list(pairs)
        if not pairs:
            return cls.zero()
        idx, val = zip(*pairs)
        return cls.from_arrays(idx, val)

    @classmethod
    def zero(cls):
        return cls._trusted(np.zeros(0, np.int64), np.zeros(0, np.float64))

    @classmethod
    def basis(cls, index, coef=1.0):
        return cls.from_arrays([index], [coef])

    # JSON: array of [index, coefficient] pairs, indices ascending
    def to_json(self):
        return [[int(i), float(c)] for i, c in zip(self.indices, self.coefs)]

    @classmethod
    def from_json(cls, data):
        for item in data:
            if len(item) != 2:
                raise ValueError(f"expected [index, coefficient], got {item!r}")
        return cls.from_pairs((int(i), float(c)) for i, c in data)

    def __len__(self):
        return int(self.indices.size)

    def is_zero(self):
        return self.indices.size == 0

    @property
    def max_index(self):
        """Largest support index, ``-1`` for the zero vector."""
        return int(self.indices[-1]) if self.indices.size else -1

    def pairs(self):
        return list(zip(self.indices.tolist(), self.coefs.tolist()))

    def coefficient(self, index):
        pos = np.searchsorted(self.indices, index)
        if pos < self.indices.size and self.indices[pos] == index:
            return float(self.coefs[pos])
        return 0.0

    def scale(self, c):
        if c == 0:
            return SparseVector.zero()
        return SparseVector.from_arrays(self.indices, self.coefs * c)

    def __add__(self, other):
        return add_scaled(self, 1.0, other)

    def __sub__(self, other):
        return add_scaled(self, -1.0, other)

    def __neg__(self):
        return self.scale(-1.0)

    def __mul__(self, c):
        return self.scale(float(c))

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, SparseVector):
            return NotImplemented
        return bool(
            np.array_equal(self.indices, other.indices)
            and np.all(np.abs(self.coefs - other.coefs) <= EQ_TOL)
        )

    __hash__ = None

    def __repr__(self):
        if len(self) > 8:
            head = ", ".join(f"{i}: {c:.6g}" for i, c in self.pairs()[:8])
            return f"SparseVector({{{head}, ...}} support={len(self)})"
        return "SparseVector({" + ", ".join(f"{i}: {c:.6g}" for i, c in self.pairs()) + "})"


def add_scaled(x: SparseVector, c: float, y: SparseVector) -> SparseVector:
    """``x + c*y`` with merged indices and exact zeros dropped."""
    if c == 0 or y.is_zero():
        return x
    if x.is_zero():
        return y.scale(c)
    return SparseVector.from_arrays(
        np.concatenate([x.indices, y.indices]),
        np.concatenate([x.coefs, c * y.coefs]),
    )


# -- metrics ---------------------------------------------------------------


def _lp_of_values(values, p):
    a = np.abs(np.asarray(values, dtype=np.float64))
    if a.size == 0:
        return 0.0
    m = float(a.max())
    if m == 0.0:
        return 0.0
    if p == 1:
        return math.fsum(a.tolist())
    # scale by the max entry so large or tiny coefficients neither overflow
    # nor underflow when raised to the p-th power
    s = math.fsum(((a / m) ** p).tolist())
    return m * s ** (1.0 / p)


def p_norm(x: SparseVector, p: float) -> float:
    if not p >= 1:
        raise ValueError(f"p must be >= 1, got {p}")
    return _lp_of_values(x.coefs, p)


@dataclass(frozen=True)
class LpNorm:
    p: float = 2.0

    def __post_init__(self):
        if not self.p >= 1:
            raise ValueError(f"p must be >= 1, got {self.p}")

    def to_json(self):
        return {"kind": "lp", "p": self.p}


@dataclass(frozen=True)
class Seminorm:
    """``(sum_{nu <= upto} |x_nu|^exponent)^(1/exponent)``; ``upto=None`` means all indices."""

    exponent: float = 2.0
    upto: Optional[int] = None

    def __post_init__(self):
        if not self.exponent >= 1:
            raise ValueError("seminorm exponent must be >= 1")
        if self.upto is not None and self.upto < 0:
            raise ValueError("seminorm cut-off must be nonnegative")

    def of_arrays(self, indices, values):
        if self.upto is not None:
            values = np.asarray(values)[np.asarray(indices) <= self.upto]
        return _lp_of_values(values, self.exponent)


@dataclass(frozen=True)
class FNormLadder:
    """Seminorms p_1, ..., p_K; p_K is repeated for every k > K."""

    seminorms: tuple

    def __post_init__(self):
        object.__setattr__(self, "seminorms", tuple(self.seminorms))
        if not self.seminorms:
            raise ValueError("an F-norm ladder needs at least one seminorm")
        cuts = [math.inf if s.upto is None else s.upto for s in self.seminorms]
        if cuts != sorted(cuts):
            raise ValueError("seminorm cut-offs must be nondecreasing")
        if self.seminorms[-1].upto is not None:
            raise ValueError("the last seminorm must see every index (separation)")

    @classmethod
    def uniform(cls, p=2.0, depth=1):
        return cls(tuple(Seminorm(p) for _ in range(depth)))

    def to_json(self):
        return {
            "kind": "fnorm",
            "seminorms": [{"exponent": s.exponent, "upto": s.upto} for s in self.seminorms],
        }


SpaceMetric = Union[LpNorm, FNormLadder]


def metric_from_json(data) -> SpaceMetric:
    kind = data.get("kind")
    if kind == "lp":
        return LpNorm(float(data.get("p", 2.0)))
    if kind == "fnorm":
        return FNormLadder(
            tuple(Seminorm(float(s.get("exponent", 2.0)), s.get("upto")) for s in data["seminorms"])
        )
    raise ValueError(f"unknown metric kind {kind!r}")


def _f_norm_of_arrays(indices, values, ladder):
    K = len(ladder.seminorms)
    terms = []
    last = 0.0
    for k, sn in enumerate(ladder.seminorms, start=1):
        last = min(1.0, sn.of_arrays(indices, values))
        terms.append(math.ldexp(last, -k))
    # sum_{k > K} 2^-k min(1, p_K) = 2^-K min(1, p_K)
    terms.append(math.ldexp(last, -K))
    return math.fsum(terms)


def f_norm(x: SparseVector, ladder: FNormLadder) -> float:
    return _f_norm_of_arrays(x.indices, x.coefs, ladder)


def norm_of_arrays(indices, values, metric: SpaceMetric) -> float:
    if isinstance(metric, LpNorm):
        return _lp_of_values(values, metric.p)
    return _f_norm_of_arrays(indices, values, metric)


def norm(x: SparseVector, metric: SpaceMetric) -> float:
    return norm_of_arrays(x.indices, x.coefs, metric)


def distance(x: SparseVector, y: SparseVector, metric: SpaceMetric) -> float:
    return norm(x - y, metric)


def metric_bounded_by_lp(metric: SpaceMetric, p: float) -> bool:
    """True when ``norm(x, metric) <= ||x||_p`` for every x.

    Holds for the l^p norm itself and for ladders whose seminorms are
    truncated l^q norms with q >= p.
    """
    if isinstance(metric, LpNorm):
        return metric.p == p
    return all(s.exponent >= p for s in metric.seminorms)


@dataclass(frozen=True)
class OpenBall:
    center: SparseVector
    radius: float
    metric: SpaceMetric = LpNorm(2.0)

    def __post_init__(self):
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ValueError(f"ball radius must be positive and finite, got {self.radius}")

    def to_json(self):
        return {"center": self.center.to_json(), "radius": self.radius}


def in_ball(x: SparseVector, ball: OpenBall) -> bool:
    return distance(x, ball.center, ball.metric) < ball.radius
