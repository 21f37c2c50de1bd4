"""Asymptotic growth classes of partial sums and closed-form convergence tests.

A :class:`Growth` records the leading behaviour of a sequence ``G(n)`` as
``n -> oo`` as a finite combination of basis functions

    exp(e * n) * n**d * log(n)**k      keyed by (e, d, k)

Only the ordering of keys and the sign/size of their coefficients matter:
bounded contributions are dropped. The tests below decide convergence of
``sum exp(-G(n))`` and of ``sum 1 / G(s**t)`` from the leading key alone,
which is what the weight families need.
"""

from dataclasses import dataclass, field
from typing import Optional


def exp_key(rate):
    return (float(rate), 0.0, 0)


def poly_key(deg):
    return (0.0, float(deg), 0)


N_LOG_N = (0.0, 1.0, 1)
LOG_N = (0.0, 0.0, 1)

_CANCEL_TOL = 1e-12


@dataclass(frozen=True)
class Growth:
    terms: dict = field(default_factory=dict)
    ambiguous: frozenset = frozenset()

    @classmethod
    def single(cls, key, coef):
        if coef == 0:
            return cls()
        return cls({key: float(coef)})

    def scale(self, c):
        if c == 0:
            return Growth()
        return Growth({k: v * c for k, v in self.terms.items()}, self.ambiguous)

    def __add__(self, other):
        terms = dict(self.terms)
        ambiguous = set(self.ambiguous | other.ambiguous)
        for k, v in other.terms.items():
            if k not in terms:
                terms[k] = v
                continue
            u = terms[k]
            s = u + v
            # an exact-looking cancellation of two nonzero rates cannot be
            # told apart from a tiny residual rate
            if u != 0 and v != 0 and abs(s) <= _CANCEL_TOL * max(abs(u), abs(v)):
                ambiguous.add(k)
                s = 0.0
            terms[k] = s
        return Growth(terms, frozenset(ambiguous))

    def leading(self):
        """Return ``(key, coef)`` of the dominant term, ``None`` if bounded.

        Raises ``ValueError`` when the dominant candidate is an ambiguous
        cancellation.
        """
        for key in sorted(set(self.terms) | set(self.ambiguous), reverse=True):
            if key in self.ambiguous:
                raise ValueError(f"leading rate {key} cancels to within rounding")
            if self.terms[key] != 0:
                return key, self.terms[key]
        return None

    def describe(self):
        if not self.terms:
            return "bounded"
        parts = []
        for (e, d, k), c in sorted(self.terms.items(), reverse=True):
            if c == 0:
                continue
            basis = []
            if e:
                basis.append(f"exp({e:g} n)")
            if d:
                basis.append("n" if d == 1 else f"n^{d:g}")
            if k:
                basis.append("log n" if k == 1 else f"(log n)^{k}")
            parts.append(f"{c:.6g}*" + "*".join(basis) if basis else f"{c:.6g}")
        return " + ".join(parts) if parts else "bounded"


def summable_exp_neg(growth: Growth) -> Optional[bool]:
    """Does ``sum_n exp(-G(n))`` converge?  ``None`` when undecidable here."""
    try:
        lead = growth.leading()
    except ValueError:
        return None
    if lead is None:
        # terms stay bounded away from 0
        return False
    (e, d, k), c = lead
    if e > 0 or d > 0:
        return c > 0
    if k == 1:
        # sum n^{-c}
        if c == 1:
            return False
        if abs(c - 1) <= _CANCEL_TOL:
            return None
        return c > 1
    return None


def reciprocal_at_powers_diverges(growth: Growth) -> Optional[bool]:
    """Does ``sum_t 1 / S(s**t)`` diverge for every integer ``s >= 2``?

    ``growth`` describes the nondecreasing partial sums ``S(m)``.
    """
    try:
        lead = growth.leading()
    except ValueError:
        return None
    if lead is None:
        return True
    (e, d, k), c = lead
    if c < 0:
        return None
    if e > 0 or d > 0:
        # S(s^t) grows at least geometrically in t
        return False
    if k == 1:
        # S(s^t) ~ c * t * log s: harmonic
        return True
    return None
