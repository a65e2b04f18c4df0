"""Exact truncated multivariate Laurent series.

The first variable (``t``) is graded: terms with t-degree above ``order`` are
dropped. The remaining variables are Laurent variables; optionally their
degrees are windowed to ``|deg| <= t_degree + slack``.

Coefficients are Python ints or ``fractions.Fraction`` and never floats.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence

from .errors import NonInvertible, NonTerminating, OrderTooHigh

VARIABLES = ("t", "y", "z")
E6_MAX_ORDER = 8


def _normalize(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


class TruncatedSeries:
    __slots__ = ("variables", "order", "slack", "_coeffs")

    def __init__(self, coeffs: Mapping[tuple, Rational], order: int,
                 variables: Sequence[str] = VARIABLES, slack: int | None = None):
        self.variables = tuple(variables)
        self.order = int(order)
        self.slack = slack
        nvar = len(self.variables)
        clean = {}
        for exps, c in coeffs.items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvar:
                raise ValueError(f"exponent {exps} does not match variables {self.variables}")
            if isinstance(c, float):
                raise TypeError("coefficients must be exact rationals")
            if c == 0 or not self._keeps(exps):
                continue
            clean[exps] = clean.get(exps, 0) + _normalize(c)
        self._coeffs = {e: c for e, c in clean.items() if c != 0}

    def _keeps(self, exps) -> bool:
        if exps[0] < 0:
            raise ValueError("negative t-degree")
        if exps[0] > self.order:
            return False
        if self.slack is not None:
            bound = exps[0] + self.slack
            return all(abs(e) <= bound for e in exps[1:])
        return True

    # construction -------------------------------------------------------

    @classmethod
    def constant(cls, c, order, variables=VARIABLES, slack=None):
        return cls({(0,) * len(variables): c}, order, variables, slack)

    @classmethod
    def monomial(cls, exps, order, coeff=1, variables=VARIABLES, slack=None):
        return cls({tuple(exps): coeff}, order, variables, slack)

    def _like(self, coeffs, order=None):
        return TruncatedSeries(coeffs, self.order if order is None else order,
                               self.variables, self.slack)

    # access ---------------------------------------------------------------

    @property
    def coefficients(self) -> dict:
        return dict(self._coeffs)

    def __getitem__(self, exps) -> Rational:
        return self._coeffs.get(tuple(exps), 0)

    def __len__(self):
        return len(self._coeffs)

    def terms(self):
        """Terms in canonical order: t-degree, then the remaining degrees."""
        return sorted(self._coeffs.items())

    def __eq__(self, other):
        if isinstance(other, TruncatedSeries):
            return (self.variables == other.variables and self.order == other.order
                    and self._coeffs == other._coeffs)
        if isinstance(other, (int, Fraction)):
            return self == self.constant(other, self.order, self.variables)
        return NotImplemented

    def __hash__(self):
        return hash((self.variables, self.order, frozenset(self._coeffs.items())))

    def __repr__(self):
        return f"TruncatedSeries({self.to_text()}, order={self.order})"

    def to_text(self) -> str:
        if not self._coeffs:
            return "0"
        parts = []
        for exps, c in self.terms():
            mono = "*".join(
                v if e == 1 else f"{v}^{e}" for v, e in zip(self.variables, exps) if e
            )
            coef = str(c)
            if mono:
                coef = "" if c == 1 else "-" if c == -1 else f"({coef})*" if "/" in coef else f"{coef}*"
                parts.append(f"{coef}{mono}")
            else:
                parts.append(coef)
        return " + ".join(parts).replace("+ -", "- ")

    # arithmetic ---------------------------------------------------------

    def _check(self, other):
        if self.variables != other.variables:
            raise ValueError(f"variable mismatch {self.variables} vs {other.variables}")

    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            other = self.constant(other, self.order, self.variables)
        self._check(other)
        out = dict(self._coeffs)
        for e, c in other._coeffs.items():
            out[e] = out.get(e, 0) + c
        return self._like(out, min(self.order, other.order))

    __radd__ = __add__

    def __neg__(self):
        return self._like({e: -c for e, c in self._coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self._like({e: c * other for e, c in self._coeffs.items()})
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        self._check(other)
        order = min(self.order, other.order)
        left = sorted(self._coeffs.items())
        right = sorted(other._coeffs.items())
        out: dict = {}
        for ea, ca in left:
            room = order - ea[0]
            if room < 0:
                break
            for eb, cb in right:
                if eb[0] > room:
                    break
                key = tuple(x + y for x, y in zip(ea, eb))
                out[key] = out.get(key, 0) + ca * cb
        return self._like(out, order)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.constant(1, self.order, self.variables, self.slack)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> "TruncatedSeries":
        """Multiplicative inverse modulo t^(order+1)."""
        zero = (0,) * len(self.variables)
        head = {e: c for e, c in self._coeffs.items() if e[0] == 0}
        if set(head) != {zero}:
            raise NonInvertible(
                "t-degree-0 part must be a nonzero constant, got "
                + self._like(head).to_text()
            )
        c0 = Fraction(head[zero])
        rest = self._like({e: -c / c0 for e, c in self._coeffs.items() if e[0] > 0})
        # 1/(c0 (1 - rest)) = (1/c0) * sum_k rest^k, rest has t-degree >= 1
        acc = self.constant(1, self.order, self.variables, self.slack)
        power = acc
        for _ in range(self.order):
            power = power * rest
            if not power._coeffs:
                break
            acc = acc + power
        return acc * (1 / c0)

    # evaluation -----------------------------------------------------------

    def constant_term_in(self, variable: str) -> "TruncatedSeries":
        """Coefficient of variable^0, i.e. the contour integral dz/(2 pi i z) over |z|=1."""
        k = self.variables.index(variable)
        kept = {e[:k] + e[k + 1:]: c for e, c in self._coeffs.items() if e[k] == 0}
        variables = self.variables[:k] + self.variables[k + 1:]
        return TruncatedSeries(kept, self.order, variables, self.slack)

    def evaluate(self, **values):
        total = 0
        for exps, c in self._coeffs.items():
            term = c
            for v, e in zip(self.variables, exps):
                if e:
                    term = term * values[v] ** e
            total = total + term
        return total

    def truncate(self, order: int) -> "TruncatedSeries":
        return self._like(dict(self._coeffs), min(order, self.order))

    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self._coeffs.values())

    def to_records(self) -> list[dict]:
        """Records {t_degree, y_degree, ..., numerator, denominator}; exact as strings."""
        out = []
        for exps, c in self.terms():
            c = Fraction(c)
            rec = {f"{v}_degree": e for v, e in zip(self.variables, exps)}
            rec["numerator"] = str(c.numerator)
            rec["denominator"] = str(c.denominator)
            out.append(rec)
        return out


def series_add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a + b


def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a * b


def series_inverse(a: TruncatedSeries) -> TruncatedSeries:
    return a.inverse()


def constant_term_in(series: TruncatedSeries, variable: str) -> TruncatedSeries:
    return series.constant_term_in(variable)


def _mono_mul(a: Iterable[int], b: Iterable[int], k: int = 1) -> tuple:
    return tuple(x + k * y for x, y in zip(a, b))


def pochhammer_series(arg_exponents, base_exponents, order: int,
                      variables: Sequence[str] = VARIABLES,
                      slack: int | None = None) -> TruncatedSeries:
    """prod_{i>=0} (1 - arg * base^i) for monomials arg, base, to t-degree ``order``."""
    arg = tuple(arg_exponents)
    base = tuple(base_exponents)
    if base[0] <= 0:
        raise NonTerminating(f"base monomial {base} has no positive t-degree")
    if arg[0] < 0:
        raise ValueError(f"argument monomial {arg} has negative t-degree")
    one = (0,) * len(variables)
    result = TruncatedSeries.constant(1, order, variables, slack)
    mono = arg
    while mono[0] <= order:
        factor = TruncatedSeries({one: 1, mono: -1}, order, variables, slack)
        result = result * factor
        mono = _mono_mul(mono, base)
    return result


def double_pochhammer_series(arg_exponents, base1, base2, order: int,
                             variables: Sequence[str] = VARIABLES,
                             slack: int | None = None) -> TruncatedSeries:
    """prod_{i,j>=0} (1 - arg * base1^i * base2^j)."""
    if base1[0] <= 0:
        raise NonTerminating(f"base monomial {tuple(base1)} has no positive t-degree")
    result = TruncatedSeries.constant(1, order, variables, slack)
    mono = tuple(arg_exponents)
    while mono[0] <= order:
        result = result * pochhammer_series(mono, base2, order, variables, slack)
        mono = _mono_mul(mono, base1)
    return result


def elliptic_gamma_series(arg_exponents, p, q, order: int,
                          variables: Sequence[str] = VARIABLES,
                          slack: int | None = None) -> TruncatedSeries:
    """Gamma(arg; p, q) = (pq/arg; p, q) / (arg; p, q) as a truncated series."""
    arg = tuple(arg_exponents)
    pq_over = tuple(a + b - c for a, b, c in zip(p, q, arg))
    num = double_pochhammer_series(pq_over, p, q, order, variables, slack)
    den = double_pochhammer_series(arg, p, q, order, variables, slack)
    return num * den.inverse()


def reciprocal_elliptic_gamma_series(arg_exponents, p, q, order: int,
                                     variables: Sequence[str] = VARIABLES,
                                     slack: int | None = None) -> TruncatedSeries:
    """1/Gamma(arg; p, q); admits arguments of t-degree 0 such as z^2."""
    arg = tuple(arg_exponents)
    pq_over = tuple(a + b - c for a, b, c in zip(p, q, arg))
    num = double_pochhammer_series(arg, p, q, order, variables, slack)
    den = double_pochhammer_series(pq_over, p, q, order, variables, slack)
    return num * den.inverse()


def expand_e6(order: int, max_order: int = E6_MAX_ORDER, slack: int | None = 2) -> TruncatedSeries:
    """Expansion in (t, y) of the 4d index coupled to the 5d hypermultiplet.

    Flavor fugacities are set to 1 and p = t^3 y, q = t^3 / y, so that
    (pq)^(1/6) = t. The contour integral is taken as the z^0 coefficient.
    """
    if order < 0:
        raise ValueError("order must be non-negative")
    if order > max_order:
        raise OrderTooHigh(f"order {order} exceeds configured maximum {max_order}")
    tyz = VARIABLES
    p, q = (3, 1, 0), (3, -1, 0)

    gammas = (elliptic_gamma_series((1, 0, 1), p, q, order, tyz, slack)
              * elliptic_gamma_series((1, 0, -1), p, q, order, tyz, slack))
    measure = (reciprocal_elliptic_gamma_series((0, 0, 2), p, q, order, tyz, slack)
               * reciprocal_elliptic_gamma_series((0, 0, -2), p, q, order, tyz, slack))
    integral = (gammas ** 6 * measure).constant_term_in("z")

    ty = ("t", "y")
    p2, q2 = (3, 1), (3, -1)
    # hypermultiplet: 15 factors 1/((pq)^{2/3}; p, q) and 12 factors 1/((pq)^{1/3}; p, q)
    hyper = (double_pochhammer_series((4, 0), p2, q2, order, ty) ** 15
             * double_pochhammer_series((2, 0), p2, q2, order, ty) ** 12).inverse()
    vector = (pochhammer_series(p2, p2, order, ty) * pochhammer_series(q2, q2, order, ty))
    return hyper * vector * integral * Fraction(1, 2)
