"""Exact coefficient arithmetic for weighted permutation counting.

Weights are sparse polynomials over arbitrary-precision integers, one formal
variable per tracked window pattern.  Counting runs for long series produce
coefficients far beyond 64 bits, so everything here stays in exact integer
(or `fractions.Fraction`) arithmetic; no floats.

A :class:`PatternAssignment` specializes the per-pattern variables: a pattern
is either forbidden (factor 0), unconstrained (factor 1), or tracked by one
of the polynomial variables.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Mapping, Sequence


class WeightPoly:
    """Immutable sparse polynomial with integer coefficients.

    Terms map exponent tuples (length ``nvars``) to nonzero coefficients.
    Arithmetic mixes freely with plain integers, which act as scalars;
    combining two polynomials with different ``nvars`` is an error.
    """

    __slots__ = ("nvars", "_terms")

    def __init__(self, nvars: int, terms: Mapping[tuple, int] | None = None):
        if nvars < 0:
            raise ValueError("nvars must be nonnegative")
        clean = {}
        for exps, coeff in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != nvars:
                raise ValueError(f"exponent vector {exps} has wrong length, expected {nvars}")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            if coeff:
                clean[exps] = coeff
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "_terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("WeightPoly is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "WeightPoly":
        return cls(nvars, {})

    @classmethod
    def const(cls, value: int, nvars: int = 0) -> "WeightPoly":
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, index: int, nvars: int) -> "WeightPoly":
        if not 0 <= index < nvars:
            raise ValueError(f"variable index {index} out of range for {nvars} variables")
        exps = tuple(1 if i == index else 0 for i in range(nvars))
        return cls(nvars, {exps: 1})

    # -- inspection --------------------------------------------------------

    def items(self):
        return self._terms.items()

    def sorted_terms(self):
        """Terms in canonical order: graded lexicographic, largest first."""
        return sorted(self._terms.items(), key=lambda kv: (sum(kv[0]), kv[0]), reverse=True)

    def coefficient(self, exps: Sequence[int]) -> int:
        return self._terms.get(tuple(exps), 0)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def constant_value(self) -> int:
        """The value of a constant polynomial (degree 0 in every variable)."""
        if not self._terms:
            return 0
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return next(iter(self._terms.values()))

    def total_degree(self) -> int:
        if not self._terms:
            return 0
        return max(sum(e) for e in self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, WeightPoly):
            return self.nvars == other.nvars and self._terms == other._terms
        if isinstance(other, int):
            if not self._terms:
                return other == 0
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    __hash__ = None

    # -- ring operations ---------------------------------------------------

    def _coerce(self, other) -> "WeightPoly":
        if isinstance(other, WeightPoly):
            if other.nvars != self.nvars:
                raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")
            return other
        if isinstance(other, int):
            return WeightPoly.const(other, self.nvars)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        terms = dict(self._terms)
        for exps, coeff in other._terms.items():
            new = terms.get(exps, 0) + coeff
            if new:
                terms[exps] = new
            else:
                terms.pop(exps, None)
        return WeightPoly(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return WeightPoly(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 0:
                return WeightPoly.zero(self.nvars)
            return WeightPoly(self.nvars, {e: c * other for e, c in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        terms: dict = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                exps = tuple(a + b for a, b in zip(e1, e2))
                new = terms.get(exps, 0) + c1 * c2
                if new:
                    terms[exps] = new
                else:
                    del terms[exps]
        return WeightPoly(self.nvars, terms)

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = WeightPoly.const(1, self.nvars)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def mul_var(self, index: int, power: int = 1) -> "WeightPoly":
        """Multiply by one variable, i.e. shift its exponent."""
        if not 0 <= index < self.nvars:
            raise ValueError(f"variable index {index} out of range")
        terms = {}
        for exps, coeff in self._terms.items():
            shifted = list(exps)
            shifted[index] += power
            terms[tuple(shifted)] = coeff
        return WeightPoly(self.nvars, terms)

    # -- evaluation and display --------------------------------------------

    def evaluate(self, point: Sequence):
        """Exact evaluation at a point of integers or Fractions."""
        if len(point) != self.nvars:
            raise ValueError(f"point has length {len(point)}, expected {self.nvars}")
        total = 0
        for exps, coeff in self._terms.items():
            term = coeff
            for x, e in zip(point, exps):
                if e:
                    term *= x ** e
            total += term
        return total

    def map_coefficients(self, fn) -> "WeightPoly":
        return WeightPoly(self.nvars, {e: fn(c) for e, c in self._terms.items()})

    def canonical_text(self, names: Sequence[str] | None = None) -> str:
        """Canonical text form, e.g. ``t^2 - 2*t + 1``.

        Terms are sorted in graded lexicographic order, highest first.  With
        one variable the default name is ``t``, otherwise ``t0, t1, ...``.
        """
        if not self._terms:
            return "0"
        if names is None:
            names = ["t"] if self.nvars == 1 else [f"t{i}" for i in range(self.nvars)]
        pieces = []
        for exps, coeff in self.sorted_terms():
            var_part = "*".join(
                name if e == 1 else f"{name}^{e}"
                for name, e in zip(names, exps)
                if e
            )
            mag = abs(coeff)
            if not var_part:
                body = str(mag)
            elif mag == 1:
                body = var_part
            else:
                body = f"{mag}*{var_part}"
            pieces.append(("-" if coeff < 0 else "+", body))
        sign, first = pieces[0]
        parts = [first if sign == "+" else "-" + first]
        for sign, body in pieces[1:]:
            parts.append(f" {sign} {body}")
        return "".join(parts)

    def __str__(self) -> str:
        return self.canonical_text()

    def __repr__(self) -> str:
        return f"WeightPoly({self.nvars}, {self.canonical_text()!r})"


def as_weight_poly(value, nvars: int) -> WeightPoly:
    """Wrap a plain integer as a constant polynomial; pass polynomials through."""
    if isinstance(value, WeightPoly):
        if value.nvars != nvars:
            raise ValueError(f"variable count mismatch: {value.nvars} vs {nvars}")
        return value
    return WeightPoly.const(value, nvars)


def compose_shift(poly: WeightPoly, offset: int) -> WeightPoly:
    """For a univariate polynomial p(x), return p(x + offset), exactly.

    Horner evaluation in the polynomial ring; used to move between the
    natural cluster basis u = t - 1 and the plain t basis.
    """
    if poly.nvars != 1:
        raise ValueError("compose_shift needs a univariate polynomial")
    coeffs = {e[0]: c for e, c in poly.items()}
    if not coeffs:
        return poly
    x_plus = WeightPoly(1, {(1,): 1, (0,): offset})
    result = WeightPoly.zero(1)
    for d in range(max(coeffs), -1, -1):
        result = result * x_plus + coeffs.get(d, 0)
    return result


def _iter_patterns(k: int):
    return itertools.permutations(range(1, k + 1))


class PatternAssignment:
    """Total map from the length-k window patterns to weight factors.

    Every pattern of length k gets exactly one factor: 0 (the pattern is
    forbidden), 1 (ignored), or one tracked variable.  Tracked variables are
    indexed contiguously in the order the tracked patterns are listed.
    """

    def __init__(self, k: int, zero: Iterable = (), tracked: Sequence = ()):
        if k < 2:
            raise ValueError("window length must be at least 2")
        self.k = k
        self.zero = frozenset(tuple(p) for p in zero)
        self.tracked = tuple(tuple(p) for p in tracked)
        for p in itertools.chain(self.zero, self.tracked):
            if len(p) != k or sorted(p) != list(range(1, k + 1)):
                raise ValueError(f"{p} is not a pattern of length {k}")
        if len(set(self.tracked)) != len(self.tracked):
            raise ValueError("duplicate tracked pattern")
        if self.zero & set(self.tracked):
            raise ValueError("a pattern cannot be both forbidden and tracked")
        self.nvars = len(self.tracked)
        self._vars = {p: WeightPoly.variable(i, self.nvars) for i, p in enumerate(self.tracked)}

    @classmethod
    def all_one(cls, k: int) -> "PatternAssignment":
        return cls(k)

    @classmethod
    def avoiding(cls, patterns: Iterable) -> "PatternAssignment":
        patterns = [tuple(p) for p in patterns]
        if not patterns:
            raise ValueError("avoiding() needs at least one pattern")
        return cls(len(patterns[0]), zero=patterns)

    @classmethod
    def tracking(cls, patterns: Sequence, zero: Iterable = ()) -> "PatternAssignment":
        patterns = [tuple(p) for p in patterns]
        if not patterns:
            raise ValueError("tracking() needs at least one pattern")
        return cls(len(patterns[0]), zero=zero, tracked=patterns)

    def factor(self, pattern: tuple):
        """The weight factor gained when a window forms this pattern."""
        if pattern in self.zero:
            return 0
        poly = self._vars.get(pattern)
        return 1 if poly is None else poly

    def suffix_factor(self, suffix: tuple):
        """Factor from sub-windows of a retained suffix; 1 for plain assignments.

        Hook for assignments lifted from shorter patterns, where occurrences
        shorter than k can end inside the last k-1 entries.
        """
        return 1

    def apply(self, pattern: tuple, weight):
        """Multiply a weight by the factor of one pattern."""
        f = self.factor(pattern)
        if f == 1:
            return weight
        return weight * f

    def items(self):
        """All (pattern, factor) pairs over the length-k patterns."""
        for p in _iter_patterns(self.k):
            yield p, self.factor(p)

    def evaluation_point(self, value) -> list:
        return [value] * self.nvars


def term_text(weight) -> str:
    """Canonical display of a series term, integer or polynomial."""
    if isinstance(weight, WeightPoly):
        if weight.is_constant():
            return str(weight.constant_value())
        return weight.canonical_text()
    return str(weight)
