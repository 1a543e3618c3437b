"""Cluster-weighted counting: the inclusion-exclusion route to avoidance.

Expanding t^(number of occurrences) via t = (t-1)+1 turns the occurrence
enumerator P_n(t) into a sum over permutations with a marked subset of
occurrences, weighted (t-1) per mark.  Chopping the maximal overlapping
suffix chain of marks (the ending cluster) gives the recurrence

    P_n(t) = n*P_{n-1}(t) + sum_r C(n, r) * P_{n-r}(t) * C_r(t),

so everything reduces to C_n(t), the weight enumerator of clusters: chains
of pairwise-overlapping occurrences covering 1..n.

Clusters grow Markovianly: admissible overlaps depend only on the sorted
values of the last atom.  The table DP here tracks exactly that state, with
weights kept in the shifted variable u = t - 1 (each atom contributes one
factor u); conversion to t happens only on output.  Weights may also be
plain integers when u is specialized up front, which is how deep series are
computed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import IO, Iterator, Sequence

from .permcore import (
    format_pattern,
    is_permutation,
    occurrences,
    reduction,
    symmetry_class,
)
from .weightring import WeightPoly, compose_shift

CTABLE_HEADER = "CWILF-CTABLE v1"


def _check_pattern(p: Sequence[int]) -> tuple[int, ...]:
    p = tuple(p)
    if len(p) < 2 or not is_permutation(p):
        raise ValueError(f"invalid pattern {p}")
    return p


@lru_cache(maxsize=None)
def _overlap_set(p: tuple[int, ...]) -> tuple[int, ...]:
    k = len(p)
    return tuple(
        m for m in range(1, k)
        if reduction(p[k - m:]) == reduction(p[:m])
    )


def overlap_set(p: Sequence[int]) -> tuple[int, ...]:
    """Overlap amounts m where the length-m suffix and prefix of p agree.

    Two consecutive atoms of a cluster can share exactly m entries only for
    m in this set.  m = 1 always qualifies.
    """
    return _overlap_set(_check_pattern(p))


@lru_cache(maxsize=None)
def _extension_slots(p: tuple[int, ...], m: int):
    """How a new atom's sorted values relate to the previous atom's.

    Returns (fixed, free): fixed lists (slot, source, bump) meaning the new
    atom's slot-th smallest value equals the old atom's source-th smallest
    plus bump, where bump counts the new values inserted below it.  free
    lists the slots filled by brand-new values.
    """
    k = len(p)
    shared = [p[l] for l in range(m)]
    free = tuple(sorted(set(range(1, k + 1)) - set(shared)))
    fixed = []
    for l in range(m):
        slot = p[l]
        source = p[k - m + l]
        bump = sum(1 for b in free if b < slot)
        fixed.append((slot, source, bump))
    return tuple(fixed), free


def _completions(fixed_vals: dict[int, int], k: int, max_val: int) -> Iterator[tuple[int, ...]]:
    """All strictly increasing k-tuples in [1, max_val] extending fixed_vals."""
    next_fixed = [None] * (k + 2)
    upcoming = None
    for pos in range(k, 0, -1):
        next_fixed[pos] = upcoming
        if pos in fixed_vals:
            upcoming = pos
    acc: list[int] = []

    def rec(pos: int, prev: int):
        if pos > k:
            yield tuple(acc)
            return
        fixed = fixed_vals.get(pos)
        if fixed is not None:
            if fixed <= prev or fixed > max_val:
                return
            acc.append(fixed)
            yield from rec(pos + 1, fixed)
            acc.pop()
            return
        hi = max_val - (k - pos)
        nf = next_fixed[pos]
        if nf is not None:
            hi = min(hi, fixed_vals[nf] - (nf - pos))
        for v in range(prev + 1, hi + 1):
            acc.append(v)
            yield from rec(pos + 1, v)
            acc.pop()

    yield from rec(1, 0)


def extend_cluster(state: Sequence[int], n: int, m: int,
                   p: Sequence[int]) -> list[tuple[int, ...]]:
    """All last-atom value tuples reachable by attaching one atom.

    The new atom shares its first m positions with the old atom's last m;
    its remaining values may sit anywhere that keeps the new window an
    occurrence.  Each returned tuple is one cluster extension.
    """
    p = _check_pattern(p)
    k = len(p)
    if m not in overlap_set(p):
        raise ValueError(f"overlap {m} is not admissible for {format_pattern(p)}")
    state = tuple(state)
    if len(state) != k or any(state[i] >= state[i + 1] for i in range(k - 1)) \
            or state[0] < 1 or state[-1] > n:
        raise ValueError(f"invalid cluster state {state} at length {n}")
    target_n = n + k - m
    fixed, _free = _extension_slots(p, m)
    fixed_vals = {slot: state[src - 1] + bump for slot, src, bump in fixed}
    return list(_completions(fixed_vals, k, target_n))


def cluster_tables(p: Sequence[int], N: int, u,
                   aggregated: bool = True) -> Iterator[tuple[int, dict]]:
    """Yield (n, table) for n = k..N; tables map last-atom values to weights.

    Pull-style: each length collects from its up-to-(k-1) predecessor
    lengths, one per admissible overlap, and older tables are discarded.
    The aggregated variant first marginalizes each source table over the
    coordinates the extension does not constrain, so shared completions are
    enumerated once instead of once per source state.
    """
    p = _check_pattern(p)
    k = len(p)
    overlaps = overlap_set(p)
    recent: dict[int, dict] = {}
    for n in range(k, N + 1):
        if n == k:
            table: dict = {tuple(range(1, k + 1)): u}
        else:
            table = {}
            for m in overlaps:
                src_n = n - (k - m)
                src = recent.get(src_n)
                if not src:
                    continue
                fixed, _free = _extension_slots(p, m)
                if aggregated:
                    sources = tuple(s for _slot, s, _b in fixed)
                    marg: dict = {}
                    for state, w in src.items():
                        key = tuple(state[s - 1] for s in sources)
                        prev = marg.get(key)
                        marg[key] = w if prev is None else prev + w
                    pulls = (
                        ({slot: key[i] + bump for i, (slot, _s, bump) in enumerate(fixed)}, w)
                        for key, w in marg.items()
                    )
                else:
                    pulls = (
                        ({slot: state[s - 1] + bump for slot, s, bump in fixed}, w)
                        for state, w in src.items()
                    )
                for fixed_vals, w in pulls:
                    contrib = w * u
                    for new_state in _completions(fixed_vals, k, n):
                        prev = table.get(new_state)
                        table[new_state] = contrib if prev is None else prev + contrib
        recent[n] = table
        recent.pop(n - k + 1, None)
        yield n, table


def cluster_polys_shifted(p: Sequence[int], N: int,
                          aggregated: bool = True) -> list[WeightPoly]:
    """C_0..C_N as polynomials in the shifted variable u = t - 1."""
    out = [WeightPoly.zero(1) for _ in range(N + 1)]
    u = WeightPoly.variable(0, 1)
    for n, table in cluster_tables(p, N, u, aggregated=aggregated):
        total = WeightPoly.zero(1)
        for w in table.values():
            total = total + w
        out[n] = total
    return out


def cluster_polys(p: Sequence[int], N: int, aggregated: bool = True) -> list[WeightPoly]:
    """C_0(t)..C_N(t): cluster weight enumerators in the plain t basis."""
    return [compose_shift(c, -1) for c in cluster_polys_shifted(p, N, aggregated=aggregated)]


def cluster_values(p: Sequence[int], N: int, t_value) -> list:
    """C_0(t0)..C_N(t0) at a fixed exact t0, computed without polynomials."""
    u = t_value - 1
    out = [0] * (N + 1)
    if u == 0:
        return out
    for n, table in cluster_tables(p, N, u):
        out[n] = sum(table.values())
    return out


# -- binomials: one growing Pascal triangle, exact ----------------------------

_PASCAL_ROWS: list[tuple[int, ...]] = [(1,)]


def binomial_row(n: int) -> tuple[int, ...]:
    while len(_PASCAL_ROWS) <= n:
        prev = _PASCAL_ROWS[-1]
        _PASCAL_ROWS.append(
            (1,) + tuple(prev[i] + prev[i + 1] for i in range(len(prev) - 1)) + (1,)
        )
    return _PASCAL_ROWS[n]


def binomial(n: int, r: int) -> int:
    if r < 0 or r > n:
        return 0
    return binomial_row(n)[r]


def assemble_counts(p: Sequence[int], N: int, t_value=None) -> list:
    """P_0..P_N from the cluster enumerators via the chopping recurrence.

    With t_value=None the full polynomials are produced; otherwise t is
    specialized first and everything stays in exact integers (or
    Fractions), which is how long avoidance series are computed.
    """
    p = _check_pattern(p)
    k = len(p)
    if t_value is None:
        C = cluster_polys(p, N)
        terms: list = [WeightPoly.const(1, 1)]
    else:
        C = cluster_values(p, N, t_value)
        terms = [1]
    for n in range(1, N + 1):
        val = n * terms[n - 1]
        row = binomial_row(n)
        for r in range(k, n + 1):
            c = C[r]
            if c:
                val = val + row[r] * (terms[n - r] * c)
        terms.append(val)
    return terms


# -- identity checks -----------------------------------------------------------

def _t_coeffs(w) -> dict[int, int]:
    if isinstance(w, WeightPoly):
        if w.nvars == 0:
            v = w.constant_value()
            return {0: v} if v else {}
        if w.nvars != 1:
            raise ValueError("expected a univariate term")
        return {e[0]: c for e, c in w.items()}
    return {0: w} if w else {}


@dataclass
class EgfReport:
    """Per-order residuals of F * (1 - z - G) - 1, exact rationals."""
    order: int
    residuals: list[dict[int, Fraction]]

    @property
    def ok(self) -> bool:
        return all(not r for r in self.residuals)


def egf_identity_check(P: Sequence, C: Sequence, N: int) -> EgfReport:
    """Check that the count and cluster series satisfy F = 1/(1 - z - G).

    F and G are the exponential generating functions of P_n(t) and C_n(t);
    the product F*(1 - z - G) must be exactly 1 through order N.
    """
    if len(P) < N + 1 or len(C) < N + 1:
        raise ValueError("series too short for requested order")
    f = []
    h = []
    for n in range(N + 1):
        inv = Fraction(1, math.factorial(n))
        f.append({e: c * inv for e, c in _t_coeffs(P[n]).items()})
        hn = {e: -c * inv for e, c in _t_coeffs(C[n]).items()}
        if n == 0:
            hn[0] = hn.get(0, Fraction(0)) + 1
        elif n == 1:
            hn[0] = hn.get(0, Fraction(0)) - 1
        h.append({e: c for e, c in hn.items() if c})
    residuals = []
    for n in range(N + 1):
        acc: dict[int, Fraction] = {}
        for i in range(n + 1):
            fi, hj = f[i], h[n - i]
            if not fi or not hj:
                continue
            for e1, c1 in fi.items():
                for e2, c2 in hj.items():
                    e = e1 + e2
                    acc[e] = acc.get(e, Fraction(0)) + c1 * c2
        if n == 0:
            acc[0] = acc.get(0, Fraction(0)) - 1
        residuals.append({e: c for e, c in acc.items() if c})
    return EgfReport(N, residuals)


def _negate_var(poly: WeightPoly) -> WeightPoly:
    return WeightPoly(1, {e: (-c if e[0] % 2 else c) for e, c in poly.items()})


@dataclass
class Normalization:
    sign: int
    shift: int
    negate_u: bool
    verified_to: int
    residual_orders: tuple[int, ...]

    @property
    def exact(self) -> bool:
        return not self.residual_orders


@dataclass
class Report321:
    """Outcome of matching the decreasing-triple cluster series against
    the closed algebraic equation g = -(t-1)z^2 - (t-1)(z+z^2)g."""
    order: int
    candidates: list[Normalization] = field(default_factory=list)

    @property
    def matches(self) -> list[Normalization]:
        return [c for c in self.candidates if c.exact]

    @property
    def ok(self) -> bool:
        return len(self.matches) == 1


def verify_321_equation(N: int) -> Report321:
    """Match the computed 321 cluster series against the algebraic equation.

    The equation is solved as a power series g_n = -u*[n=2] - u*(g_{n-1} +
    g_{n-2}) in u = t - 1.  The series are then aligned by searching a
    normalization g = sign * z^shift * c, optionally with u negated; every
    candidate that matches the lowest nonzero coefficient is verified to
    order N and reported with its residual orders.
    """
    if N < 5:
        raise ValueError("N must be at least 5")
    u = WeightPoly.variable(0, 1)
    zero = WeightPoly.zero(1)
    g = [zero, zero]
    for n in range(2, N + 1):
        gn = -(u * (g[n - 1] + g[n - 2]))
        if n == 2:
            gn = gn - u
        g.append(gn)
    # extra orders of c so every shift in the grid is verifiable through N
    c = cluster_polys_shifted((3, 2, 1), N + 2)
    g0 = next(n for n in range(N + 1) if g[n])
    c0 = next(n for n in range(N + 3) if c[n])
    report = Report321(N)
    for sign in (1, -1):
        for shift in range(-2, 3):
            if c0 + shift != g0:
                continue
            for negate in (False, True):
                def mapped(n):
                    i = n - shift
                    if not 0 <= i < len(c):
                        return zero
                    poly = _negate_var(c[i]) if negate else c[i]
                    return poly if sign == 1 else -poly

                if g[g0] != mapped(g0):
                    continue
                bad = tuple(n for n in range(N + 1) if g[n] != mapped(n))
                report.candidates.append(
                    Normalization(sign, shift, negate, N, bad)
                )
    return report


# -- symmetry representative ----------------------------------------------------

def choose_representative(p: Sequence[int]) -> tuple[int, ...]:
    """The symmetry-class member with the fewest admissible overlaps.

    Fewer overlaps mean fewer cluster transitions; counts are identical
    across the class, so the cheapest member runs.  Ties break to the
    lexicographically smallest pattern.
    """
    p = _check_pattern(p)
    return min(symmetry_class(p), key=lambda q: (len(overlap_set(q)), q))


# -- ending-cluster decomposition -----------------------------------------------

def split_ending_cluster(pi: Sequence[int], starts: Sequence[int],
                         p: Sequence[int]):
    """Chop the maximal overlapping suffix chain of marked occurrences.

    Given a permutation and marked occurrence starts of p whose last window
    ends at the last position, returns (remainder values, remainder starts,
    ending-cluster starts).  The remainder keeps its original values; the
    ending cluster's windows occupy a contiguous final block.
    """
    pi = tuple(pi)
    p = _check_pattern(p)
    k = len(p)
    starts = tuple(starts)
    if not starts:
        raise ValueError("no marked occurrences")
    occ = set(occurrences(pi, p))
    for s in starts:
        if s not in occ:
            raise ValueError(f"start {s} is not an occurrence")
    if any(a >= b for a, b in zip(starts, starts[1:])):
        raise ValueError("starts must be strictly increasing")
    if starts[-1] + k - 1 != len(pi):
        raise ValueError("last marked window must end at the last position")
    i = len(starts) - 1
    while i > 0 and starts[i] - starts[i - 1] <= k - 1:
        i -= 1
    ending = starts[i:]
    remainder = pi[:ending[0] - 1]
    return remainder, starts[:i], ending


# -- checkpointing ---------------------------------------------------------------

def dump_cluster_table(table: dict, p: Sequence[int], n: int, fh: IO[str]) -> None:
    """Write one length's cluster table; states in sorted value order."""
    from .positive_dp import _encode_weight
    fh.write(f"{CTABLE_HEADER}\n")
    fh.write(f"{format_pattern(p)} {n}\n")
    for state, w in sorted(table.items()):
        state_text = ",".join(str(v) for v in state)
        fh.write(f"{state_text}|{_encode_weight(w)}\n")


def load_cluster_table(fh: IO[str]):
    from .permcore import parse_pattern
    from .positive_dp import _decode_weight
    header = fh.readline().rstrip("\n")
    if header != CTABLE_HEADER:
        raise ValueError(f"bad table header {header!r}")
    pat_text, n_text = fh.readline().split()
    p = parse_pattern(pat_text)
    table = {}
    for line in fh:
        line = line.rstrip("\n")
        if not line:
            continue
        state_text, w_text = line.split("|")
        state = tuple(int(v) for v in state_text.split(","))
        table[state] = _decode_weight(w_text)
    return p, int(n_text), table
