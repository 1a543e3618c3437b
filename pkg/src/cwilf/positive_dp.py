"""Incremental weighted enumeration by appending one entry at a time.

A permutation grows by choosing the relative rank i of its next entry among
1..n+1; existing values at or above i shift up to make room.  For windows of
length k, everything the future depends on is the state

    (q, j) = (reduction of the last k-1 entries, their sorted values),

so the whole of S_n collapses to a table mapping states to weights.  Each
append creates exactly one new window, whose pattern is a function of q and
of which gap between consecutive j-values the new rank lands in; the window's
factor (0, 1, or a tracked variable) multiplies the weight.

Two step implementations are provided.  `step_append` loops over every child
rank i and is the reference.  `step_append_aggregated` exploits that within
one gap the new pattern, new q, and all but one coordinate of the new j are
constant: it emits one interval event per (cell, gap) and materializes the
children with a running-sum sweep, turning the O(cells*n) inner loop into
O(cells*k).  The two must agree exactly on every input.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from operator import itemgetter
from typing import IO, Iterable, Sequence

from .permcore import all_patterns, is_permutation, occurrences, reduction
from .weightring import PatternAssignment, WeightPoly, as_weight_poly

State = tuple[tuple[int, ...], tuple[int, ...]]

PTABLE_HEADER = "CWILF-PTABLE v1"

_event_position = itemgetter(0)


@dataclass
class StateTable:
    """Weights of all permutations of size n, grouped by suffix state."""
    n: int
    k: int
    cells: dict[State, object]

    def total(self, assignment) -> WeightPoly:
        """Sum of all cell weights, with any suffix factors applied."""
        total = 0
        for (q, _j), w in self.cells.items():
            f = assignment.suffix_factor(q)
            if f == 0:
                continue
            total = total + (w if f == 1 else w * f)
        return as_weight_poly(total, assignment.nvars)


def state_of(pi: Sequence[int], k: int) -> State:
    """The suffix state of an explicit permutation."""
    pi = tuple(pi)
    if len(pi) < k - 1:
        raise ValueError("permutation shorter than k-1")
    tail = pi[len(pi) - (k - 1):]
    return reduction(tail), tuple(sorted(tail))


def init_table(k: int) -> StateTable:
    """The table at size k-1: one cell per suffix pattern, weight 1.

    Each permutation of length k-1 is its own suffix, with values 1..k-1
    and no complete window yet.
    """
    if k < 2:
        raise ValueError("window length must be at least 2")
    base = tuple(range(1, k))
    cells: dict[State, object] = {(q, base): 1 for q in all_patterns(k - 1)}
    return StateTable(k - 1, k, cells)


def append_transition(state: State, n: int, i: int, assignment) -> tuple[State, object]:
    """Append rank i to a size-n suffix state; new state and gained factor.

    Reconstructs the last k-1 values, shifts those >= i, reads off the new
    window's pattern, and drops the oldest entry.
    """
    q, j = state
    k = len(q) + 1
    if not 1 <= i <= n + 1:
        raise ValueError(f"append rank {i} out of range 1..{n + 1}")
    values = [j[r - 1] for r in q]
    shifted = [v + 1 if v >= i else v for v in values]
    gained = reduction(shifted + [i])
    new_last = shifted[1:] + [i]
    new_state = (reduction(new_last), tuple(sorted(new_last)))
    return new_state, assignment.factor(gained)


@lru_cache(maxsize=None)
def _transitions(k: int):
    """Per (q, gap): gained pattern, new q, and the new-j template layout.

    Gap g means the appended rank lands strictly above the g-th smallest
    retained value (g of the old j are below it).  Within a gap the gained
    pattern and new q are constant; the new j is the old coordinates other
    than the dropped one, those above the gap shifted up, with the new rank
    inserted at a fixed position.
    """
    table = {}
    for q in all_patterns(k - 1):
        drop = q[0]
        per_gap = []
        for g in range(k):
            ranks = [r + 1 if r > g else r for r in q]
            gained = tuple(ranks) + (g + 1,)
            new_q = reduction(ranks[1:] + [g + 1])
            low = tuple(a - 1 for a in range(1, k) if a != drop and a <= g)
            high = tuple(a - 1 for a in range(1, k) if a != drop and a > g)
            per_gap.append((gained, new_q, low, high))
        table[q] = tuple(per_gap)
    return table


def step_append(table: StateTable, assignment) -> StateTable:
    """Reference step: every cell spawns one child per rank i in 1..n+1."""
    n = table.n
    cells: dict[State, object] = {}
    for state, w in table.cells.items():
        for i in range(1, n + 2):
            new_state, f = append_transition(state, n, i, assignment)
            if f == 0:
                continue
            contrib = w if f == 1 else w * f
            prev = cells.get(new_state)
            cells[new_state] = contrib if prev is None else prev + contrib
    return StateTable(n + 1, table.k, {s: w for s, w in cells.items() if w})


def step_append_aggregated(table: StateTable, assignment) -> StateTable:
    """Same contract as `step_append`, via per-gap interval events.

    For each (cell, gap) one contribution covers the whole run of ranks in
    that gap; a sweep over the run boundaries then adds the running sum to
    each child state.  Exact equality with the reference step is a tested
    invariant.
    """
    n, k = table.n, table.k
    trans = _transitions(k)
    factors = {gained: assignment.factor(gained)
               for per_gap in trans.values() for gained, _, _, _ in per_gap}
    events: dict[tuple, list] = {}
    events_get = events.get
    top = n + 1
    for (q, j), w in table.cells.items():
        lo = 1
        for g, (gained, new_q, low, high) in enumerate(trans[q]):
            # gap boundaries are consecutive, so the next lo is this hi + 1
            hi = j[g] if g < k - 1 else top
            f = factors[gained]
            if f == 0:
                lo = hi + 1
                continue
            template = tuple(j[a] for a in low) + tuple(j[a] + 1 for a in high)
            contrib = w if f == 1 else w * f
            key = (new_q, template, len(low))
            bucket = events_get(key)
            if bucket is None:
                bucket = events[key] = []
            bucket.append((lo, contrib))
            bucket.append((hi + 1, -contrib))
            lo = hi + 1
    cells: dict[State, object] = {}
    for (new_q, template, pos), bucket in events.items():
        bucket.sort(key=_event_position)
        head, tail = template[:pos], template[pos:]
        running = 0
        idx = 0
        while idx < len(bucket):
            here = bucket[idx][0]
            while idx < len(bucket) and bucket[idx][0] == here:
                running = running + bucket[idx][1]
                idx += 1
            if idx == len(bucket):
                break
            if running:
                nxt = bucket[idx][0]
                for i in range(here, nxt):
                    state = (new_q, head + (i,) + tail)
                    prev = cells.get(state)
                    cells[state] = running if prev is None else prev + running
    return StateTable(n + 1, k, {s: w for s, w in cells.items() if w})


def enumerate_series(k: int, assignment, N: int,
                     aggregated: bool = True) -> list[WeightPoly]:
    """Weighted counts of S_0..S_N, one window factor per length-k window.

    Sizes below k-1 carry no window at all, so their term is n!.  From size
    k-1 on, the table evolves one append at a time and each term is the sum
    of the live cells.
    """
    if N < 0:
        raise ValueError("N must be nonnegative")
    step = step_append_aggregated if aggregated else step_append
    out = []
    fact = 1
    for n in range(min(N, k - 2) + 1):
        out.append(as_weight_poly(fact, assignment.nvars))
        fact *= n + 1
    if N >= k - 1:
        table = init_table(k)
        out.append(table.total(assignment))
        while table.n < N:
            table = step(table, assignment)
            out.append(table.total(assignment))
    return out


# -- mixed-length pattern families --------------------------------------------

class LiftedAssignment:
    """Window factors for patterns of mixed lengths, lifted to the longest.

    A shorter pattern occurs at a window start s either with s+k-1 <= n, in
    which case it is the prefix of exactly one full-length window and its
    factor is folded into that window's pattern, or inside the last k-1
    entries, which `suffix_factor` charges at readout time.  Either way each
    occurrence is counted exactly once at every size.
    """

    def __init__(self, avoid: Iterable = (), tracked: Sequence = ()):
        self.avoid = tuple(tuple(p) for p in avoid)
        self.tracked = tuple(tuple(p) for p in tracked)
        pats = self.avoid + self.tracked
        if not pats:
            raise ValueError("no patterns to lift")
        for p in pats:
            if len(p) < 2 or not is_permutation(p):
                raise ValueError(f"invalid pattern {p}")
        if len(set(self.tracked)) != len(self.tracked):
            raise ValueError("duplicate tracked pattern")
        if set(self.avoid) & set(self.tracked):
            raise ValueError("a pattern cannot be both forbidden and tracked")
        self.k = max(len(p) for p in pats)
        self.nvars = len(self.tracked)
        self._vars = {p: WeightPoly.variable(i, self.nvars)
                      for i, p in enumerate(self.tracked)}
        self._factors: dict[tuple, object] = {}
        self._suffix: dict[tuple, object] = {}

    def factor(self, pattern: tuple):
        f = self._factors.get(pattern)
        if f is None:
            f = 1
            for p in self.avoid:
                if reduction(pattern[:len(p)]) == p:
                    f = 0
                    break
            else:
                for p in self.tracked:
                    if reduction(pattern[:len(p)]) == p:
                        f = f * self._vars[p]
            self._factors[pattern] = f
        return f

    def suffix_factor(self, suffix: tuple):
        """Factor from shorter-pattern windows inside the retained suffix."""
        f = self._suffix.get(suffix)
        if f is None:
            f = 1
            for p in itertools.chain(self.avoid, self.tracked):
                if len(p) >= self.k:
                    continue
                hits = len(occurrences(suffix, p))
                if hits:
                    if p in self._vars:
                        f = f * self._vars[p] ** hits
                    else:
                        f = 0
                        break
            self._suffix[suffix] = f
        return f


def build_assignment(avoid: Iterable = (), track: Sequence = ()):
    """Plain assignment when all patterns share one length, lifted otherwise."""
    avoid = [tuple(p) for p in avoid]
    track = [tuple(p) for p in track]
    pats = avoid + track
    if not pats:
        raise ValueError("no patterns given")
    lengths = {len(p) for p in pats}
    if len(lengths) == 1:
        return PatternAssignment(lengths.pop(), zero=avoid, tracked=track)
    return LiftedAssignment(avoid, track)


def _direct_mixed_enum(avoid, track, n: int, nvars: int) -> WeightPoly:
    # tiny sizes only (n below k-1); the table has no cells there
    total = WeightPoly.zero(nvars)
    for pi in itertools.permutations(range(1, n + 1)):
        term: object = 1
        dead = False
        for p in avoid:
            if occurrences(pi, p):
                dead = True
                break
        if dead:
            continue
        for idx, p in enumerate(track):
            hits = len(occurrences(pi, p))
            if hits:
                term = term * WeightPoly.variable(idx, nvars) ** hits
        total = total + term
    return total


def enumerate_for_patterns(avoid: Iterable = (), track: Sequence = (),
                           N: int = 0, aggregated: bool = True) -> list[WeightPoly]:
    """Series for an arbitrary pattern family, avoided and tracked mixed.

    Same-length families go straight to `enumerate_series`.  Mixed-length
    families use the lifted assignment; sizes below k-1, where windows of
    the shorter patterns already exist but the table does not, fall back to
    direct enumeration (at most (k-2)! permutations).
    """
    assignment = build_assignment(avoid, track)
    series = enumerate_series(assignment.k, assignment, N, aggregated=aggregated)
    if isinstance(assignment, LiftedAssignment):
        avoid_t = assignment.avoid
        track_t = assignment.tracked
        for n in range(min(N, assignment.k - 2) + 1):
            series[n] = _direct_mixed_enum(avoid_t, track_t, n, assignment.nvars)
    return series


# -- checkpointing -------------------------------------------------------------

def _encode_weight(w) -> str:
    if isinstance(w, WeightPoly):
        terms = ";".join(
            f"{','.join(str(e) for e in exps)}:{c}" for exps, c in w.sorted_terms()
        )
        return f"poly {w.nvars} {terms}"
    return f"int {w}"


def _decode_weight(text: str):
    kind, _, rest = text.partition(" ")
    if kind == "int":
        return int(rest)
    if kind == "poly":
        nvars_text, _, body = rest.partition(" ")
        nvars = int(nvars_text)
        terms = {}
        if body:
            for chunk in body.split(";"):
                exps_text, _, coeff = chunk.partition(":")
                exps = tuple(int(e) for e in exps_text.split(",") if e != "")
                terms[exps] = int(coeff)
        return WeightPoly(nvars, terms)
    raise ValueError(f"unknown weight encoding {text!r}")


def dump_table(table: StateTable, fh: IO[str]) -> None:
    """Write a checkpoint; states in canonical (q, then j) order."""
    fh.write(f"{PTABLE_HEADER}\n")
    fh.write(f"{table.k} {table.n}\n")
    for (q, j), w in sorted(table.cells.items()):
        q_text = ",".join(str(v) for v in q)
        j_text = ",".join(str(v) for v in j)
        fh.write(f"{q_text}|{j_text}|{_encode_weight(w)}\n")


def load_table(fh: IO[str]) -> StateTable:
    header = fh.readline().rstrip("\n")
    if header != PTABLE_HEADER:
        raise ValueError(f"bad table header {header!r}")
    k, n = (int(x) for x in fh.readline().split())
    cells: dict[State, object] = {}
    for line in fh:
        line = line.rstrip("\n")
        if not line:
            continue
        q_text, j_text, w_text = line.split("|")
        q = tuple(int(v) for v in q_text.split(","))
        j = tuple(int(v) for v in j_text.split(","))
        cells[(q, j)] = _decode_weight(w_text)
    return StateTable(n, k, cells)
