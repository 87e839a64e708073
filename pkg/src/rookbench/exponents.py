"""Exponent-set generators and validity checks for batch matmul codes.

A code here is a pair of strictly increasing exponent lists (P, Q) of equal
size n.  The pair is decodable when every diagonal sum p_k + q_k occurs
exactly once among all n^2 cross sums, and the recovery threshold of the
resulting scheme is |P+Q|, the number of distinct sums.

Three generators are provided: the quadratic-threshold pair (p_i = i,
q_j = n*j), the base-3 digit construction (threshold 3^ceil(log2 n)), and a
digit-shell construction built from constant-norm digit vectors in a
carry-free base, which is 3-AP-free and therefore decodable.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from itertools import combinations

import numpy as np

_JSON_INT_MAX = 1 << 53  # JSON numbers are exact only up to 2^53


class ParameterSearchExhausted(Exception):
    """No digit-shell parameters within bounds produce enough elements."""


class SearchBudgetExceeded(Exception):
    """Brute-force search guard tripped (n or exponent budget too large)."""


@dataclass(frozen=True)
class ExponentPair:
    """Exponent lists (P, Q), each strictly increasing, |P| = |Q| = n."""

    n: int
    p: tuple
    q: tuple

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        for name, seq in (("p", self.p), ("q", self.q)):
            if len(seq) != self.n:
                raise ValueError(f"|{name}| = {len(seq)} != n = {self.n}")
            if any(v < 0 for v in seq):
                raise ValueError(f"{name} has negative exponents")
            if any(a >= b for a, b in zip(seq, seq[1:])):
                raise ValueError(f"{name} must be strictly increasing")

    @property
    def max_exponent(self) -> int:
        return max(self.p[-1], self.q[-1])

    def to_json_dict(self) -> dict:
        def enc(v):
            return v if v < _JSON_INT_MAX else str(v)

        return {
            "n": self.n,
            "p": [enc(v) for v in self.p],
            "q": [enc(v) for v in self.q],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "ExponentPair":
        p = tuple(int(v) for v in d["p"])
        q = tuple(int(v) for v in d["q"])
        return cls(n=int(d["n"]), p=p, q=q)


@dataclass(frozen=True)
class SumSupport:
    """Sorted distinct sums of P+Q and, per k, where p_k + q_k lands."""

    support: tuple
    diag_index: tuple

    @property
    def L(self) -> int:
        return len(self.support)


def poly_code_exponents(n: int) -> ExponentPair:
    """P = {0..n-1}, Q = {0, n, ..., n(n-1)}; threshold exactly n^2."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return ExponentPair(n=n, p=tuple(range(n)), q=tuple(n * j for j in range(n)))


def base3_exponents(n: int) -> ExponentPair:
    """The n smallest integers whose base-3 digits are all 0 or 1.

    For n = 2^l this is exactly the digit vectors of length l and the
    threshold is 3^l; other n take the n smallest elements of the
    ceil(log2 n) construction, which stays decodable since any subset of a
    3-AP-free set is 3-AP-free.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    vals = []
    for k in range(n):
        v = 0
        scale = 1
        while k:
            if k & 1:
                v += scale
            scale *= 3
            k >>= 1
        vals.append(v)
    p = tuple(vals)
    return ExponentPair(n=n, p=p, q=p)


# --- digit-shell (Behrend-style) construction ------------------------------

# Digits range over {0..d-1} so pairwise digit sums stay < 2d-1 and addition
# in base 2d-1 is carry-free; constant squared norm then forbids 3-APs.

_VALUE_CAP = (1 << 61) - 2  # keep generated exponents bindable to GF(2^61-1)


def _shell_sizes(d: int, length: int) -> list:
    """counts[k] = number of vectors in {0..d-1}^length with sum of squares k."""
    squares = [v * v for v in range(d)]
    counts = [1]
    for _ in range(length):
        nxt = [0] * (len(counts) + squares[-1])
        for r, c in enumerate(counts):
            if c:
                for s in squares:
                    nxt[r + s] += c
        counts = nxt
    return counts


def _ways_table(d: int, length: int) -> list:
    """ways[j][r] = vectors of length j over {0..d-1} with squared norm r."""
    squares = [v * v for v in range(d)]
    ways = [[1]]
    for _ in range(length):
        prev = ways[-1]
        nxt = [0] * (len(prev) + squares[-1])
        for r, c in enumerate(prev):
            if c:
                for s in squares:
                    nxt[r + s] += c
        ways.append(nxt)
    return ways


def _smallest_shell_values(d: int, length: int, norm: int, count: int) -> list:
    """The `count` smallest base-(2d-1) values of norm-`norm` digit vectors.

    Walks digits most-significant first in increasing order, pruning branches
    with no completions, so values come out already sorted.
    """
    base = 2 * d - 1
    ways = _ways_table(d, length)
    out: list[int] = []
    # stack of (position, remaining_norm, partial_value, next_digit)
    stack = [(length - 1, norm, 0, 0)]
    while stack and len(out) < count:
        pos, rem, val, digit = stack.pop()
        if digit >= d:
            continue
        stack.append((pos, rem, val, digit + 1))
        r2 = rem - digit * digit
        if r2 < 0:
            # digits are tried ascending, so larger digits only overshoot
            stack.pop()
            continue
        v2 = val + digit * base**pos
        if pos == 0:
            if r2 == 0:
                out.append(v2)
            continue
        if r2 < len(ways[pos]) and ways[pos][r2]:
            stack.append((pos - 1, r2, v2, 0))
    return out


def _largest_shell(sizes: list):
    best_k, best_size = 0, 0
    for k, size in enumerate(sizes):
        if size > best_size:  # ties keep the smallest norm
            best_k, best_size = k, size
    return best_k, best_size


def behrend_exponents(
    n: int,
    digit_range: int | None = None,
    length: int | None = None,
) -> ExponentPair:
    """3-AP-free exponent set from constant-norm digit vectors, P = Q.

    With explicit (digit_range, length) = (d, l), enumerates {0..d-1}^l,
    groups by squared norm, takes the largest shell (smallest norm on ties)
    and maps its n smallest vectors through base 2d-1.  Without them, scans
    candidate (d, l) pairs and keeps the one whose generated set realizes
    the smallest |P+P| (ties: smaller max element, then smaller l, d).

    Raises ParameterSearchExhausted when no candidate within bounds has a
    shell of size >= n.
    """
    if n < 1:
        raise ValueError("n must be >= 1")

    if (digit_range is None) != (length is None):
        raise ValueError("digit_range and length must be given together")

    if digit_range is not None:
        vals = _candidate_values(n, digit_range, length)
        if vals is None:
            raise ParameterSearchExhausted(
                f"no shell of size >= {n} for d={digit_range}, l={length}"
            )
        p = tuple(vals)
        return ExponentPair(n=n, p=p, q=p)

    best = None  # (realized_L, max_element, l, d, values)
    log2n = math.log2(n) if n > 1 else 1.0
    max_len = max(math.ceil(2 * math.sqrt(log2n)) + 2, math.ceil(log2n) + 4)
    for ell in range(2, max_len + 1):
        d_lo = max(2, math.ceil(n ** (1.0 / ell)))
        d_hi = max(d_lo, int((2e7 / (ell * ell)) ** (1.0 / 3.0)))
        for d in range(d_lo, d_hi + 1):
            if (2 * d - 1) ** ell - 1 > _VALUE_CAP:
                break
            vals = _candidate_values(n, d, ell)
            if vals is None:
                continue
            arr = np.array(vals, dtype=np.int64)
            realized = int(np.unique(np.add.outer(arr, arr)).size)
            key = (realized, vals[-1], ell, d)
            if best is None or key < best[0]:
                best = (key, vals)
            break  # larger d in the same length only grows the base
    if best is None:
        raise ParameterSearchExhausted(f"no digit-shell parameters found for n={n}")
    p = tuple(best[1])
    return ExponentPair(n=n, p=p, q=p)


def _candidate_values(n: int, d: int, length: int):
    if d < 2 or length < 1 or d**length < n:
        return None
    sizes = _shell_sizes(d, length)
    k, size = _largest_shell(sizes)
    if size < n:
        return None
    return _smallest_shell_values(d, length, k, n)


# --- validity checks --------------------------------------------------------

_NUMPY_MIN_N = 128


def _diag_multiplicities(pair: ExponentPair) -> list:
    """Multiplicity of each diagonal sum p_k + q_k among all cross sums."""
    if pair.n < _NUMPY_MIN_N or pair.max_exponent * 2 >= (1 << 62):
        counts = Counter()
        for pi in pair.p:
            for qj in pair.q:
                counts[pi + qj] += 1
        return [counts[pk + qk] for pk, qk in zip(pair.p, pair.q)]
    p = np.asarray(pair.p, dtype=np.int64)
    q = np.asarray(pair.q, dtype=np.int64)
    sums = np.add.outer(p, q).ravel()
    support, counts = np.unique(sums, return_counts=True)
    idx = np.searchsorted(support, p + q)
    return counts[idx].tolist()


def is_decodable(pair: ExponentPair) -> bool:
    """True iff every diagonal sum occurs exactly once among all n^2 sums."""
    return all(m == 1 for m in _diag_multiplicities(pair))


def sum_support(pair: ExponentPair) -> SumSupport:
    """Sorted distinct sums of P+Q plus the position of each diagonal sum."""
    if pair.n < _NUMPY_MIN_N or pair.max_exponent * 2 >= (1 << 62):
        sums = sorted({pi + qj for pi in pair.p for qj in pair.q})
        pos = {s: t for t, s in enumerate(sums)}
        diag = tuple(pos[pk + qk] for pk, qk in zip(pair.p, pair.q))
        return SumSupport(support=tuple(sums), diag_index=diag)
    p = np.asarray(pair.p, dtype=np.int64)
    q = np.asarray(pair.q, dtype=np.int64)
    support = np.unique(np.add.outer(p, q))
    diag = np.searchsorted(support, p + q)
    return SumSupport(support=tuple(support.tolist()), diag_index=tuple(diag.tolist()))


def is_3ap_free(values) -> bool:
    """True iff no three distinct elements satisfy a + c = 2b.

    O(n^2) scan over pairs a < c testing midpoint membership; the midpoint
    of a distinct pair is strictly between them, so it is automatically a
    third element.
    """
    a = sorted(values)
    if len(a) != len(set(a)):
        raise ValueError("elements must be distinct")
    n = len(a)
    if n < 3:
        return True
    if n < _NUMPY_MIN_N:
        members = set(a)
        for i in range(n):
            ai = a[i]
            for j in range(i + 1, n):
                s = ai + a[j]
                if s % 2 == 0 and s // 2 in members:
                    return False
        return True
    arr = np.asarray(a, dtype=np.int64)
    for i in range(n - 2):
        s = arr[i] + arr[i + 1 :]
        mids = s >> 1
        mids = mids[(s & 1) == 0]
        if mids.size == 0:
            continue
        pos = np.searchsorted(arr, mids)
        pos = np.clip(pos, 0, n - 1)
        if np.any(arr[pos] == mids):
            return False
    return True


def min_recovery_bruteforce(
    n: int,
    max_exponent: int,
    n_limit: int = 4,
    exponent_limit: int = 12,
):
    """Minimal |P+Q| over all decodable pairs with 0 in P and 0 in Q.

    Exhausts all strictly increasing n-subsets of {0..max_exponent}
    containing 0.  Returns (L_min, witness); the witness is the first pair
    in lexicographic order achieving the minimum.  Guards trip
    SearchBudgetExceeded since the space grows as C(max_exponent, n-1)^2.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > n_limit or max_exponent > exponent_limit:
        raise SearchBudgetExceeded(
            f"n={n} (limit {n_limit}), max_exponent={max_exponent} "
            f"(limit {exponent_limit})"
        )
    if max_exponent < n - 1:
        raise ValueError("max_exponent too small to fit n distinct exponents")
    tails = list(combinations(range(1, max_exponent + 1), n - 1))
    best_l = None
    witness = None
    for tp in tails:
        p = (0,) + tp
        for tq in tails:
            q = (0,) + tq
            pair = ExponentPair(n=n, p=p, q=q)
            if not is_decodable(pair):
                continue
            l = len({pi + qj for pi in p for qj in q})
            if best_l is None or l < best_l:
                best_l = l
                witness = pair
    return best_l, witness
