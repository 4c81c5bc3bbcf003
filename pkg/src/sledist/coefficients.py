"""Coefficient tables for the largest-eigenvalue density of a complex Wishart matrix.

The density of the largest eigenvalue of ``R = Z Z^H`` (``Z`` a ``K x N``
standard complex Gaussian matrix, ``K <= N``) admits the expansion

    f(x) = sum_{i=1}^{K} exp(-i*x) * sum_j c_{i,j} x^j,

with ``j`` running over ``N-K .. (N+K)*i - 2*i**2`` for each ``i``.  This
module produces the exact rational table ``c_{i,j}`` three ways: closed forms
for K = 2 and K = 3, and a determinant engine for general K that expands the
squared-Vandermonde integral over ``[0, x]^(K-1)`` into a Hankel determinant
of the weighted incomplete moments L_a(x).

Every construction path validates the result: nonzero coefficients must land
inside the index bounds above, and the table must satisfy the exact
normalization ``sum c_{i,j} * j! / i^(j+1) = 1``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .exact import ExpPolySum, Polynomial, Rational, reciprocal_factorial

__all__ = [
    "ConsistencyError",
    "ResourceLimitError",
    "CoefficientTable",
    "HankelSystem",
    "l_poly",
    "d_constant",
    "closed_form_k2",
    "closed_form_k3",
    "hankel_system",
    "hankel_coeffs",
    "coefficient_table",
    "table_to_json",
    "table_from_json",
    "MAX_KN",
]

# Exact tables beyond this K*N product blow past interactive time and memory
# budgets (degrees and factorial magnitudes grow superlinearly).
MAX_KN = 2000


class ConsistencyError(Exception):
    """An internally computed quantity violated a structural invariant."""


class ResourceLimitError(Exception):
    """Requested problem size exceeds the practical exact-arithmetic budget."""


def _fact(n: int) -> int:
    return math.factorial(n)


def index_upper(K: int, i: int, N: int) -> int:
    """Largest power of x carried by the exp(-i*x) block."""
    return (N + K) * i - 2 * i * i


def _check_size(K: int, N: int) -> None:
    if K * N > MAX_KN:
        raise ResourceLimitError(
            f"K*N = {K * N} exceeds the supported limit of {MAX_KN}; "
            "exact coefficient tables of this size are not practical"
        )


def _check_shape(K: int, N: int) -> None:
    if K < 2:
        raise ValueError(f"K must be at least 2, got {K}")
    if N < K:
        raise ValueError(f"N must be at least K, got K={K}, N={N}")


@dataclass(frozen=True)
class CoefficientTable:
    """Exact density coefficients c_{i,j} for one (K, N).

    ``entries`` holds the complete in-range rectangle: every pair (i, j) with
    1 <= i <= K and N-K <= j <= (N+K)i - 2i^2 is present, zeros included, so
    two tables are equal iff they describe the same density.  Construction
    validates the index bounds and the exact unit-mass normalization and
    raises :class:`ConsistencyError` on failure.
    """

    K: int
    N: int
    entries: dict[tuple[int, int], Fraction] = field(compare=True)

    def __post_init__(self):
        _check_shape(self.K, self.N)
        expected = {
            (i, j)
            for i in range(1, self.K + 1)
            for j in range(self.N - self.K, index_upper(self.K, i, self.N) + 1)
        }
        got = set(self.entries)
        if got != expected:
            stray = sorted(got - expected)[:4]
            missing = sorted(expected - got)[:4]
            raise ConsistencyError(
                f"coefficient index set malformed for K={self.K}, N={self.N}: "
                f"unexpected {stray}, missing {missing}"
            )
        mass = self.normalization()
        if mass != 1:
            raise ConsistencyError(
                f"coefficient table for K={self.K}, N={self.N} fails unit-mass "
                f"normalization: sum c_ij * j!/i^(j+1) = {mass}"
            )

    def normalization(self) -> Fraction:
        """Exact total mass: sum over entries of c * j! / i^(j+1)."""
        total = Fraction(0)
        for (i, j), c in self.entries.items():
            if c:
                total += c * _fact(j) / Fraction(i) ** (j + 1)
        return total

    def coeff(self, i: int, j: int) -> Fraction:
        return self.entries.get((i, j), Fraction(0))

    def nonzero(self) -> dict[tuple[int, int], Fraction]:
        return {k: v for k, v in self.entries.items() if v}

    def __iter__(self):
        return iter(sorted(self.entries.items()))

    # dict fields are unhashable; identity hash is fine for a frozen value used as a cache key
    def __hash__(self) -> int:
        return hash((self.K, self.N, tuple(sorted(self.nonzero().items()))))


@dataclass(frozen=True)
class HankelSystem:
    """The (K-1) x (K-1) moment matrix whose determinant yields the density.

    Entry (r, s) is L_{N-K+r+s}(x); the matrix is constant along
    anti-diagonals because the entry depends on r+s only.
    """

    K: int
    N: int
    entries: tuple[tuple[ExpPolySum, ...], ...]

    def __post_init__(self):
        _check_shape(self.K, self.N)
        n = self.K - 1
        if len(self.entries) != n or any(len(row) != n for row in self.entries):
            raise ConsistencyError("moment matrix has wrong shape")
        for r in range(n):
            for s in range(n):
                if self.entries[r][s] != l_poly(self.N - self.K + r + s):
                    raise ConsistencyError(f"entry ({r},{s}) is not L_{{{self.N - self.K + r + s}}}")

    def determinant(self) -> ExpPolySum:
        return _det_exppoly(self.entries)


@lru_cache(maxsize=None)
def l_poly(a: int) -> ExpPolySum:
    """The weighted incomplete moment L_a(x) = int_0^x t^a (x-t)^2 e^(-t) dt.

    Closed form (repeated integration by parts):
        [(a+2)! - 2(a+1)! x + a! x^2]
        - e^(-x) * a! * sum_{k=0}^{a} (a-k+2)!/(k!(a-k)!) x^k
    """
    if a < 0:
        raise ValueError(f"moment order must be nonnegative, got {a}")
    steady = Polynomial([_fact(a + 2), -2 * _fact(a + 1), _fact(a)])
    decaying = Polynomial(
        [Fraction(-_fact(a) * _fact(a - k + 2), _fact(k) * _fact(a - k)) for k in range(a + 1)]
    )
    return ExpPolySum({0: steady, 1: decaying})


def d_constant(K: int, N: int) -> Rational:
    """Normalizing constant 1 / prod_{i=1}^{K} (N-i)! (K-i)!."""
    _check_shape(K, N)
    denom = 1
    for i in range(1, K + 1):
        denom *= _fact(N - i) * _fact(K - i)
    return Fraction(1, denom)


def _full_rectangle(K: int, N: int, nonzero: dict[tuple[int, int], Fraction]) -> CoefficientTable:
    entries = {
        (i, j): nonzero.get((i, j), Fraction(0))
        for i in range(1, K + 1)
        for j in range(N - K, index_upper(K, i, N) + 1)
    }
    return CoefficientTable(K=K, N=N, entries=entries)


def closed_form_k2(N: int) -> CoefficientTable:
    """Closed-form coefficient table for K = 2."""
    if N < 2:
        raise ValueError(f"K=2 closed form needs N >= 2, got {N}")
    _check_size(2, N)
    t: dict[tuple[int, int], Fraction] = {}
    fN1 = _fact(N - 1)
    fN2 = _fact(N - 2)
    for j in range(N - 2, N + 1):
        sign = -1 if (j - N) % 2 else 1
        c = (
            Fraction(2 * sign * _fact(2 * N - j - 2), fN2 * fN1)
            * reciprocal_factorial(-N + j + 2)
            * reciprocal_factorial(N - j)
        )
        t[(1, j)] = c
    for j in range(N - 2, 2 * N - 3):
        t[(2, j)] = (
            Fraction(-(2 * N - j - 2) * (2 * N - j - 3), fN1)
            * reciprocal_factorial(-N + j + 2)
        )
    return _full_rectangle(2, N, t)


def _falling2(a: int) -> int:
    """a * (a - 1): the two-step falling product that the K=3 factorial ratios reduce to."""
    return a * (a - 1)


def closed_form_k3(N: int) -> CoefficientTable:
    """Closed-form coefficient table for K = 3.

    The printed formulas contain factorial ratios like (2N-j+k-3)!/(2N-j+k-5)!
    whose separate factorials can have negative arguments at the edges of the
    summation ranges even though the ratio itself is a polynomial; each ratio
    is therefore implemented as the equivalent falling product, which is exact
    everywhere the summation ranges reach.
    """
    if N < 3:
        raise ValueError(f"K=3 closed form needs N >= 3, got {N}")
    _check_size(3, N)
    fN1, fN2, fN3 = _fact(N - 1), _fact(N - 2), _fact(N - 3)
    t: dict[tuple[int, int], Fraction] = {}

    for j in range(N - 3, N + 2):
        s = Fraction(0)
        sign = -1 if (j - N + 1) % 2 else 1
        for k in range(max(0, j - N + 1), min(j - N + 3, 2) + 1):
            s += (
                Fraction(
                    2 * sign * _fact(N - k) * _fact(2 * N - j + k - 4) * (-N + j - 2 * k + 4),
                    _fact(2 - k) * _fact(k) * fN3 * fN2 * fN1,
                )
                * reciprocal_factorial(N - j + k - 1)
                * reciprocal_factorial(-N + j - k + 3)
            )
        if s:
            t[(1, j)] = s

    for j in range(N - 3, index_upper(3, 2, N) + 1):
        s = Fraction(0)
        for k in range(max(0, j - 2 * N + 4), min(j - N + 3, 2) + 1):
            sign = -1 if k % 2 else 1
            pref = (
                Fraction(sign)
                * reciprocal_factorial(2 - k)
                * reciprocal_factorial(k)
                * reciprocal_factorial(-N + j - k + 3)
            )
            a = 2 * N - j + k
            p1 = Fraction(2 * _fact(N - k) * _falling2(a - 3), fN3 * fN1)
            p2 = Fraction(_fact(N - k - 1) * _falling2(a - 2), fN3 * fN2)
            p3 = Fraction(_fact(N - k + 1) * _falling2(a - 4), fN2 * fN1)
            s += pref * (p1 - p2 - p3)
        if s:
            t[(2, j)] = s

    for j in range(N - 3, index_upper(3, 3, N) + 1):
        s = Fraction(0)
        for k in range(max(0, j - 2 * N + 5), min(j - N + 3, N - 1) + 1):
            pref = (
                Fraction(1, 2 * fN2)
                * reciprocal_factorial(k)
                * reciprocal_factorial(-N + j - k + 3)
            )
            a = 2 * N - j + k
            p1 = Fraction((N - k + 1) * (N - k) * _falling2(a - 4))
            p2 = Fraction((N - k) * (N - k - 1) * _falling2(a - 3) * (N - 2), N - 1)
            s += pref * (p1 - p2)
        if s:
            t[(3, j)] = s

    return _full_rectangle(3, N, t)


def _det_exppoly(rows: tuple[tuple[ExpPolySum, ...], ...]) -> ExpPolySum:
    """Division-free determinant over the ExpPolySum ring.

    Dynamic programming over column subsets: minor(S) is the determinant of
    the submatrix on rows 0..|S|-1 and columns S, built by expanding along the
    last row.  O(2^n * n) ring multiplications for an n x n matrix, far below
    the n! of naive cofactor recursion, and no divisions ever occur.
    """
    n = len(rows)
    one = ExpPolySum({0: Polynomial([1])})
    minors: dict[int, ExpPolySum] = {0: one}
    for r in range(n):
        nxt: dict[int, ExpPolySum] = {}
        for subset, sub_det in minors.items():
            # insert each unused column c; its position among set bits fixes the sign
            for c in range(n):
                bit = 1 << c
                if subset & bit:
                    continue
                grown = subset | bit
                pos = bin(grown & (bit - 1)).count("1")
                term = rows[r][c] * sub_det
                if (r + pos) % 2:
                    term = -term
                acc = nxt.get(grown)
                nxt[grown] = term if acc is None else acc + term
        minors = nxt
    return minors[(1 << n) - 1]


def hankel_system(K: int, N: int) -> HankelSystem:
    """Assemble the moment matrix with entries L_{N-K+r+s}(x)."""
    _check_shape(K, N)
    n = K - 1
    rows = tuple(tuple(l_poly(N - K + r + s) for s in range(n)) for r in range(n))
    return HankelSystem(K=K, N=N, entries=rows)


def hankel_coeffs(K: int, N: int) -> CoefficientTable:
    """General-K coefficient table via the determinant of the moment matrix.

    The largest-eigenvalue density equals
        D(K,N) * x^(N-K) * e^(-x) * det[L_{N-K+r+s}(x)]_{r,s=0..K-2};
    expanding the determinant in the ExpPolySum ring and collecting the
    coefficient of e^(-i*x) x^j gives c_{i,j} directly.
    """
    _check_shape(K, N)
    _check_size(K, N)
    det = hankel_system(K, N).determinant()
    D = d_constant(K, N)
    shift = N - K
    nonzero: dict[tuple[int, int], Fraction] = {}
    for m, poly in det.terms.items():
        i = m + 1  # the assembled density carries one extra e^(-x)
        for k, c in enumerate(poly):
            if not c:
                continue
            j = k + shift
            if not (N - K <= j <= index_upper(K, i, N)):
                raise ConsistencyError(
                    f"determinant produced coefficient at (i={i}, j={j}) outside "
                    f"the admissible range for K={K}, N={N}"
                )
            nonzero[(i, j)] = c * D
    return _full_rectangle(K, N, nonzero)


def coefficient_table(K: int, N: int, engine: str = "auto") -> CoefficientTable:
    """Build the coefficient table with the requested engine.

    ``auto`` picks the closed form for K in {2, 3} and the determinant engine
    otherwise; ``closed-form`` and ``hankel`` force the choice (closed-form is
    only available for K in {2, 3}).
    """
    _check_shape(K, N)
    _check_size(K, N)
    if engine == "auto":
        engine = "closed-form" if K in (2, 3) else "hankel"
    if engine == "closed-form":
        if K == 2:
            return closed_form_k2(N)
        if K == 3:
            return closed_form_k3(N)
        raise ValueError(f"no closed form for K={K}; use engine='hankel'")
    if engine == "hankel":
        return hankel_coeffs(K, N)
    raise ValueError(f"unknown engine {engine!r}; expected auto, closed-form, or hankel")


def table_to_json(table: CoefficientTable, indent: int | None = 2) -> str:
    """Serialize a table; big integers become decimal strings so any JSON parser survives."""
    payload = {
        "K": table.K,
        "N": table.N,
        "entries": [
            {"i": i, "j": j, "num": str(c.numerator), "den": str(c.denominator)}
            for (i, j), c in sorted(table.entries.items())
        ],
    }
    return json.dumps(payload, indent=indent)


def table_from_json(text: str) -> CoefficientTable:
    """Inverse of :func:`table_to_json`; revalidates all invariants on load."""
    payload = json.loads(text)
    entries = {
        (int(e["i"]), int(e["j"])): Fraction(int(e["num"]), int(e["den"]))
        for e in payload["entries"]
    }
    return CoefficientTable(K=int(payload["K"]), N=int(payload["N"]), entries=entries)
