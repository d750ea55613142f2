"""Exact linear algebra over the rationals.

Everything here works on :class:`fractions.Fraction` entries.  Matrices are
immutable, subspaces are stored in reduced row echelon form so that two
equal subspaces compare equal structurally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

Vector = tuple  # tuple[Fraction, ...]


def qvec(values: Iterable) -> tuple[Fraction, ...]:
    return tuple(Fraction(v) for v in values)


def dot(u: Sequence, v: Sequence) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def lcm_denominators(values: Iterable[Fraction]) -> int:
    return reduce(math.lcm, (Fraction(v).denominator for v in values), 1)


def integer_scaled(values: Sequence[Fraction]) -> tuple[int, ...]:
    """Scale a rational vector by the lcm of its denominators."""
    m = lcm_denominators(values)
    return tuple(int(v * m) for v in values)


def primitive(values: Sequence[Fraction]) -> tuple[int, ...]:
    """Smallest integer vector on the same ray (content 1)."""
    ints = integer_scaled(values)
    g = reduce(math.gcd, ints, 0)
    if g == 0:
        return ints
    return tuple(v // g for v in ints)


@dataclass(frozen=True)
class QMatrix:
    """Dense rational matrix, row-major."""

    rows: int
    cols: int
    entries: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entries length does not match shape")

    # construction -----------------------------------------------------
    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> QMatrix:
        rows = [qvec(r) for r in rows]
        if cols is None:
            if not rows:
                raise ValueError("cols required for a matrix with no rows")
            cols = len(rows[0])
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged rows")
        return cls(len(rows), cols, tuple(x for r in rows for x in r))

    @classmethod
    def from_cols(cls, cols: Sequence[Sequence], rows: int) -> QMatrix:
        return cls.from_rows([[c[i] for c in cols] for i in range(rows)], len(cols)) if cols else cls.zeros(rows, 0)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> QMatrix:
        return cls(rows, cols, (Fraction(0),) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> QMatrix:
        return cls(n, n, tuple(Fraction(int(i == j)) for i in range(n) for j in range(n)))

    # access -------------------------------------------------------------
    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> tuple[Fraction, ...]:
        return self.entries[j::self.cols] if self.cols else ()

    def row_list(self) -> list[tuple[Fraction, ...]]:
        return [self.row(i) for i in range(self.rows)]

    def col_list(self) -> list[tuple[Fraction, ...]]:
        return [tuple(self.entries[i * self.cols + j] for i in range(self.rows)) for j in range(self.cols)]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def T(self) -> QMatrix:
        return QMatrix.from_rows(self.col_list(), self.rows)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_zero(self) -> bool:
        return not any(self.entries)

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for x in self.entries)

    # arithmetic -------------------------------------------------------
    def __matmul__(self, other: QMatrix) -> QMatrix:
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        ocols = other.col_list()
        return QMatrix.from_rows([[dot(r, c) for c in ocols] for r in self.row_list()], other.cols)

    def apply(self, v: Sequence) -> tuple[Fraction, ...]:
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        return tuple(dot(r, v) for r in self.row_list())

    def __add__(self, other: QMatrix) -> QMatrix:
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return QMatrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: QMatrix) -> QMatrix:
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return QMatrix(self.rows, self.cols, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> QMatrix:
        return QMatrix(self.rows, self.cols, tuple(-a for a in self.entries))

    def scale(self, k) -> QMatrix:
        k = Fraction(k)
        return QMatrix(self.rows, self.cols, tuple(k * a for a in self.entries))

    def power(self, k: int) -> QMatrix:
        if not self.is_square():
            raise ValueError("power of a non-square matrix")
        result, base = QMatrix.identity(self.rows), self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def hstack(self, other: QMatrix) -> QMatrix:
        if self.rows != other.rows:
            raise ValueError("row count mismatch")
        return QMatrix.from_rows([a + b for a, b in zip(self.row_list(), other.row_list())], self.cols + other.cols)

    def vstack(self, other: QMatrix) -> QMatrix:
        if self.cols != other.cols:
            raise ValueError("column count mismatch")
        return QMatrix(self.rows + other.rows, self.cols, self.entries + other.entries)

    def submatrix(self, rows: Sequence[int] | None = None, cols: Sequence[int] | None = None) -> QMatrix:
        rows = range(self.rows) if rows is None else rows
        cols = range(self.cols) if cols is None else list(cols)
        return QMatrix.from_rows([[self[i, j] for j in cols] for i in rows], len(cols))

    def lcm_denominator(self) -> int:
        return lcm_denominators(self.entries)

    def __str__(self) -> str:
        if not self.rows:
            return f"[] ({self.rows}x{self.cols})"
        return "[" + "; ".join(" ".join(str(x) for x in r) for r in self.row_list()) + "]"


def _rref_rows(rows: list[list[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    rows = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        pv = rows[r][c]
        if pv != 1:
            rows[r] = [x / pv for x in rows[r]]
        prow = rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], prow)]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rref(m: QMatrix) -> tuple[QMatrix, list[int]]:
    """Reduced row echelon form and pivot columns.  Zero rows are kept at the bottom."""
    rows, pivots = _rref_rows(m.row_list(), m.cols)
    return QMatrix.from_rows(rows, m.cols), pivots


def rank(m: QMatrix) -> int:
    return len(_rref_rows(m.row_list(), m.cols)[1])


def _nullspace_vectors(m: QMatrix) -> list[tuple[Fraction, ...]]:
    rows, pivots = _rref_rows(m.row_list(), m.cols)
    free = [j for j in range(m.cols) if j not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * m.cols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -rows[i][f]
        basis.append(tuple(v))
    return basis


def null_space(m: QMatrix) -> Subspace:
    """{x : m x = 0} as a canonical subspace of Q^cols."""
    return Subspace.span(_nullspace_vectors(m), m.cols)


def solve(a: QMatrix, b: Sequence) -> tuple[Fraction, ...] | None:
    """Some x with a x = b (free variables set to zero), or None."""
    if a.rows != len(b):
        raise ValueError("right-hand side length mismatch")
    aug = [list(r) + [Fraction(v)] for r, v in zip(a.row_list(), b)]
    rows, pivots = _rref_rows(aug, a.cols + 1)
    if a.cols in pivots:
        return None
    x = [Fraction(0)] * a.cols
    for i, p in enumerate(pivots):
        x[p] = rows[i][a.cols]
    return tuple(x)


def inverse(a: QMatrix) -> QMatrix:
    if not a.is_square():
        raise ValueError("inverse of non-square matrix")
    n = a.rows
    aug = a.hstack(QMatrix.identity(n))
    rows, pivots = _rref_rows(aug.row_list(), 2 * n)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise ValueError("matrix is singular")
    return QMatrix.from_rows([r[n:] for r in rows], n)


@dataclass(frozen=True)
class Subspace:
    """A linear subspace of Q^ambient_dim, basis kept in RREF."""

    ambient_dim: int
    basis: tuple[tuple[Fraction, ...], ...] = field(default=())

    @classmethod
    def span(cls, vectors: Iterable[Sequence], ambient_dim: int) -> Subspace:
        vs = [qvec(v) for v in vectors]
        for v in vs:
            if len(v) != ambient_dim:
                raise ValueError("vector length does not match ambient dimension")
        if not vs:
            return cls(ambient_dim, ())
        rows, pivots = _rref_rows([list(v) for v in vs], ambient_dim)
        return cls(ambient_dim, tuple(tuple(r) for r in rows[:len(pivots)]))

    @classmethod
    def full(cls, n: int) -> Subspace:
        return cls.span(QMatrix.identity(n).row_list(), n)

    @classmethod
    def zero(cls, n: int) -> Subspace:
        return cls(n, ())

    @property
    def dim(self) -> int:
        return len(self.basis)

    def matrix(self) -> QMatrix:
        """Basis vectors as rows."""
        return QMatrix.from_rows(self.basis, self.ambient_dim)

    def column_matrix(self) -> QMatrix:
        """Basis vectors as columns (ambient_dim x dim)."""
        return QMatrix.from_cols(self.basis, self.ambient_dim)

    def pivots(self) -> list[int]:
        return [next(j for j, x in enumerate(v) if x != 0) for v in self.basis]

    def contains(self, v: Sequence) -> bool:
        if not self.basis:
            return not any(v)
        return solve(self.column_matrix(), qvec(v)) is not None

    def coordinates(self, v: Sequence) -> tuple[Fraction, ...]:
        """Coordinates of v with respect to the stored basis."""
        x = solve(self.column_matrix(), qvec(v)) if self.basis else (() if not any(v) else None)
        if x is None:
            raise ValueError("vector is not in the subspace")
        return x

    def __le__(self, other: Subspace) -> bool:
        return all(other.contains(v) for v in self.basis)

    def join(self, other: Subspace) -> Subspace:
        return Subspace.span(self.basis + other.basis, self.ambient_dim)

    def annihilator(self) -> Subspace:
        """Vectors f with f . b = 0 for every b in the subspace."""
        if not self.basis:
            return Subspace.full(self.ambient_dim)
        return null_space(self.matrix())

    def constraint_matrix(self) -> QMatrix:
        """Integer matrix C with C v = 0 exactly on this subspace."""
        ann = self.annihilator()
        return QMatrix.from_rows([primitive(r) for r in ann.basis], self.ambient_dim)

    def intersect(self, other: Subspace) -> Subspace:
        c = self.constraint_matrix().vstack(other.constraint_matrix())
        return null_space(c)

    def image(self, m: QMatrix) -> Subspace:
        return Subspace.span([m.apply(v) for v in self.basis], m.rows)

    def complement_basis(self) -> list[tuple[Fraction, ...]]:
        """Unit vectors at the non-pivot columns; together with the basis they span everything."""
        piv = set(self.pivots())
        return [tuple(Fraction(int(i == j)) for i in range(self.ambient_dim))
                for j in range(self.ambient_dim) if j not in piv]

    def __str__(self) -> str:
        return "span{" + ", ".join("[" + " ".join(str(x) for x in v) + "]" for v in self.basis) + "}"


def row_space(m: QMatrix) -> Subspace:
    return Subspace.span(m.row_list(), m.cols)


def column_space(m: QMatrix) -> Subspace:
    return Subspace.span(m.col_list(), m.rows)


# ---------------------------------------------------------------------------
# polynomials and spectra


@dataclass(frozen=True)
class IntPoly:
    """Integer polynomial, coefficients lowest degree first, primitive."""

    coefficients: tuple[int, ...]

    @classmethod
    def from_rational(cls, coeffs: Sequence) -> IntPoly:
        coeffs = list(coeffs)
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        if not coeffs:
            return cls(())
        ints = list(primitive(qvec(coeffs)))
        if ints[-1] < 0:
            ints = [-c for c in ints]
        return cls(tuple(ints))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def is_zero(self) -> bool:
        return not self.coefficients

    def __call__(self, x) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def __str__(self) -> str:
        if not self.coefficients:
            return "0"
        parts = []
        for d in range(self.degree, -1, -1):
            c = self.coefficients[d]
            if c == 0:
                continue
            mono = "" if d == 0 else ("x" if d == 1 else f"x^{d}")
            coef = str(c) if (d == 0 or abs(c) != 1) else ("-" if c < 0 else "")
            parts.append(coef + ("*" if mono and coef not in ("", "-") else "") + mono)
        return " + ".join(parts).replace("+ -", "- ")


def char_poly(a: QMatrix) -> tuple[IntPoly, Fraction]:
    """Characteristic polynomial via Faddeev-LeVerrier.

    Returns the primitive integer polynomial p and the positive rational
    scale s with det(xI - a) = p(x) / s.
    """
    if not a.is_square():
        raise ValueError("characteristic polynomial of non-square matrix")
    n = a.rows
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    m = QMatrix.zeros(n, n)
    ident = QMatrix.identity(n)
    for k in range(1, n + 1):
        m = a @ m + ident.scale(coeffs[n - k + 1])
        am = a @ m
        coeffs[n - k] = -sum((am[i, i] for i in range(n)), Fraction(0)) / k
    p = IntPoly.from_rational(coeffs)
    return p, Fraction(p.coefficients[-1])


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def _synthetic_div(coeffs: list[Fraction], r: Fraction) -> tuple[list[Fraction], Fraction]:
    """Divide by (x - r); coefficients lowest degree first."""
    hi = coeffs[::-1]
    out = [hi[0]]
    for c in hi[1:]:
        out.append(c + out[-1] * r)
    rem = out.pop()
    return out[::-1], rem


def rational_roots(p: IntPoly) -> tuple[list[tuple[Fraction, int]], bool]:
    """Rational roots with multiplicities, and whether they account for the full degree."""
    if p.is_zero():
        raise ValueError("zero polynomial has no well-defined roots")
    coeffs = [Fraction(c) for c in p.coefficients]
    roots: list[tuple[Fraction, int]] = []
    zero_mult = 0
    while len(coeffs) > 1 and coeffs[0] == 0:
        coeffs = coeffs[1:]
        zero_mult += 1
    if zero_mult:
        roots.append((Fraction(0), zero_mult))
    if len(coeffs) > 1:
        lead, trail = int(coeffs[-1]), int(coeffs[0])
        cands = sorted({Fraction(s * num, den) for num in _divisors(trail) for den in _divisors(lead)
                        for s in (1, -1)})
        for r in cands:
            mult = 0
            while len(coeffs) > 1:
                q, rem = _synthetic_div(coeffs, r)
                if rem != 0:
                    break
                coeffs, mult = q, mult + 1
            if mult:
                roots.append((r, mult))
            if len(coeffs) == 1:
                break
    roots.sort(key=lambda rm: rm[0])
    return roots, sum(m for _, m in roots) == p.degree


def spectrum(a: QMatrix) -> tuple[list[tuple[Fraction, int]], bool]:
    """Rational eigenvalues of a square matrix with algebraic multiplicities."""
    if a.rows == 0:
        return [], True
    return rational_roots(char_poly(a)[0])


def generalized_eigenspace(a: QMatrix, lam, side: str = "right") -> Subspace:
    """null((a - lam I)^n) for side='right'; the left version as row functionals."""
    if not a.is_square():
        raise ValueError("generalized eigenspace of non-square matrix")
    n = a.rows
    shifted = (a - QMatrix.identity(n).scale(lam)).power(n)
    if side == "right":
        return null_space(shifted)
    if side == "left":
        return null_space(shifted.T)
    raise ValueError(f"side must be 'left' or 'right', not {side!r}")


# ---------------------------------------------------------------------------
# closed forms of matrix powers


@dataclass(frozen=True)
class ExpTerm:
    lam: int
    degree: int
    coeffs: tuple[int, ...]


def dominance_key(lam: int, degree: int) -> tuple:
    return (-abs(lam), -degree, 0 if lam >= 0 else 1)


@dataclass(frozen=True)
class ExpPoly:
    """(1/denom) * sum_i lam_i^k k^degree_i (coeffs_i . x), valid for k > validity_threshold."""

    dim: int
    denom: int
    terms: tuple[ExpTerm, ...]
    validity_threshold: int = 0

    def evaluate(self, x: Sequence, k: int) -> Fraction:
        total = sum(t.lam ** k * k ** t.degree * dot(t.coeffs, x) for t in self.terms)
        return Fraction(total, self.denom)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for t in self.terms:
            lin = " + ".join(f"{c}*x{i}" for i, c in enumerate(t.coeffs) if c)
            parts.append(f"{t.lam}^k*k^{t.degree}*({lin})")
        return f"(1/{self.denom})(" + " + ".join(parts) + ")"


def stirling_first(j: int) -> list[int]:
    """Coefficients of the falling factorial k(k-1)...(k-j+1), lowest degree first."""
    poly = [1]
    for i in range(j):
        nxt = [0] * (len(poly) + 1)
        for d, c in enumerate(poly):
            nxt[d + 1] += c
            nxt[d] -= i * c
        poly = nxt
    return poly


def normalize_exp_terms(dim: int, raw: dict[tuple[int, int], list[Fraction]], threshold: int) -> ExpPoly:
    """Clear denominators, drop zero terms and order by dominance."""
    items = [(k, v) for k, v in raw.items() if any(v)]
    q = lcm_denominators(x for _, v in items for x in v)
    ints = [(k, [int(x * q) for x in v]) for k, v in items]
    g = reduce(math.gcd, (c for _, v in ints for c in v), q)
    q //= g
    terms = [ExpTerm(lam, d, tuple(c // g for c in v)) for (lam, d), v in ints]
    terms.sort(key=lambda t: dominance_key(t.lam, t.degree))
    return ExpPoly(dim, q, tuple(terms), threshold)


def nilpotency_index(a: QMatrix) -> int:
    """Least r with null(a^r) = null(a^(r+1)); 0 if a is invertible."""
    n = a.rows
    prev = null_space(QMatrix.identity(n)).dim  # a^0 = I
    r, power = 0, QMatrix.identity(n)
    while True:
        power = power @ a
        cur = null_space(power).dim
        if cur == prev:
            return r
        prev, r = cur, r + 1


def closed_form(c: Sequence, a: QMatrix) -> ExpPoly:
    """Closed form of c^T a^k x as an integer exponential-polynomial.

    Requires a to have integer spectrum.
    """
    if not a.is_square():
        raise ValueError("closed form of non-square matrix")
    n = a.rows
    c = qvec(c)
    if len(c) != n:
        raise ValueError("functional length mismatch")
    if n == 0:
        return ExpPoly(0, 1, (), 0)
    roots, split = spectrum(a)
    if not split or any(r.denominator != 1 for r, _ in roots):
        raise ValueError("closed form requires integer spectrum")
    # decompose c into components in the generalized left eigenspaces
    blocks = []
    for lam, _ in roots:
        space = generalized_eigenspace(a, lam, "left")
        blocks.append((int(lam), space))
    basis = [v for _, sp in blocks for v in sp.basis]
    coords = solve(QMatrix.from_cols(basis, n), c)
    assert coords is not None
    raw: dict[tuple[int, int], list[Fraction]] = {}
    pos = 0
    threshold = 0
    for lam, sp in blocks:
        comp = [Fraction(0)] * n
        for v in sp.basis:
            w = coords[pos]
            pos += 1
            if w:
                comp = [x + w * y for x, y in zip(comp, v)]
        nshift = a - QMatrix.identity(n).scale(lam)
        if lam == 0:
            threshold = max(threshold, nilpotency_index(a))
            continue
        g = tuple(comp)
        j = 0
        while any(g):
            # lam^(k-j) C(k,j) = lam^k * (1/(j! lam^j)) * falling(k, j)
            scale = Fraction(1, math.factorial(j)) / Fraction(lam) ** j
            for d, s in enumerate(stirling_first(j)):
                if s:
                    acc = raw.setdefault((lam, d), [Fraction(0)] * n)
                    for i in range(n):
                        acc[i] += scale * s * g[i]
            g = tuple(dot(g, nshift.col(i)) for i in range(n))
            j += 1
    return normalize_exp_terms(n, raw, threshold)
