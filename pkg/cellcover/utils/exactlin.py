"""Exact rational and integer linear algebra over ``fractions.Fraction``.

Matrices are immutable; algorithms copy into lists of lists, work in place and
freeze the result. Every transform is returned alongside its normal form so
callers can verify ``U @ A @ V`` themselves.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

from cellcover.errors import InputError
from cellcover.utils.primes import ensure_prime

RationalVector = tuple[Fraction, ...]


def to_rational(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InputError(f"not a rational number: {value!r}")
    try:
        return Fraction(value)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise InputError(f"not a rational number: {value!r}") from exc


def vector(values: Iterable) -> RationalVector:
    return tuple(to_rational(v) for v in values)


def valuation(x: Fraction, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    x = Fraction(x)
    if x == 0:
        raise InputError("valuation of zero is undefined")
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def is_p_integral(values: Iterable[Fraction], p: int) -> bool:
    return all(Fraction(x).denominator % p != 0 for x in values)


def common_denominator(values: Iterable[Fraction]) -> int:
    return lcm(1, *(Fraction(x).denominator for x in values))


@dataclass(frozen=True)
class RationalMatrix:
    rows: int
    cols: int
    entries: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise InputError(f"ragged matrix for declared shape {self.rows}x{self.cols}")

    # ── constructors ─────────────────────────────────────────────

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> RationalMatrix:
        frozen = tuple(vector(r) for r in rows)
        width = len(frozen[0]) if frozen else (cols or 0)
        return cls(len(frozen), width, frozen)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int) -> RationalMatrix:
        columns = [vector(c) for c in columns]
        if any(len(c) != rows for c in columns):
            raise InputError(f"column length differs from {rows}")
        return cls(rows, len(columns), tuple(tuple(c[i] for c in columns) for i in range(rows)))

    @classmethod
    def zero(cls, rows: int, cols: int) -> RationalMatrix:
        return cls(rows, cols, tuple((Fraction(0),) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, n: int) -> RationalMatrix:
        return cls.diagonal([1] * n)

    @classmethod
    def diagonal(cls, values: Sequence) -> RationalMatrix:
        n = len(values)
        return cls(n, n, tuple(
            tuple(to_rational(values[i]) if i == j else Fraction(0) for j in range(n))
            for i in range(n)
        ))

    # ── access ───────────────────────────────────────────────────

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def row(self, i: int) -> RationalVector:
        return self.entries[i]

    def column(self, j: int) -> RationalVector:
        return tuple(r[j] for r in self.entries)

    def columns(self) -> list[RationalVector]:
        return [self.column(j) for j in range(self.cols)]

    def submatrix(self, rows: Sequence[int] | None = None, cols: Sequence[int] | None = None) -> RationalMatrix:
        rows = range(self.rows) if rows is None else rows
        cols = range(self.cols) if cols is None else cols
        return RationalMatrix.from_rows([[self.entries[i][j] for j in cols] for i in rows], cols=len(cols))

    def column_slice(self, start: int, stop: int | None = None) -> RationalMatrix:
        stop = self.cols if stop is None else stop
        return self.submatrix(cols=list(range(start, stop)))

    def to_lists(self) -> list[list[Fraction]]:
        return [list(r) for r in self.entries]

    # ── arithmetic ───────────────────────────────────────────────

    def transpose(self) -> RationalMatrix:
        return RationalMatrix(self.cols, self.rows, tuple(zip(*self.entries)) if self.rows else tuple(() for _ in range(self.cols)))

    @property
    def T(self) -> RationalMatrix:
        return self.transpose()

    def __matmul__(self, other: RationalMatrix) -> RationalMatrix:
        if self.cols != other.rows:
            raise InputError(f"shape mismatch {self.shape} @ {other.shape}")
        other_cols = other.columns()
        return RationalMatrix(self.rows, other.cols, tuple(
            tuple(sum((a * b for a, b in zip(r, c) if a and b), Fraction(0)) for c in other_cols)
            for r in self.entries
        ))

    def apply(self, v: Sequence) -> RationalVector:
        if len(v) != self.cols:
            raise InputError(f"vector of length {len(v)} for a matrix with {self.cols} columns")
        return tuple(sum((a * b for a, b in zip(r, v) if a and b), Fraction(0)) for r in self.entries)

    def __add__(self, other: RationalMatrix) -> RationalMatrix:
        if self.shape != other.shape:
            raise InputError(f"shape mismatch {self.shape} + {other.shape}")
        return RationalMatrix(self.rows, self.cols, tuple(
            tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries)
        ))

    def __neg__(self) -> RationalMatrix:
        return self.scale(-1)

    def __sub__(self, other: RationalMatrix) -> RationalMatrix:
        return self + (-other)

    def scale(self, c) -> RationalMatrix:
        c = to_rational(c)
        return RationalMatrix(self.rows, self.cols, tuple(tuple(c * a for a in r) for r in self.entries))

    def is_zero(self) -> bool:
        return all(a == 0 for r in self.entries for a in r)

    def is_integral(self) -> bool:
        return all(a.denominator == 1 for r in self.entries for a in r)

    def denominator(self) -> int:
        return common_denominator(a for r in self.entries for a in r)

    def flat(self) -> RationalVector:
        """Row-major flattening."""
        return tuple(a for r in self.entries for a in r)


def hstack(*blocks: RationalMatrix, rows: int | None = None) -> RationalMatrix:
    if not blocks:
        return RationalMatrix.zero(rows or 0, 0)
    height = blocks[0].rows
    if any(b.rows != height for b in blocks):
        raise InputError("hstack of blocks with different heights")
    return RationalMatrix(height, sum(b.cols for b in blocks), tuple(
        tuple(a for b in blocks for a in b.entries[i]) for i in range(height)
    ))


def vstack(*blocks: RationalMatrix, cols: int | None = None) -> RationalMatrix:
    if not blocks:
        return RationalMatrix.zero(0, cols or 0)
    width = blocks[0].cols
    if any(b.cols != width for b in blocks):
        raise InputError("vstack of blocks with different widths")
    return RationalMatrix(sum(b.rows for b in blocks), width, tuple(r for b in blocks for r in b.entries))


def block_diagonal(a: RationalMatrix, b: RationalMatrix) -> RationalMatrix:
    top = hstack(a, RationalMatrix.zero(a.rows, b.cols))
    bottom = hstack(RationalMatrix.zero(b.rows, a.cols), b)
    return vstack(top, bottom)


def kron(a: RationalMatrix, b: RationalMatrix) -> RationalMatrix:
    return RationalMatrix(a.rows * b.rows, a.cols * b.cols, tuple(
        tuple(x * y for x in a.entries[i] for y in b.entries[k])
        for i in range(a.rows) for k in range(b.rows)
    ))


def kron_vector(u: Sequence[Fraction], v: Sequence[Fraction]) -> RationalVector:
    return tuple(x * y for x in u for y in v)


# ── row reduction over ℚ ─────────────────────────────────────────


def rref(m: RationalMatrix) -> tuple[RationalMatrix, tuple[int, ...]]:
    """Reduced row echelon form and pivot columns."""
    a = m.to_lists()
    pivots: list[int] = []
    r = 0
    for c in range(m.cols):
        pivot = next((i for i in range(r, m.rows) if a[i][c] != 0), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(m.rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == m.rows:
            break
    return RationalMatrix.from_rows(a, cols=m.cols), tuple(pivots)


def rank(m: RationalMatrix) -> int:
    return len(rref(m)[1])


def nullspace(m: RationalMatrix) -> RationalMatrix:
    """Columns spanning ``{x : m x = 0}``, one per free variable set to 1."""
    reduced, pivots = rref(m)
    free = [c for c in range(m.cols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * m.cols
        x[f] = Fraction(1)
        for i, c in enumerate(pivots):
            x[c] = -reduced.entries[i][f]
        basis.append(x)
    return RationalMatrix.from_columns(basis, m.cols)


def left_nullspace(m: RationalMatrix) -> RationalMatrix:
    """Rows ``y`` with ``y m = 0``."""
    return nullspace(m.transpose()).transpose()


def column_echelon(m: RationalMatrix) -> tuple[RationalMatrix, tuple[int, ...]]:
    """Reduced column echelon basis of the column space and its pivot rows."""
    reduced, pivots = rref(m.transpose())
    basis = reduced.submatrix(rows=list(range(len(pivots))))
    return basis.transpose() if basis.rows else RationalMatrix.zero(m.rows, 0), pivots


def inverse(m: RationalMatrix) -> RationalMatrix:
    if m.rows != m.cols:
        raise InputError(f"cannot invert a {m.rows}x{m.cols} matrix")
    n = m.rows
    reduced, pivots = rref(hstack(m, RationalMatrix.identity(n)))
    if pivots[:n] != tuple(range(n)):
        raise InputError("matrix is singular")
    return reduced.submatrix(cols=list(range(n, 2 * n)))


def determinant(m: RationalMatrix) -> Fraction:
    if m.rows != m.cols:
        raise InputError("determinant of a non-square matrix")
    a = m.to_lists()
    n = m.rows
    det = Fraction(1)
    for c in range(n):
        pivot = next((i for i in range(c, n) if a[i][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            a[c], a[pivot] = a[pivot], a[c]
            det = -det
        det *= a[c][c]
        for i in range(c + 1, n):
            if a[i][c] != 0:
                f = a[i][c] / a[c][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return det


def left_inverse(m: RationalMatrix) -> RationalMatrix:
    """``L`` with ``L m = I`` for ``m`` of full column rank, supported on pivot rows."""
    _, independent_rows = rref(m.transpose())
    if len(independent_rows) != m.cols:
        raise InputError("left inverse needs full column rank")
    square_inv = inverse(m.submatrix(rows=list(independent_rows)))
    out = [[Fraction(0)] * m.rows for _ in range(m.cols)]
    for k, i in enumerate(independent_rows):
        for j in range(m.cols):
            out[j][i] = square_inv.entries[j][k]
    return RationalMatrix.from_rows(out, cols=m.rows)


def complete_basis(m: RationalMatrix) -> RationalMatrix:
    """Standard vectors, in index order, completing the columns of ``m`` to a basis of ℚⁿ."""
    n = m.rows
    current = m
    chosen = []
    r = rank(m)
    for j in range(n):
        if r == n:
            break
        e = tuple(Fraction(int(i == j)) for i in range(n))
        trial = hstack(current, RationalMatrix.from_columns([e], n))
        if rank(trial) > r:
            current, r = trial, r + 1
            chosen.append(e)
    return RationalMatrix.from_columns(chosen, n)


@dataclass(frozen=True)
class LinearSolution:
    particular: RationalVector | None
    kernel: RationalMatrix


def solve_rational(a: RationalMatrix, b: Sequence) -> LinearSolution:
    """Particular solution (free variables zero) and kernel basis of ``a x = b``."""
    b = vector(b)
    if len(b) != a.rows:
        raise InputError("right-hand side length differs from the row count")
    reduced, pivots = rref(hstack(a, RationalMatrix.from_columns([b], a.rows)))
    kernel = nullspace(a)
    if a.cols in pivots:
        return LinearSolution(None, kernel)
    x = [Fraction(0)] * a.cols
    for i, c in enumerate(pivots):
        x[c] = reduced.entries[i][a.cols]
    return LinearSolution(tuple(x), kernel)


# ── integer lattices ─────────────────────────────────────────────


def _integral_lists(m: RationalMatrix) -> list[list[int]]:
    if not m.is_integral():
        raise InputError("integer algorithm given a non-integer matrix")
    return [[int(x) for x in r] for r in m.entries]


def _add_column(a: list[list[int]], target: int, source: int, factor: int) -> None:
    for row in a:
        row[target] += factor * row[source]


def _swap_columns(a: list[list[int]], i: int, j: int) -> None:
    for row in a:
        row[i], row[j] = row[j], row[i]


def hnf(m: RationalMatrix) -> tuple[RationalMatrix, RationalMatrix]:
    """Column Hermite normal form ``H = m U`` with ``U`` unimodular.

    ``H`` is lower staircase with positive pivots; entries left of a pivot lie in
    ``[0, pivot)``; zero columns come last.
    """
    a = _integral_lists(m)
    u = [[int(i == j) for j in range(m.cols)] for i in range(m.cols)]
    k = 0
    for i in range(m.rows):
        if k == m.cols:
            break
        while True:
            nonzero = [j for j in range(k, m.cols) if a[i][j] != 0]
            if not nonzero:
                break
            j0 = min(nonzero, key=lambda j: (abs(a[i][j]), j))
            _swap_columns(a, k, j0)
            _swap_columns(u, k, j0)
            settled = True
            for j in range(k + 1, m.cols):
                if a[i][j]:
                    q = a[i][j] // a[i][k]
                    _add_column(a, j, k, -q)
                    _add_column(u, j, k, -q)
                    settled = settled and a[i][j] == 0
            if settled:
                break
        if a[i][k] == 0:
            continue
        if a[i][k] < 0:
            _add_column(a, k, k, -2)
            _add_column(u, k, k, -2)
        for j in range(k):
            q = a[i][j] // a[i][k]
            if q:
                _add_column(a, j, k, -q)
                _add_column(u, j, k, -q)
        k += 1
    return RationalMatrix.from_rows(a, cols=m.cols), RationalMatrix.from_rows(u, cols=m.cols)


def hnf_rank(h: RationalMatrix) -> int:
    return sum(1 for c in h.columns() if any(c))


def integer_kernel(m: RationalMatrix) -> RationalMatrix:
    """ℤ-basis of ``{x ∈ ℤⁿ : m x = 0}`` for rational ``m``."""
    scaled = RationalMatrix.from_rows(
        [[x * common_denominator(r) for x in r] for r in m.entries], cols=m.cols
    )
    h, u = hnf(scaled)
    return u.column_slice(hnf_rank(h))


def lattice_basis(m: RationalMatrix) -> RationalMatrix:
    """Canonical (HNF) basis of the ℤ-span of the rational columns of ``m``."""
    d = m.denominator()
    h, _ = hnf(m.scale(d))
    return h.column_slice(0, hnf_rank(h)).scale(Fraction(1, d))


def solve_integer(a: RationalMatrix, b: Sequence) -> RationalVector | None:
    """An integer ``x`` with ``a x = b``, or None when none exists."""
    b = vector(b)
    d = common_denominator([*a.flat(), *b])
    h, u = hnf(a.scale(d))
    target = [x * d for x in b]
    r = hnf_rank(h)
    y = [Fraction(0)] * a.cols
    k = 0
    for i in range(a.rows):
        if k == r:
            break
        if h.entries[i][k] == 0:
            continue
        rest = target[i] - sum((h.entries[i][j] * y[j] for j in range(k)), Fraction(0))
        q = rest / h.entries[i][k]
        if q.denominator != 1:
            return None
        y[k] = q
        k += 1
    if h.apply(y) != tuple(target):
        return None
    return u.apply(y)


def functional_lattice(f: RationalMatrix) -> RationalMatrix:
    """ℤ-basis of ``{t : f t ∈ ℤᵏ}`` for ``f`` injective."""
    annihilator = left_nullspace(f)
    if annihilator.rows == 0:
        integral_image = RationalMatrix.identity(f.rows)
    else:
        integral_image = integer_kernel(annihilator)
    return lattice_basis(left_inverse(f) @ integral_image)


# ── p-local forms ────────────────────────────────────────────────


@dataclass(frozen=True)
class LocalSmithForm:
    """``left_transform @ A @ right_transform == [diag(p^e) | 0]`` over ℤ_(p)."""
    prime: int
    exponents: tuple[int, ...]
    left_transform: RationalMatrix
    right_transform: RationalMatrix

    @property
    def rank(self) -> int:
        return len(self.exponents)

    def diagonal(self) -> RationalMatrix:
        return RationalMatrix.diagonal([Fraction(self.prime) ** e for e in self.exponents])


def local_snf(m: RationalMatrix, p: int) -> LocalSmithForm:
    """Smith form over the localization ℤ_(p); exponents are nondecreasing and may be negative."""
    ensure_prime(p)
    a = m.to_lists()
    left = RationalMatrix.identity(m.rows).to_lists()
    right = RationalMatrix.identity(m.cols).to_lists()
    exponents: list[int] = []
    for t in range(min(m.rows, m.cols)):
        best = None
        for i in range(t, m.rows):
            for j in range(t, m.cols):
                if a[i][j] != 0:
                    key = (valuation(a[i][j], p), i, j)
                    if best is None or key < best:
                        best = key
        if best is None:
            break
        v, i, j = best
        a[t], a[i] = a[i], a[t]
        left[t], left[i] = left[i], left[t]
        for row in a:
            row[t], row[j] = row[j], row[t]
        for row in right:
            row[t], row[j] = row[j], row[t]
        unit = Fraction(p) ** v / a[t][t]
        a[t] = [x * unit for x in a[t]]
        left[t] = [x * unit for x in left[t]]
        pivot = a[t][t]
        for i in range(m.rows):
            if i != t and a[i][t] != 0:
                f = a[i][t] / pivot
                a[i] = [x - f * y for x, y in zip(a[i], a[t])]
                left[i] = [x - f * y for x, y in zip(left[i], left[t])]
        for j in range(m.cols):
            if j != t and a[t][j] != 0:
                f = a[t][j] / pivot
                for row in a:
                    row[j] -= f * row[t]
                for row in right:
                    row[j] -= f * row[t]
        exponents.append(v)
    return LocalSmithForm(
        p,
        tuple(exponents),
        RationalMatrix.from_rows(left, cols=m.rows),
        RationalMatrix.from_rows(right, cols=m.cols),
    )


def local_column_basis(m: RationalMatrix, p: int) -> RationalMatrix:
    """Echelon ℤ_(p)-basis of the module spanned by the columns of ``m``."""
    remaining = [list(c) for c in m.columns() if any(c)]
    basis = []
    for i in range(m.rows):
        candidates = [k for k, c in enumerate(remaining) if c[i] != 0]
        if not candidates:
            continue
        k0 = min(candidates, key=lambda k: (valuation(remaining[k][i], p), k))
        pivot = remaining.pop(k0)
        unit = Fraction(p) ** valuation(pivot[i], p) / pivot[i]
        pivot = [x * unit for x in pivot]
        for c in remaining:
            if c[i] != 0:
                f = c[i] / pivot[i]
                c[:] = [x - f * y for x, y in zip(c, pivot)]
        remaining = [c for c in remaining if any(c)]
        basis.append(pivot)
    return RationalMatrix.from_columns(basis, m.rows)
