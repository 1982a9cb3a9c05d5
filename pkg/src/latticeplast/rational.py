"""Exact rational matrices backed by :class:`fractions.Fraction`."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

RationalVector = tuple  # tuple[Fraction, ...]


def to_fraction(value) -> Fraction:
    """Coerce an int, Fraction or "a/b" string to a Fraction.

    Floats are refused: a binary float silently carries a non-obvious
    rational value.
    """
    if isinstance(value, bool):
        raise TypeError("boolean is not a rational number")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"expected integer or rational string, got {type(value).__name__}")


def fraction_str(x: Fraction) -> str:
    return str(Fraction(x))


def vector(values: Iterable) -> RationalVector:
    return tuple(to_fraction(v) for v in values)


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v) if a and b), Fraction(0))


class RationalMatrix:
    """Immutable dense matrix of Fractions.

    Entries are normalised on construction, so ``==`` is exact.
    """

    __slots__ = ("_rows", "_ncols")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        data = tuple(tuple(to_fraction(v) for v in row) for row in rows)
        if ncols is None:
            if not data:
                raise ValueError("ncols required for a matrix with no rows")
            ncols = len(data[0])
        if any(len(row) != ncols for row in data):
            raise ValueError("ragged rows")
        self._rows = data
        self._ncols = ncols

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "RationalMatrix":
        return cls([[0] * ncols for _ in range(nrows)], ncols)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], nrows: int) -> "RationalMatrix":
        rows = [[col[i] for col in columns] for i in range(nrows)]
        return cls(rows, len(columns))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self._rows), self._ncols

    @property
    def rows(self) -> tuple[tuple[Fraction, ...], ...]:
        return self._rows

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self._rows[i]

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(row[j] for row in self._rows)

    def columns(self) -> list[tuple[Fraction, ...]]:
        return [self.column(j) for j in range(self._ncols)]

    def __getitem__(self, idx):
        i, j = idx
        return self._rows[i][j]

    @property
    def T(self) -> "RationalMatrix":
        return RationalMatrix(self.columns(), len(self._rows))

    def __matmul__(self, other):
        if isinstance(other, RationalMatrix):
            if self._ncols != other.shape[0]:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            cols = other.columns()
            return RationalMatrix(
                [[dot(row, col) for col in cols] for row in self._rows], other.shape[1]
            )
        vec = tuple(other)
        if len(vec) != self._ncols:
            raise ValueError(f"shape mismatch {self.shape} @ ({len(vec)},)")
        return tuple(dot(row, vec) for row in self._rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self) -> int:
        return hash((self._rows, self._ncols))

    def is_zero(self) -> bool:
        return all(v == 0 for row in self._rows for v in row)

    def hstack(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.shape[0] != other.shape[0]:
            raise ValueError("row count mismatch")
        return RationalMatrix(
            [a + b for a, b in zip(self._rows, other.rows)], self._ncols + other.shape[1]
        )

    def rank(self) -> int:
        return rank(self._rows)

    def to_strings(self) -> list[list[str]]:
        return [[fraction_str(v) for v in row] for row in self._rows]

    def to_float(self):
        import numpy as np

        return np.array([[float(v) for v in row] for row in self._rows], dtype=float).reshape(
            self.shape
        )

    def __repr__(self) -> str:
        return f"RationalMatrix({self.to_strings()!r})"


def rank(rows: Sequence[Sequence]) -> int:
    """Rank by exact Gaussian elimination."""
    work = [list(map(Fraction, r)) for r in rows]
    if not work:
        return 0
    ncols = len(work[0])
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(work)) if work[i][c] != 0), None)
        if pivot is None:
            continue
        work[r], work[pivot] = work[pivot], work[r]
        pv = work[r][c]
        for i in range(r + 1, len(work)):
            f = work[i][c]
            if f:
                f /= pv
                work[i] = [a - f * b for a, b in zip(work[i], work[r])]
        r += 1
        if r == len(work):
            break
    return r
