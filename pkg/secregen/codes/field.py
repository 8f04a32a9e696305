"""Finite-field arithmetic over GF(q) and dense linear algebra on top of it.

Binary extension fields GF(2^m), 1 <= m <= 16, multiply through one
log/antilog table built from the fixed polynomial table below, so products
are bit-exact across runs and machines. Prime fields GF(p) use plain modular
arithmetic.

Vectors and matrices are numpy ``int64`` arrays holding element values.
``FieldElement`` and ``FieldMatrix`` wrap them together with their field for
the public API; the element-wise kernels on ``FieldSpec`` are what the MDS
layer and the secrecy analyzer run on.
"""

from __future__ import annotations

import logging
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import StrEnum

import numpy as np
from cachetools import LRUCache, cached

from ..core.errors import ValidationError

logger = logging.getLogger(__name__)

# Bit i is the coefficient of x^i. Every entry is primitive, so x generates
# the multiplicative group and a single log/antilog pair covers the field.
IRREDUCIBLE_POLYS: dict[int, int] = {
    1: 0x3,  # x + 1
    2: 0x7,  # x^2 + x + 1
    3: 0xB,  # x^3 + x + 1
    4: 0x13,  # x^4 + x + 1
    5: 0x25,  # x^5 + x^2 + 1
    6: 0x43,  # x^6 + x + 1
    7: 0x89,  # x^7 + x^3 + 1
    8: 0x11D,  # x^8 + x^4 + x^3 + x^2 + 1
    9: 0x211,  # x^9 + x^4 + 1
    10: 0x409,  # x^10 + x^3 + 1
    11: 0x805,  # x^11 + x^2 + 1
    12: 0x1053,  # x^12 + x^6 + x^4 + x + 1
    13: 0x201B,  # x^13 + x^4 + x^3 + x + 1
    14: 0x4443,  # x^14 + x^10 + x^6 + x + 1
    15: 0x8003,  # x^15 + x + 1
    16: 0x1100B,  # x^16 + x^12 + x^3 + x + 1
}

# Products of two reduced elements must fit in int64.
MAX_PRIME = 2**31 - 1

_SPEC_RE = re.compile(r"^\s*(?:GF\(\s*)?(\d+)\s*(?:\^\s*(\d+))?\s*\)?\s*$", re.IGNORECASE)


# ── Errors ─────────────────────────────────────────────────────────


class FieldError(ValidationError):
    """Invalid field, element or matrix."""


class MixedFieldError(FieldError):
    """Operands belong to different fields."""


class ZeroInverseError(FieldError, ZeroDivisionError):
    """Inversion of the zero element."""


class NoSolutionError(FieldError):
    """Linear system is inconsistent."""


class UnderdeterminedError(FieldError):
    """Linear system is consistent but has more than one solution."""


class SingularMatrixError(FieldError):
    """Square matrix has no inverse."""


# ── Field description ──────────────────────────────────────────────


class FieldKind(StrEnum):
    BINARY = "binary"
    PRIME = "prime"


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    i = 3
    while i * i <= p:
        if p % i == 0:
            return False
        i += 2
    return True


@cached(cache=LRUCache(maxsize=16))
def _binary_tables(m: int) -> tuple[np.ndarray, np.ndarray]:
    """Antilog (doubled, so index sums need no reduction) and log tables for GF(2^m)."""
    order = 1 << m
    poly = IRREDUCIBLE_POLYS[m]
    exp = np.zeros(2 * (order - 1), dtype=np.int64)
    log = np.zeros(order, dtype=np.int64)
    x = 1
    for i in range(order - 1):
        exp[i] = x
        log[x] = i
        x <<= 1
        if x & order:
            x ^= poly
    if x != 1 or len(set(exp[: order - 1].tolist())) != order - 1:
        raise FieldError(f"polynomial {poly:#x} is not primitive for GF(2^{m})")
    exp[order - 1 :] = exp[: order - 1]
    exp.setflags(write=False)
    log.setflags(write=False)
    logger.debug("Built log/antilog tables for GF(2^%d)", m)
    return exp, log


def _pow_mod(base: np.ndarray, exponent: int, modulus: int) -> np.ndarray:
    result = np.ones_like(base)
    base = base % modulus
    while exponent:
        if exponent & 1:
            result = (result * base) % modulus
        base = (base * base) % modulus
        exponent >>= 1
    return result


def _as_array(values) -> np.ndarray:
    return np.asarray(values, dtype=np.int64)


@dataclass(frozen=True, slots=True)
class FieldSpec:
    """A finite field GF(q): either GF(2^m) or GF(p).

    The element-wise kernels accept scalars or numpy arrays of element values
    (broadcasting as numpy does) and return ``int64`` arrays.
    """

    kind: FieldKind
    order: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", FieldKind(self.kind))
        if self.order < 2:
            raise FieldError(f"field order must be >= 2, got {self.order}")
        if self.kind is FieldKind.BINARY:
            m = self.order.bit_length() - 1
            if self.order != 1 << m or m not in IRREDUCIBLE_POLYS:
                raise FieldError(f"binary field order must be 2^m with 1 <= m <= 16, got {self.order}")
        elif not _is_prime(self.order) or self.order > MAX_PRIME:
            raise FieldError(f"prime field order must be a prime <= {MAX_PRIME}, got {self.order}")

    # --- Constructors ---

    @classmethod
    def binary(cls, m: int) -> FieldSpec:
        if m not in IRREDUCIBLE_POLYS:
            raise FieldError(f"binary extension degree must be in 1..16, got {m}")
        return cls(FieldKind.BINARY, 1 << m)

    @classmethod
    def prime(cls, p: int) -> FieldSpec:
        return cls(FieldKind.PRIME, p)

    @classmethod
    def parse(cls, text: str | int) -> FieldSpec:
        """Parse ``"2^16"``, ``"GF(2^16)"``, ``"65536"``, ``"7"`` or ``"GF(7)"``."""
        match = _SPEC_RE.match(str(text))
        if match is None:
            raise FieldError(f"unrecognised field spec {text!r}")
        base, exponent = int(match.group(1)), match.group(2)
        if exponent is not None:
            m = int(exponent)
            if base == 2:
                return cls.binary(m)
            if m == 1:
                return cls.prime(base)
            raise FieldError(f"only GF(2^m) extension fields are supported, got {text!r}")
        if base > 2 and base & (base - 1) == 0:
            return cls.binary(base.bit_length() - 1)
        return cls.prime(base)

    # --- Properties ---

    @property
    def degree(self) -> int:
        return self.order.bit_length() - 1 if self.kind is FieldKind.BINARY else 1

    @property
    def characteristic(self) -> int:
        return 2 if self.kind is FieldKind.BINARY else self.order

    def __str__(self) -> str:
        if self.kind is FieldKind.BINARY:
            return f"GF(2^{self.degree})"
        return f"GF({self.order})"

    # --- Element-wise kernels ---

    def array(self, values) -> np.ndarray:
        """Validate *values* as elements of this field and return them as int64."""
        arr = np.array(values, dtype=np.int64)
        if arr.size and (arr.min() < 0 or arr.max() >= self.order):
            raise FieldError(f"values out of range for {self}")
        return arr

    def add(self, a, b) -> np.ndarray:
        a, b = _as_array(a), _as_array(b)
        if self.kind is FieldKind.BINARY:
            return np.bitwise_xor(a, b)
        return (a + b) % self.order

    def sub(self, a, b) -> np.ndarray:
        a, b = _as_array(a), _as_array(b)
        if self.kind is FieldKind.BINARY:
            return np.bitwise_xor(a, b)
        return (a - b) % self.order

    def neg(self, a) -> np.ndarray:
        a = _as_array(a)
        if self.kind is FieldKind.BINARY:
            return a.copy()
        return (-a) % self.order

    def mul(self, a, b) -> np.ndarray:
        a, b = _as_array(a), _as_array(b)
        if self.kind is FieldKind.BINARY:
            exp, log = _binary_tables(self.degree)
            return np.where((a == 0) | (b == 0), 0, exp[log[a] + log[b]])
        return (a * b) % self.order

    def inv(self, a) -> np.ndarray:
        a = _as_array(a)
        if np.any(a == 0):
            raise ZeroInverseError("no inverse of zero")
        if self.kind is FieldKind.BINARY:
            exp, log = _binary_tables(self.degree)
            return np.asarray(exp[self.order - 1 - log[a]])
        return _pow_mod(a, self.order - 2, self.order)

    def div(self, a, b) -> np.ndarray:
        return self.mul(a, self.inv(b))

    def sum(self, a, axis: int = 0) -> np.ndarray:
        a = _as_array(a)
        if self.kind is FieldKind.BINARY:
            return np.bitwise_xor.reduce(a, axis=axis)
        return a.sum(axis=axis) % self.order

    def prod(self, a, axis: int = 0) -> np.ndarray:
        a = _as_array(a)
        if self.kind is FieldKind.BINARY:
            exp, log = _binary_tables(self.degree)
            logs = log[a].sum(axis=axis) % (self.order - 1)
            return np.where(np.any(a == 0, axis=axis), 0, exp[logs])
        out = np.ones(tuple(np.delete(a.shape, axis)), dtype=np.int64)
        for part in np.moveaxis(a, axis, 0):
            out = (out * part) % self.order
        return out

    def matvec(self, matrix, vector) -> np.ndarray:
        """``matrix @ vector`` over the field."""
        matrix, vector = _as_array(matrix), _as_array(vector)
        if matrix.shape[1] != vector.shape[0]:
            raise FieldError(f"shape mismatch: {matrix.shape} @ {vector.shape}")
        if matrix.shape[0] == 0 or matrix.shape[1] == 0:
            return np.zeros(matrix.shape[0], dtype=np.int64)
        return self.sum(self.mul(matrix, vector[None, :]), axis=1)

    def matmul(self, left, right) -> np.ndarray:
        """``left @ right`` over the field, accumulated one inner index at a time."""
        left, right = _as_array(left), _as_array(right)
        if left.shape[1] != right.shape[0]:
            raise FieldError(f"shape mismatch: {left.shape} @ {right.shape}")
        acc = np.zeros((left.shape[0], right.shape[1]), dtype=np.int64)
        for k in range(left.shape[1]):
            acc = self.add(acc, self.mul(left[:, k : k + 1], right[k : k + 1, :]))
        return acc

    def random(self, shape, rng: np.random.Generator) -> np.ndarray:
        """Uniform field elements."""
        return rng.integers(0, self.order, size=shape, dtype=np.int64)


DEFAULT_FIELD = FieldSpec.binary(16)


# ── Scalars ────────────────────────────────────────────────────────


@dataclass(frozen=True, slots=True)
class FieldElement:
    """One element of a field; arithmetic refuses to mix fields."""

    field: FieldSpec
    value: int

    def __post_init__(self) -> None:
        value = int(self.value)
        if not 0 <= value < self.field.order:
            raise FieldError(f"{value} is not an element of {self.field}")
        object.__setattr__(self, "value", value)

    def _same_field(self, other: FieldElement) -> None:
        if not isinstance(other, FieldElement):
            raise TypeError(f"expected FieldElement, got {type(other).__name__}")
        if other.field != self.field:
            raise MixedFieldError(f"cannot combine {self.field} and {other.field} elements")

    def _wrap(self, raw) -> FieldElement:
        return FieldElement(self.field, int(raw))

    def __add__(self, other: FieldElement) -> FieldElement:
        self._same_field(other)
        return self._wrap(self.field.add(self.value, other.value))

    def __sub__(self, other: FieldElement) -> FieldElement:
        self._same_field(other)
        return self._wrap(self.field.sub(self.value, other.value))

    def __mul__(self, other: FieldElement) -> FieldElement:
        self._same_field(other)
        return self._wrap(self.field.mul(self.value, other.value))

    def __truediv__(self, other: FieldElement) -> FieldElement:
        self._same_field(other)
        return self._wrap(self.field.div(self.value, other.value))

    def __neg__(self) -> FieldElement:
        return self._wrap(self.field.neg(self.value))

    def __int__(self) -> int:
        return self.value

    def inverse(self) -> FieldElement:
        return self._wrap(self.field.inv(self.value))

    @property
    def is_zero(self) -> bool:
        return self.value == 0


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def inv(a: FieldElement) -> FieldElement:
    return a.inverse()


# ── Matrices ───────────────────────────────────────────────────────


@dataclass(frozen=True, eq=False)
class FieldMatrix:
    """Dense immutable matrix over a field, row-major ``int64`` entries."""

    field: FieldSpec
    entries: np.ndarray

    def __post_init__(self) -> None:
        arr = self.field.array(self.entries)
        if arr.ndim != 2:
            raise FieldError(f"matrix entries must be 2-D, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @classmethod
    def from_rows(cls, field: FieldSpec, rows: Sequence[Sequence[int]], cols: int | None = None) -> FieldMatrix:
        if not rows:
            return cls.zeros(field, 0, cols or 0)
        return cls(field, np.array([list(r) for r in rows], dtype=np.int64))

    @classmethod
    def zeros(cls, field: FieldSpec, rows: int, cols: int) -> FieldMatrix:
        return cls(field, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, field: FieldSpec, size: int) -> FieldMatrix:
        return cls(field, np.eye(size, dtype=np.int64))

    @classmethod
    def random(cls, field: FieldSpec, rows: int, cols: int, rng: np.random.Generator) -> FieldMatrix:
        return cls(field, field.random((rows, cols), rng))

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FieldMatrix):
            return NotImplemented
        return self.field == other.field and np.array_equal(self.entries, other.entries)

    def __repr__(self) -> str:
        return f"FieldMatrix({self.field}, {self.rows}x{self.cols})"

    def _same_field(self, other: FieldMatrix) -> None:
        if other.field != self.field:
            raise MixedFieldError(f"cannot combine {self.field} and {other.field} matrices")

    def transpose(self) -> FieldMatrix:
        return FieldMatrix(self.field, self.entries.T)

    def hstack(self, other: FieldMatrix) -> FieldMatrix:
        self._same_field(other)
        return FieldMatrix(self.field, np.hstack([self.entries, other.entries]))

    def vstack(self, other: FieldMatrix) -> FieldMatrix:
        self._same_field(other)
        return FieldMatrix(self.field, np.vstack([self.entries, other.entries]))

    def take_rows(self, indices: Iterable[int]) -> FieldMatrix:
        idx = np.fromiter(indices, dtype=np.int64)
        return FieldMatrix(self.field, self.entries[idx].reshape(len(idx), self.cols))

    def take_cols(self, indices: Iterable[int]) -> FieldMatrix:
        idx = np.fromiter(indices, dtype=np.int64)
        return FieldMatrix(self.field, self.entries[:, idx].reshape(self.rows, len(idx)))

    def apply(self, vector) -> np.ndarray:
        """``self @ vector`` for a vector of element values."""
        return self.field.matvec(self.entries, self.field.array(vector))

    def __matmul__(self, other: FieldMatrix) -> FieldMatrix:
        if not isinstance(other, FieldMatrix):
            return NotImplemented
        self._same_field(other)
        return FieldMatrix(self.field, self.field.matmul(self.entries, other.entries))


# ── Elimination ────────────────────────────────────────────────────


def _row_echelon(field: FieldSpec, work: np.ndarray, *, reduced: bool) -> list[tuple[int, int]]:
    """Gaussian elimination in place with first-nonzero pivoting.

    Pivot rows are scaled to a leading 1. With ``reduced`` the pivot columns
    are cleared above the pivot as well. Returns the (row, col) pivots.
    """
    rows, cols = work.shape
    pivots: list[tuple[int, int]] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nonzero = np.flatnonzero(work[r:, c])
        if nonzero.size == 0:
            continue
        p = r + int(nonzero[0])
        if p != r:
            work[[r, p]] = work[[p, r]]
        work[r, c:] = field.mul(work[r, c:], field.inv(work[r, c]))
        targets = np.flatnonzero(work[:, c])
        targets = targets[targets != r] if reduced else targets[targets > r]
        if targets.size:
            factors = work[targets, c]
            work[targets, c:] = field.sub(work[targets, c:], field.mul(factors[:, None], work[r, c:][None, :]))
        pivots.append((r, c))
        r += 1
    return pivots


def rank(matrix: FieldMatrix) -> int:
    """Row rank by Gaussian elimination; deterministic."""
    if matrix.rows == 0 or matrix.cols == 0:
        return 0
    work = matrix.entries.copy()
    return len(_row_echelon(matrix.field, work, reduced=False))


def rank_split(left: FieldMatrix, right: FieldMatrix) -> tuple[int, int]:
    """``(rank(left), rank([left | right]))`` with the left columns eliminated first.

    Pivots that land in the left block count towards both ranks. A left block
    of full row rank already fixes the joint rank, and the right block is
    never touched.
    """
    if left.field != right.field:
        raise MixedFieldError(f"cannot combine {left.field} and {right.field} matrices")
    if left.rows != right.rows:
        raise FieldError(f"row mismatch: {left.rows} vs {right.rows}")
    if left.rows == 0:
        return 0, 0
    left_rank = rank(left)
    if left_rank == left.rows or right.cols == 0:
        return left_rank, left_rank
    work = np.hstack([left.entries, right.entries])
    return left_rank, len(_row_echelon(left.field, work, reduced=False))


def solve(matrix: FieldMatrix, y) -> np.ndarray:
    """Return x with ``matrix @ x == y``.

    Raises:
        NoSolutionError: y is outside the column space.
        UnderdeterminedError: the system is consistent but ``matrix`` lacks full column rank.
    """
    field = matrix.field
    y = field.array(y)
    if y.shape != (matrix.rows,):
        raise FieldError(f"right-hand side has shape {y.shape}, expected ({matrix.rows},)")
    work = np.hstack([matrix.entries, y[:, None]])
    pivots = _row_echelon(field, work, reduced=True)
    if any(c == matrix.cols for _, c in pivots):
        raise NoSolutionError("no solution: right-hand side is not in the column space")
    if len(pivots) < matrix.cols:
        raise UnderdeterminedError(
            f"underdetermined: rank {len(pivots)} < {matrix.cols} unknowns",
        )
    x = np.zeros(matrix.cols, dtype=np.int64)
    for r, c in pivots:
        x[c] = work[r, -1]
    return x


def inverse(matrix: FieldMatrix) -> FieldMatrix:
    if matrix.rows != matrix.cols:
        raise FieldError(f"only square matrices have inverses, got {matrix.rows}x{matrix.cols}")
    size = matrix.rows
    work = np.hstack([matrix.entries, np.eye(size, dtype=np.int64)])
    pivots = _row_echelon(matrix.field, work, reduced=True)
    if len(pivots) < size or pivots[-1][1] >= size:
        raise SingularMatrixError(f"matrix is singular (rank {sum(c < size for _, c in pivots)} < {size})")
    return FieldMatrix(matrix.field, work[:, size:])
