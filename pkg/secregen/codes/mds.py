"""Systematic Reed-Solomon (MDS) code: parity encoding and erasure decoding.

Codeword position i evaluates the message polynomial at field element i;
positions ``0..k_code-1`` are systematic and carry the message verbatim.
Both the parity block of the generator and the erasure decoder are Lagrange
interpolation matrices, built in closed (Cauchy-like) form.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass

import numpy as np
from cachetools import LRUCache, cached

from ..core.errors import ValidationError, VerificationError
from .field import FieldMatrix, FieldSpec, rank

logger = logging.getLogger(__name__)


class MdsError(ValidationError):
    """Invalid code parameters or codeword input."""


class InsufficientSymbolsError(MdsError):
    """Fewer than k_code codeword symbols were supplied."""


class CorruptSymbolsError(VerificationError):
    """Supplied codeword symbols are not consistent with any codeword."""


@dataclass(frozen=True, slots=True)
class MdsCode:
    """An (n_code, k_code) systematic RS code over ``field``."""

    field: FieldSpec
    n_code: int
    k_code: int

    def __post_init__(self) -> None:
        if not 1 <= self.k_code <= self.n_code:
            raise MdsError(f"need 1 <= k_code <= n_code, got ({self.n_code}, {self.k_code})")
        if self.field.order < self.n_code:
            raise MdsError(f"{self.field} has fewer than {self.n_code} distinct evaluation points")

    @classmethod
    def doubled(cls, field: FieldSpec, k_code: int) -> MdsCode:
        """The (2k, k) shape used by the layered construction."""
        return cls(field, 2 * k_code, k_code)

    @property
    def evaluation_points(self) -> np.ndarray:
        return np.arange(self.n_code, dtype=np.int64)

    @property
    def parity_positions(self) -> range:
        return range(self.k_code, self.n_code)


def _interpolation_matrix(field: FieldSpec, src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """M with ``M[j, s] = L_s(dst[j])`` for the Lagrange basis on the points *src*."""
    diff_src = field.sub(src[:, None], src[None, :])
    np.fill_diagonal(diff_src, 1)
    weights = field.inv(field.prod(diff_src, axis=1))

    diff = field.sub(dst[:, None], src[None, :])
    hits = diff == 0
    node_poly = field.prod(diff, axis=1)
    out = field.mul(field.mul(node_poly[:, None], weights[None, :]), field.inv(np.where(hits, 1, diff)))
    # dst coincides with a source point: the basis row is an indicator.
    hit_rows, hit_cols = np.nonzero(hits)
    out[hit_rows, :] = 0
    out[hit_rows, hit_cols] = 1
    return out


@cached(cache=LRUCache(maxsize=8))
def _parity_block(code: MdsCode) -> np.ndarray:
    points = code.evaluation_points
    block = _interpolation_matrix(code.field, points[: code.k_code], points[code.k_code :])
    block.setflags(write=False)
    logger.debug("Built %dx%d parity block over %s", *block.shape, code.field)
    return block


@cached(cache=LRUCache(maxsize=64))
def _decode_block(code: MdsCode, basis: tuple[int, ...]) -> np.ndarray:
    points = code.evaluation_points
    block = _interpolation_matrix(code.field, points[list(basis)], points[: code.k_code])
    block.setflags(write=False)
    return block


def parity_matrix(code: MdsCode) -> FieldMatrix:
    """The (n_code - k_code) x k_code non-systematic rows of the generator."""
    return FieldMatrix(code.field, _parity_block(code))


def generator_matrix(code: MdsCode) -> FieldMatrix:
    """n_code x k_code generator G with ``codeword = G @ message``; top block is the identity."""
    return FieldMatrix.identity(code.field, code.k_code).vstack(parity_matrix(code))


def _generator_rows(code: MdsCode, positions: Iterable[int]) -> np.ndarray:
    positions = list(positions)
    rows = np.zeros((len(positions), code.k_code), dtype=np.int64)
    block = _parity_block(code)
    for i, pos in enumerate(positions):
        if pos < code.k_code:
            rows[i, pos] = 1
        else:
            rows[i] = block[pos - code.k_code]
    return rows


def _check_message(code: MdsCode, message) -> np.ndarray:
    message = code.field.array(message)
    if message.shape != (code.k_code,):
        raise MdsError(f"message must have {code.k_code} symbols, got shape {message.shape}")
    return message


def encode_parities(code: MdsCode, message) -> np.ndarray:
    """Non-systematic codeword symbols of *message* (positions k_code..n_code-1)."""
    return code.field.matvec(_parity_block(code), _check_message(code, message))


def encode(code: MdsCode, message) -> np.ndarray:
    """Full codeword: the message followed by its parities."""
    message = _check_message(code, message)
    return np.concatenate([message, encode_parities(code, message)])


def erasure_decode(code: MdsCode, known: Mapping[int, int] | Iterable[tuple[int, int]]) -> np.ndarray:
    """Recover the message from any k_code or more codeword symbols.

    The first k_code positions (in increasing order) determine the message;
    any further symbols are checked against the re-encoded codeword.

    Raises:
        InsufficientSymbolsError: fewer than k_code distinct positions.
        CorruptSymbolsError: the extra symbols disagree with the decoded codeword.
    """
    pairs = list(known.items()) if isinstance(known, Mapping) else list(known)
    symbols: dict[int, int] = {}
    for pos, value in pairs:
        pos = int(pos)
        if not 0 <= pos < code.n_code:
            raise MdsError(f"position {pos} outside codeword of length {code.n_code}")
        if pos in symbols:
            raise MdsError(f"position {pos} given more than once")
        symbols[pos] = int(value)
    if len(symbols) < code.k_code:
        raise InsufficientSymbolsError(f"insufficient symbols: {len(symbols)} < {code.k_code}")

    positions = sorted(symbols)
    basis = tuple(positions[: code.k_code])
    values = code.field.array([symbols[p] for p in basis])
    message = code.field.matvec(_decode_block(code, basis), values)

    extra = positions[code.k_code :]
    if extra:
        expected = code.field.matvec(_generator_rows(code, extra), message)
        got = code.field.array([symbols[p] for p in extra])
        bad = [pos for pos, e, g in zip(extra, expected, got) if e != g]
        if bad:
            raise CorruptSymbolsError(f"corrupt symbols: positions {bad} disagree with the decoded codeword")
    return message


def decode_blocks(code: MdsCode, positions: Iterable[int], values) -> np.ndarray:
    """Decode many codewords erased the same way; row b of *values* holds codeword b at *positions*.

    *positions* must be exactly k_code distinct positions in increasing order.
    """
    basis = tuple(int(p) for p in positions)
    if len(basis) != code.k_code or list(basis) != sorted(set(basis)):
        raise MdsError(f"need {code.k_code} distinct increasing positions, got {len(basis)}")
    if basis[0] < 0 or basis[-1] >= code.n_code:
        raise MdsError(f"positions outside codeword of length {code.n_code}")
    values = code.field.array(values)
    if values.ndim != 2 or values.shape[1] != code.k_code:
        raise MdsError(f"values must be (blocks, {code.k_code}), got shape {values.shape}")
    return code.field.matmul(values, _decode_block(code, basis).T)


def is_mds_subset(code: MdsCode, positions: Iterable[int]) -> bool:
    """True when the generator rows at *positions* have full rank k_code."""
    rows = FieldMatrix(code.field, _generator_rows(code, positions))
    return rank(rows) == code.k_code
