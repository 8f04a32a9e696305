"""Binary share-file codec.

Layout (little-endian)::

    magic "RGC1" | version u8 | n u16 | ell u16 | t u16 | field kind u8 | field order u32
    | node u16 | payload symbol count u32 | message length u64 | padding u8 | payload

Field kind 0 is GF(2^m), 1 is a prime field. Payload symbols are 1 byte each
over GF(2^8) and 2 bytes each over GF(2^16); the payload is ``blocks x alpha``
symbols in block-major order. The padding byte holds the zero-padding length
of the last block modulo 256.
"""

from __future__ import annotations

import logging
import struct
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from ..codes.field import FieldError, FieldKind, FieldSpec
from ..codes.layered import CodeParams, derive_dimensions
from ..core.errors import ValidationError
from ..core.persistence import bytes_save_atomic

logger = logging.getLogger(__name__)

MAGIC = b"RGC1"
FORMAT_VERSION = 1
SHARE_SUFFIX = ".rgc"

_HEADER = struct.Struct("<4sBHHHBIHIQB")
HEADER_SIZE = _HEADER.size

_KIND_CODES = {FieldKind.BINARY: 0, FieldKind.PRIME: 1}
_CODE_KINDS = {code: kind for kind, code in _KIND_CODES.items()}


class ShareFormatError(ValidationError):
    """Bytes that are not a well-formed share file."""


class IncompatibleSharesError(ValidationError):
    """Share files that do not come from the same encode run."""


def symbol_width(field: FieldSpec) -> int:
    """Bytes per stored symbol; share files carry GF(2^8) or GF(2^16) only."""
    if field.kind is not FieldKind.BINARY or field.degree not in (8, 16):
        raise ShareFormatError(f"share files need GF(2^8) or GF(2^16), got {field}")
    return field.degree // 8


def symbol_dtype(field: FieldSpec) -> np.dtype:
    return np.dtype("<u2") if symbol_width(field) == 2 else np.dtype("u1")


def share_filename(node: int) -> str:
    return f"share-{node:02d}{SHARE_SUFFIX}"


@dataclass(frozen=True, slots=True)
class ShareHeader:
    n: int
    ell: int
    t: int
    field: FieldSpec
    node: int
    symbol_count: int
    message_length: int
    padding: int
    version: int = FORMAT_VERSION

    def pack(self) -> bytes:
        return _HEADER.pack(
            MAGIC,
            self.version,
            self.n,
            self.ell,
            self.t,
            _KIND_CODES[self.field.kind],
            self.field.order,
            self.node,
            self.symbol_count,
            self.message_length,
            self.padding % 256,
        )

    @classmethod
    def unpack(cls, data: bytes) -> ShareHeader:
        if len(data) < HEADER_SIZE:
            raise ShareFormatError(f"truncated header: {len(data)} < {HEADER_SIZE} bytes")
        magic, version, n, ell, t, kind, order, node, count, length, padding = _HEADER.unpack_from(data)
        if magic != MAGIC:
            raise ShareFormatError(f"bad magic {magic!r}")
        if version != FORMAT_VERSION:
            raise ShareFormatError(f"unsupported share format version {version}")
        if kind not in _CODE_KINDS:
            raise ShareFormatError(f"unknown field kind {kind}")
        try:
            if _CODE_KINDS[kind] is FieldKind.BINARY:
                field = FieldSpec.binary(order.bit_length() - 1)
            else:
                field = FieldSpec.prime(order)
        except FieldError as exc:
            raise ShareFormatError(f"bad field in header: {exc}") from exc
        if field.order != order:
            raise ShareFormatError(f"field order {order} is not a power of two")
        return cls(n, ell, t, field, node, count, length, padding, version)

    def params(self) -> CodeParams:
        return CodeParams(self.n, self.ell, self.t, self.field)

    def run_key(self) -> ShareHeader:
        """Everything but the node id; equal across the shares of one encode run."""
        return replace(self, node=0)

    @property
    def blocks(self) -> int:
        return self.symbol_count // derive_dimensions(self.params()).alpha


@dataclass(frozen=True)
class ShareFile:
    header: ShareHeader
    payload: np.ndarray  # (blocks, alpha) int64

    def to_bytes(self) -> bytes:
        payload = np.ascontiguousarray(self.payload, dtype=np.int64).astype(symbol_dtype(self.header.field))
        return self.header.pack() + payload.tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> ShareFile:
        header = ShareHeader.unpack(data)
        params = header.params()
        params.check_node(header.node)
        alpha = derive_dimensions(params).alpha
        dtype = symbol_dtype(header.field)
        body = data[HEADER_SIZE:]
        if len(body) != header.symbol_count * dtype.itemsize:
            raise ShareFormatError(
                f"payload is {len(body)} bytes, header announces {header.symbol_count} symbols of {dtype.itemsize}"
            )
        if header.symbol_count % alpha:
            raise ShareFormatError(f"symbol count {header.symbol_count} is not a multiple of alpha = {alpha}")
        payload = np.frombuffer(body, dtype=dtype).astype(np.int64).reshape(-1, alpha)
        return cls(header, payload)


def write_share(path: Path, share: ShareFile) -> None:
    bytes_save_atomic(path, share.to_bytes())
    logger.debug("Wrote %s (node %d, %d symbols)", path, share.header.node, share.header.symbol_count)


def read_share(path: Path) -> ShareFile:
    try:
        return ShareFile.from_bytes(path.read_bytes())
    except ShareFormatError as exc:
        raise ShareFormatError(f"{path.name}: {exc}") from exc


def load_share_dir(directory: Path) -> dict[int, ShareFile]:
    """All share files in *directory*, keyed by node; they must come from one encode run.

    Raises:
        IncompatibleSharesError: headers differ beyond the node id, or a node appears twice.
    """
    shares: dict[int, ShareFile] = {}
    reference: ShareHeader | None = None
    for path in sorted(directory.glob(f"*{SHARE_SUFFIX}")):
        share = read_share(path)
        if reference is None:
            reference = share.header
        elif share.header.run_key() != reference.run_key():
            raise IncompatibleSharesError(f"incompatible shares: {path.name} does not match the other headers")
        if share.header.node in shares:
            raise IncompatibleSharesError(f"incompatible shares: node {share.header.node} appears twice")
        shares[share.header.node] = share
    logger.info("Loaded %d shares from %s", len(shares), directory)
    return shares
