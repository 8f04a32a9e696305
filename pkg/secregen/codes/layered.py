"""Layered secure exact-repair code for (n, k=n-1, d=n-1, ell).

The B message symbols and R random symbols are encoded into the parity
symbols of a (2(R+B), R+B) systematic MDS code. The parities are cut into
C(n, t) parity groups of t-1 symbols, one group per t-subset of nodes, and
each group gains one extra symbol: the field sum of its parities. The t
symbols of a group are spread over the t nodes of its subset.

Any n-1 nodes see every group with at most one symbol missing, and a failed
node gets back each of its symbols from the other t-1 members of the group.
"""

from __future__ import annotations

import logging
import secrets
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import comb
from typing import Protocol

import numpy as np
from cachetools import LRUCache, cached

from ..core.errors import ValidationError, VerificationError
from ..region.rational import RatePoint
from .field import DEFAULT_FIELD, FieldSpec
from .mds import MdsCode, decode_blocks, parity_matrix

logger = logging.getLogger(__name__)


class ParameterError(ValidationError):
    """Code parameters or inputs outside their documented ranges."""


class InsufficientSharesError(ValidationError):
    """Fewer than n-1 distinct node shares were supplied."""


class CorruptShareError(VerificationError):
    """A share violates the group-sum invariant or its expected layout."""


class MissingHelperSymbolsError(ValidationError):
    """A repair transcript lacks symbols needed to regenerate the failed node."""


# ── Parameters ─────────────────────────────────────────────────────


@dataclass(frozen=True, slots=True)
class Dimensions:
    """Closed-form sizes of one (n, ell, t) instance, in field symbols."""

    B: int
    R: int
    alpha: int
    beta: int
    groups: int

    @property
    def total(self) -> int:
        """R + B, the MDS message length."""
        return self.B + self.R

    @property
    def code_length(self) -> int:
        return 2 * self.total


def _dimensions(n: int, ell: int, t: int) -> Dimensions:
    b = comb(n - ell, t) * (t - 1)
    return Dimensions(
        B=b,
        R=comb(n, t) * (t - 1) - b,
        alpha=comb(n - 1, t - 1),
        beta=comb(n - 2, t - 2),
        groups=comb(n, t),
    )


@dataclass(frozen=True, slots=True)
class CodeParams:
    """Validated (n, ell, t) over a field large enough for the MDS layer."""

    n: int
    ell: int
    t: int
    field: FieldSpec = DEFAULT_FIELD

    def __post_init__(self) -> None:
        if self.n < 3:
            raise ParameterError(f"need n >= 3, got n={self.n}")
        if not 1 <= self.ell <= self.n - 2:
            raise ParameterError(f"need 1 <= ell <= n-2 = {self.n - 2}, got ell={self.ell}")
        if not 2 <= self.t <= self.n - self.ell:
            raise ParameterError(f"need 2 <= t <= n-ell = {self.n - self.ell}, got t={self.t}")
        needed = _dimensions(self.n, self.ell, self.t).code_length
        if self.field.order < needed:
            raise ParameterError(f"{self.field} is too small: the MDS layer needs q >= 2(R+B) = {needed}")

    @property
    def k(self) -> int:
        return self.n - 1

    @property
    def d(self) -> int:
        return self.n - 1

    @property
    def nodes(self) -> range:
        return range(1, self.n + 1)

    def check_node(self, node: int) -> int:
        if node not in self.nodes:
            raise ParameterError(f"node id must be in 1..{self.n}, got {node}")
        return node

    def __str__(self) -> str:
        return f"(n={self.n}, ell={self.ell}, t={self.t}, {self.field})"


def derive_dimensions(params: CodeParams) -> Dimensions:
    return _dimensions(params.n, params.ell, params.t)


# ── Group layout ───────────────────────────────────────────────────


@dataclass(frozen=True)
class GroupLayout:
    """Lexicographic t-subsets of [1..n] and where each group's symbols live.

    Group g owns parity indices ``[g(t-1), (g+1)(t-1))``. Its sum symbol sits on
    the smallest node of the subset; the parities go to the remaining nodes in
    increasing order.
    """

    n: int
    t: int
    subsets: tuple[tuple[int, ...], ...]

    @classmethod
    def build(cls, n: int, t: int) -> GroupLayout:
        return cls(n, t, tuple(combinations(range(1, n + 1), t)))

    def __len__(self) -> int:
        return len(self.subsets)

    def parity_indices(self, group: int) -> range:
        width = self.t - 1
        return range(group * width, (group + 1) * width)

    def sum_node(self, group: int) -> int:
        return self.subsets[group][0]

    def parity_index_at(self, group: int, node: int) -> int | None:
        """Parity index stored by *node* in *group*; ``None`` for the sum node."""
        members = self.subsets[group]
        pos = members.index(node)
        if pos == 0:
            return None
        return group * (self.t - 1) + pos - 1

    def symbol_column(self, group: int, node: int) -> int:
        """Column of *node*'s symbol in ``[parities | group sums]``; sums start at ``len(self) * (t-1)``."""
        idx = self.parity_index_at(group, node)
        return len(self.subsets) * (self.t - 1) + group if idx is None else idx

    @cached_property
    def node_columns(self) -> dict[int, np.ndarray]:
        """Per node, the ``symbol_column`` of each of its groups in ascending group order."""
        return {
            node: np.array([self.symbol_column(g, node) for g in groups], dtype=np.int64)
            for node, groups in self.node_groups.items()
        }

    @cached_property
    def node_groups(self) -> dict[int, tuple[int, ...]]:
        """Groups containing each node, ascending."""
        out: dict[int, list[int]] = {node: [] for node in range(1, self.n + 1)}
        for g, members in enumerate(self.subsets):
            for node in members:
                out[node].append(g)
        return {node: tuple(groups) for node, groups in out.items()}

    def shared_groups(self, i: int, j: int) -> tuple[int, ...]:
        """Groups containing both nodes, ascending."""
        mine = set(self.node_groups[j])
        return tuple(g for g in self.node_groups[i] if g in mine)

    def groups_touching(self, nodes: Iterable[int]) -> tuple[int, ...]:
        wanted = set(nodes)
        return tuple(g for g, members in enumerate(self.subsets) if wanted.intersection(members))


@cached(cache=LRUCache(maxsize=32))
def _layout(n: int, t: int) -> GroupLayout:
    return GroupLayout.build(n, t)


def group_layout(params: CodeParams) -> GroupLayout:
    return _layout(params.n, params.t)


def mds_code(params: CodeParams) -> MdsCode:
    return MdsCode.doubled(params.field, derive_dimensions(params).total)


# ── Shares and transcripts ─────────────────────────────────────────


@dataclass(frozen=True, slots=True)
class NodeShare:
    """The alpha symbols stored at one node, keyed by group id."""

    node: int
    symbols: dict[int, int]

    @property
    def size(self) -> int:
        return len(self.symbols)

    def values(self) -> list[int]:
        """Symbols in ascending group order."""
        return [self.symbols[g] for g in sorted(self.symbols)]


@dataclass(frozen=True, slots=True)
class RepairTranscript:
    """What each helper sends to regenerate node ``failed``."""

    failed: int
    helpers: dict[int, list[tuple[int, int]]]

    @property
    def symbol_count(self) -> int:
        return sum(len(sent) for sent in self.helpers.values())

    def per_helper(self) -> dict[int, int]:
        return {helper: len(sent) for helper, sent in sorted(self.helpers.items())}

    def group_ids(self) -> set[int]:
        return {g for sent in self.helpers.values() for g, _ in sent}


# ── Randomness ─────────────────────────────────────────────────────


class RandomnessSource(Protocol):
    def draw(self, field: FieldSpec, count: int) -> np.ndarray: ...


class SystemRandomness:
    """OS-seeded CSPRNG (``secrets``)."""

    def draw(self, field: FieldSpec, count: int) -> np.ndarray:
        if field.characteristic == 2:
            width = (field.degree + 7) // 8
            raw = np.frombuffer(secrets.token_bytes(count * width), dtype=np.uint8).reshape(count, width)
            values = (raw.astype(np.int64) << (8 * np.arange(width, dtype=np.int64))).sum(axis=1)
            return values & (field.order - 1)
        rng = secrets.SystemRandom()
        return np.array([rng.randrange(field.order) for _ in range(count)], dtype=np.int64)


class SeededRandomness:
    """Deterministic numpy PCG64 stream, for tests and reproducible runs."""

    def __init__(self, seed: int):
        self._rng = np.random.Generator(np.random.PCG64(seed))

    def draw(self, field: FieldSpec, count: int) -> np.ndarray:
        return field.random(count, self._rng)


# ── Operations ─────────────────────────────────────────────────────


def _check_length(params: CodeParams, values, count: int, what: str) -> np.ndarray:
    arr = params.field.array(values)
    if arr.shape != (count,):
        raise ParameterError(f"{what} must have {count} symbols, got shape {arr.shape}")
    return arr


def encode_blocks(params: CodeParams, messages, randomness) -> dict[int, np.ndarray]:
    """Encode a batch of blocks; row b of *messages* (B wide) and *randomness* (R wide) is block b.

    Returns each node's ``(blocks, alpha)`` symbols, columns in ascending group order.
    """
    field = params.field
    dims = derive_dimensions(params)
    messages, randomness = field.array(messages), field.array(randomness)
    if messages.ndim != 2 or messages.shape[1] != dims.B:
        raise ParameterError(f"message blocks must be (blocks, {dims.B}), got shape {messages.shape}")
    if randomness.shape != (messages.shape[0], dims.R):
        raise ParameterError(f"randomness must be ({messages.shape[0]}, {dims.R}), got shape {randomness.shape}")

    layout = group_layout(params)
    parities = field.matmul(np.hstack([messages, randomness]), parity_matrix(mds_code(params)).entries.T)
    sums = field.sum(parities.reshape(len(messages), len(layout), params.t - 1), axis=2)
    symbols = np.hstack([parities, sums])
    return {node: symbols[:, layout.node_columns[node]] for node in params.nodes}


def encode(params: CodeParams, message, randomness) -> list[NodeShare]:
    """Encode B message symbols and R random symbols into n node shares."""
    dims = derive_dimensions(params)
    message = _check_length(params, message, dims.B, "message")
    randomness = _check_length(params, randomness, dims.R, "randomness")
    payloads = encode_blocks(params, message[None, :], randomness[None, :])
    layout = group_layout(params)
    return [NodeShare(node, dict(zip(layout.node_groups[node], payloads[node][0].tolist()))) for node in params.nodes]


def encode_with(params: CodeParams, message, source: RandomnessSource) -> list[NodeShare]:
    """``encode`` with fresh randomness drawn from *source*."""
    return encode(params, message, source.draw(params.field, derive_dimensions(params).R))


def _index_shares(params: CodeParams, shares: Iterable[NodeShare]) -> dict[int, NodeShare]:
    layout = group_layout(params)
    by_node: dict[int, NodeShare] = {}
    for share in shares:
        params.check_node(share.node)
        if share.node in by_node:
            raise ParameterError(f"duplicate share for node {share.node}")
        if set(share.symbols) != set(layout.node_groups[share.node]):
            expected = len(layout.node_groups[share.node])
            raise CorruptShareError(f"corrupt share: node {share.node} does not hold its {expected} groups")
        by_node[share.node] = share
    return by_node


def reconstruct_blocks(params: CodeParams, payloads: Mapping[int, np.ndarray]) -> np.ndarray:
    """Batch ``reconstruct``: *payloads* maps node id to its ``(blocks, alpha)`` symbols.

    Returns the ``(blocks, B)`` messages.

    Raises:
        InsufficientSharesError: fewer than n-1 nodes.
        CorruptShareError: a fully present group breaks its sum relation in some block.
    """
    for node in payloads:
        params.check_node(node)
    if len(payloads) < params.n - 1:
        raise InsufficientSharesError(f"insufficient shares: {len(payloads)} < n-1 = {params.n - 1}")

    field = params.field
    layout = group_layout(params)
    dims = derive_dimensions(params)
    width = params.t - 1
    blocks = next(iter(payloads.values())).shape[0]
    symbols = np.zeros((blocks, dims.total + len(layout)), dtype=np.int64)
    held = np.zeros(dims.total + len(layout), dtype=bool)
    for node, payload in payloads.items():
        payload = field.array(payload)
        if payload.shape != (blocks, dims.alpha):
            expected = (blocks, dims.alpha)
            raise CorruptShareError(f"corrupt share: node {node} has shape {payload.shape}, not {expected}")
        columns = layout.node_columns[node]
        symbols[:, columns] = payload
        held[columns] = True

    parities = symbols[:, : dims.total].reshape(blocks, len(layout), width)
    sums = symbols[:, dims.total :]
    parity_held = held[: dims.total].reshape(len(layout), width)
    complete = parity_held.all(axis=1) & held[dims.total :]
    if complete.any():
        broken = (field.sum(parities[:, complete, :], axis=2) != sums[:, complete]).any(axis=0)
        if broken.any():
            g = int(np.flatnonzero(complete)[np.flatnonzero(broken)[0]])
            raise CorruptShareError(f"corrupt share: group {layout.subsets[g]} violates its sum relation")
    # With n-1 nodes each group misses at most one symbol; a missing parity comes back from the sum.
    for g in np.flatnonzero(~parity_held.all(axis=1)):
        (pos,) = np.flatnonzero(~parity_held[g])
        others = np.delete(parities[:, g, :], pos, axis=1)
        parities[:, g, pos] = field.sub(sums[:, g], field.sum(others, axis=1))

    code = mds_code(params)
    decoded = decode_blocks(code, code.parity_positions, parities.reshape(blocks, dims.total))
    return decoded[:, : dims.B]


def reconstruct(params: CodeParams, shares: Iterable[NodeShare]) -> np.ndarray:
    """Recover the B message symbols from any n-1 (or all n) shares.

    Raises:
        InsufficientSharesError: fewer than n-1 distinct shares.
        CorruptShareError: a fully present group breaks its sum relation.
    """
    by_node = _index_shares(params, shares)
    payloads = {node: np.array([share.values()], dtype=np.int64) for node, share in by_node.items()}
    if not payloads:
        raise InsufficientSharesError(f"insufficient shares: 0 < n-1 = {params.n - 1}")
    return reconstruct_blocks(params, payloads)[0]


def build_transcript(params: CodeParams, failed: int, shares: Iterable[NodeShare]) -> RepairTranscript:
    """Each helper sends its symbol of every group it shares with *failed*."""
    params.check_node(failed)
    layout = group_layout(params)
    helpers: dict[int, list[tuple[int, int]]] = {}
    for share in sorted(shares, key=lambda s: s.node):
        if share.node == failed:
            continue
        helpers[share.node] = [(g, share.symbols[g]) for g in layout.shared_groups(share.node, failed)]
    return RepairTranscript(failed, helpers)


def repair(params: CodeParams, failed: int, transcript: RepairTranscript) -> NodeShare:
    """Regenerate the share of *failed* from its repair transcript.

    Raises:
        MissingHelperSymbolsError: some group lacks one of its t-1 helper symbols.
    """
    params.check_node(failed)
    if transcript.failed != failed:
        raise ParameterError(f"transcript regenerates node {transcript.failed}, not {failed}")
    layout = group_layout(params)
    field = params.field
    received: dict[tuple[int, int], int] = {}
    for helper, sent in transcript.helpers.items():
        for g, value in sent:
            received[(g, helper)] = value

    symbols: dict[int, int] = {}
    for g in layout.node_groups[failed]:
        members = layout.subsets[g]
        others = [node for node in members if node != failed]
        missing = [node for node in others if (g, node) not in received]
        if missing:
            raise MissingHelperSymbolsError(f"missing helper symbols: group {members} lacks nodes {missing}")
        if failed == members[0]:
            value = field.sum(np.array([received[(g, node)] for node in others], dtype=np.int64))
        else:
            parity_sum = field.sum(np.array([received[(g, node)] for node in others[1:]], dtype=np.int64))
            value = field.sub(received[(g, members[0])], parity_sum)
        symbols[g] = int(value)
    return NodeShare(failed, symbols)


def exposed_groups(params: CodeParams, targets: Iterable[int]) -> tuple[int, ...]:
    """Groups with a symbol on any target node; C(n,t) - C(n-ell,t) of them for ell targets."""
    targets = [params.check_node(node) for node in targets]
    return group_layout(params).groups_touching(targets)


def check_targets(params: CodeParams, targets: Iterable[int]) -> list[int]:
    chosen = sorted({params.check_node(node) for node in targets})
    if len(chosen) != params.ell:
        raise ParameterError(f"eavesdropper must observe exactly ell={params.ell} distinct nodes, got {chosen}")
    return chosen


def eavesdropper_view(
    params: CodeParams, targets: Iterable[int], shares: Sequence[NodeShare]
) -> list[RepairTranscript]:
    """Repair transcripts of every target node, in increasing node order."""
    return [build_transcript(params, j, shares) for j in check_targets(params, targets)]


# ── Rates ──────────────────────────────────────────────────────────


@dataclass(frozen=True, slots=True)
class RepairBandwidth:
    per_helper: int
    helpers: int
    total: int
    ratio: Fraction  # (n-1) beta / ((t-1) alpha), always 1


def repair_bandwidth(params: CodeParams) -> RepairBandwidth:
    dims = derive_dimensions(params)
    total = (params.n - 1) * dims.beta
    return RepairBandwidth(
        per_helper=dims.beta,
        helpers=params.n - 1,
        total=total,
        ratio=Fraction(total, (params.t - 1) * dims.alpha),
    )


def normalized_point(params: CodeParams) -> RatePoint:
    """Realised (alpha/B, beta/B)."""
    dims = derive_dimensions(params)
    return RatePoint(Fraction(dims.alpha, dims.B), Fraction(dims.beta, dims.B))
