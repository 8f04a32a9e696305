"""Exact repair-secrecy verification for the layered code.

The scheme is linear, so the eavesdropper's observation is
``E = A_M @ M + A_K @ K`` and, with M and K uniform and independent,
``I(M; E) = rank([A_M | A_K]) - rank(A_K)`` in log_q units. Ranks are exact;
nothing here samples. The exhaustive entropy oracle re-derives the same
numbers by brute force on instances small enough to enumerate.
"""

from __future__ import annotations

import logging
from collections import Counter
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import partial
from itertools import combinations, product
from math import comb
from typing import Any

import numpy as np

from ..core.config import get_config
from ..core.errors import ValidationError, VerificationError
from .field import FieldMatrix, rank_split, solve
from .layered import (
    CodeParams,
    RepairTranscript,
    check_targets,
    derive_dimensions,
    eavesdropper_view,
    encode,
    exposed_groups,
    group_layout,
    mds_code,
    repair,
)
from .mds import parity_matrix

logger = logging.getLogger(__name__)


class OracleBudgetError(ValidationError):
    """Exhaustive enumeration would exceed the configured budget."""


class SecrecyMismatchError(VerificationError):
    """Brute-force entropies disagree with the rank computation."""


# ── Observation model ──────────────────────────────────────────────


@dataclass(frozen=True)
class TransferMaps:
    """Linear maps from message (B columns) and randomness (R columns) to the observation."""

    a_m: FieldMatrix
    a_k: FieldMatrix

    @property
    def rows(self) -> int:
        return self.a_m.rows

    def joint(self) -> FieldMatrix:
        """``[A_M | A_K]``."""
        return self.a_m.hstack(self.a_k)

    def apply(self, message, randomness) -> np.ndarray:
        field = self.a_m.field
        return field.add(self.a_m.apply(message), self.a_k.apply(randomness))


def flatten_view(params: CodeParams, transcripts: Sequence[RepairTranscript]) -> np.ndarray:
    """Observation vector of an eavesdropper holding *transcripts*.

    Per transcript: each helper's symbols (helpers ascending, groups ascending),
    then the symbols the target regenerates from them.
    """
    values: list[int] = []
    for transcript in transcripts:
        for helper in sorted(transcript.helpers):
            values.extend(value for _, value in transcript.helpers[helper])
        values.extend(repair(params, transcript.failed, transcript).values())
    return np.array(values, dtype=np.int64)


def build_transfer_maps(
    params: CodeParams,
    targets: Iterable[int],
    *,
    break_randomness: bool = False,
    helper_rows_only: bool = False,
) -> TransferMaps:
    """Symbolic (A_M, A_K) for the observation ``flatten_view`` produces on *targets*.

    Rows come straight from the MDS parity block and the group layout. With
    ``break_randomness`` the random symbols are taken as zero, i.e. A_K = 0.
    ``helper_rows_only`` leaves out the regenerated symbols; each is a field
    sum of helper symbols, so the ranks are unchanged.
    """
    field = params.field
    layout = group_layout(params)
    dims = derive_dimensions(params)
    parity = parity_matrix(mds_code(params)).entries
    sum_rows = field.sum(parity.reshape(len(layout), params.t - 1, dims.total), axis=1)
    symbol_rows = np.vstack([parity, sum_rows])

    order: list[int] = []
    for j in sorted({params.check_node(node) for node in targets}):
        for helper in params.nodes:
            if helper != j:
                order.extend(layout.symbol_column(g, helper) for g in layout.shared_groups(helper, j))
        if not helper_rows_only:
            order.extend(layout.symbol_column(g, j) for g in layout.node_groups[j])

    matrix = symbol_rows[np.array(order, dtype=np.int64)].reshape(len(order), dims.total)
    a_m = FieldMatrix(field, matrix[:, : dims.B])
    if break_randomness:
        a_k = FieldMatrix.zeros(field, len(order), dims.R)
    else:
        a_k = FieldMatrix(field, matrix[:, dims.B :])
    return TransferMaps(a_m, a_k)


def leakage_rank(maps: TransferMaps) -> int:
    """``rank([A_M | A_K]) - rank(A_K)``: I(M; E) in log_q units, 0 iff perfectly secret."""
    key_rank, observed_rank = rank_split(maps.a_k, maps.a_m)
    return observed_rank - key_rank


def recover_randomness(params: CodeParams, targets: Iterable[int], message, observed) -> np.ndarray:
    """Solve ``A_K @ K = E - A_M @ M`` for the random symbols.

    Succeeds exactly when H(K | M, E) = 0; otherwise ``solve`` raises
    ``UnderdeterminedError``.
    """
    maps = build_transfer_maps(params, targets)
    field = params.field
    rhs = field.sub(field.array(observed), maps.a_m.apply(message))
    return solve(maps.a_k, rhs)


# ── Exhaustive oracle ──────────────────────────────────────────────


def _exact_log(value: int, base: int) -> int:
    exponent = 0
    while value > 1 and value % base == 0:
        value //= base
        exponent += 1
    if value != 1:
        raise SecrecyMismatchError(f"fibre ratio is not a power of {base}: the observation is not linear")
    return exponent


def _entropy(counts: Iterable[int], total: int, base: int) -> Fraction:
    """Exact entropy in log_base units of a distribution with all ``total // count`` powers of base."""
    h = Fraction(0)
    for count in counts:
        if total % count:
            raise SecrecyMismatchError("non-uniform fibres: the observation is not linear")
        h += Fraction(count, total) * _exact_log(total // count, base)
    return h


@dataclass(frozen=True)
class OracleReport:
    """Brute-force entropies in log_q units."""

    targets: tuple[int, ...]
    inputs: int
    h_e: Fraction
    h_e_given_m: Fraction
    mutual_information: Fraction
    h_k_given_m_e: Fraction
    leakage_rank: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "targets": list(self.targets),
            "inputs": self.inputs,
            "H(E)": str(self.h_e),
            "H(E|M)": str(self.h_e_given_m),
            "I(M;E)": str(self.mutual_information),
            "H(K|M,E)": str(self.h_k_given_m_e),
            "leakage_rank": self.leakage_rank,
        }


def entropy_oracle(params: CodeParams, targets: Iterable[int], *, budget: int | None = None) -> OracleReport:
    """Exact entropies by enumerating every (M, K) through the real encoder and repair path.

    Raises:
        OracleBudgetError: q^(B+R) exceeds *budget* (default: config ``oracle.budget``).
        SecrecyMismatchError: I(M; E) differs from ``leakage_rank`` on the same instance.
    """
    targets = tuple(check_targets(params, targets))
    dims = derive_dimensions(params)
    q = params.field.order
    total = q**dims.total
    if budget is None:
        budget = get_config().oracle.budget
    if total > budget:
        raise OracleBudgetError(
            f"instance too large for oracle: q^(B+R) = {q}^{dims.total} exceeds budget {budget}",
        )

    counts_e: Counter[tuple[int, ...]] = Counter()
    counts_me: Counter[tuple[tuple[int, ...], tuple[int, ...]]] = Counter()
    for inputs in product(range(q), repeat=dims.total):
        message, randomness = inputs[: dims.B], inputs[dims.B :]
        shares = encode(params, message, randomness)
        observed = tuple(flatten_view(params, eavesdropper_view(params, targets, shares)).tolist())
        counts_e[observed] += 1
        counts_me[(message, observed)] += 1

    h_e = _entropy(counts_e.values(), total, q)
    h_me = _entropy(counts_me.values(), total, q)
    h_e_given_m = h_me - dims.B
    mutual = h_e - h_e_given_m
    leak = leakage_rank(build_transfer_maps(params, targets))
    report = OracleReport(
        targets=targets,
        inputs=total,
        h_e=h_e,
        h_e_given_m=h_e_given_m,
        mutual_information=mutual,
        h_k_given_m_e=dims.total - h_me,
        leakage_rank=leak,
    )
    if mutual != leak:
        raise SecrecyMismatchError(f"oracle I(M;E) = {mutual} but leakage_rank = {leak} for targets {targets}")
    logger.info("Oracle %s targets %s: H(E)=%s I(M;E)=%s", params, targets, h_e, mutual)
    return report


# ── Sweep ──────────────────────────────────────────────────────────


@dataclass(frozen=True)
class SubsetResult:
    targets: tuple[int, ...]
    leakage: int
    observed_rank: int
    key_rank: int
    exposed_groups: int
    rows: int


def check_subset(params: CodeParams, targets: tuple[int, ...], break_randomness: bool = False) -> SubsetResult:
    maps = build_transfer_maps(params, targets, break_randomness=break_randomness, helper_rows_only=True)
    key_rank, observed_rank = rank_split(maps.a_k, maps.a_m)
    result = SubsetResult(
        targets=targets,
        leakage=observed_rank - key_rank,
        observed_rank=observed_rank,
        key_rank=key_rank,
        exposed_groups=len(exposed_groups(params, targets)),
        rows=maps.rows + len(targets) * derive_dimensions(params).alpha,
    )
    logger.debug("Targets %s: leakage %d (rank %d/%d)", targets, result.leakage, observed_rank, key_rank)
    return result


@dataclass(frozen=True)
class SecrecyReport:
    params: CodeParams
    results: tuple[SubsetResult, ...]
    break_randomness: bool = False

    @property
    def expected_exposed(self) -> int:
        p = self.params
        return comb(p.n, p.t) - comb(p.n - p.ell, p.t)

    @property
    def max_leakage(self) -> int:
        return max((r.leakage for r in self.results), default=0)

    @property
    def witness(self) -> tuple[int, ...] | None:
        """First subset attaining a nonzero maximum leakage."""
        for r in self.results:
            if r.leakage > 0 and r.leakage == self.max_leakage:
                return r.targets
        return None

    @property
    def symmetric(self) -> bool:
        return len({r.leakage for r in self.results}) <= 1

    @property
    def exposure_ok(self) -> bool:
        return all(r.exposed_groups == self.expected_exposed for r in self.results)

    @property
    def within_key_size(self) -> bool:
        """H(E) <= R wherever the observation leaks nothing."""
        R = derive_dimensions(self.params).R
        return all(r.observed_rank <= R for r in self.results if r.leakage == 0)

    @property
    def passed(self) -> bool:
        return self.max_leakage == 0 and self.exposure_ok and self.within_key_size

    def to_dict(self) -> dict[str, Any]:
        return {
            "subsets_checked": len(self.results),
            "max_leakage": self.max_leakage,
            "witness": list(self.witness) if self.witness else None,
            "symmetric": self.symmetric,
            "expected_exposed_groups": self.expected_exposed,
            "exposure_ok": self.exposure_ok,
            "within_key_size": self.within_key_size,
            "break_randomness": self.break_randomness,
            "passed": self.passed,
        }


def verify_all_eavesdroppers(
    params: CodeParams, *, break_randomness: bool = False, workers: int | None = None
) -> SecrecyReport:
    """Leakage of every ell-subset of nodes; subsets are independent and may run in a process pool."""
    if workers is None:
        workers = get_config().sweep.workers
    subsets = list(combinations(params.nodes, params.ell))
    check = partial(check_subset, params, break_randomness=break_randomness)
    if workers > 1 and len(subsets) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = tuple(pool.map(check, subsets))
    else:
        results = tuple(check(s) for s in subsets)
    report = SecrecyReport(params, results, break_randomness)
    if report.witness is not None:
        logger.warning("Leakage %d for %s at targets %s", report.max_leakage, params, report.witness)
    else:
        logger.info("Secrecy sweep %s: %d subsets, no leakage", params, len(results))
    return report
