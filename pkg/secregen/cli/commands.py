"""Subcommand implementations; each returns plain data and raises ``SecregenError`` subclasses."""

from __future__ import annotations

import logging
from dataclasses import replace
from itertools import combinations
from math import ceil
from pathlib import Path
from typing import Any

import numpy as np
from filelock import FileLock

from ..codes.field import FieldSpec
from ..codes.layered import (
    CodeParams,
    InsufficientSharesError,
    MissingHelperSymbolsError,
    NodeShare,
    RandomnessSource,
    SeededRandomness,
    SystemRandomness,
    build_transcript,
    derive_dimensions,
    encode,
    encode_blocks,
    group_layout,
    normalized_point,
    reconstruct,
    reconstruct_blocks,
    repair,
    repair_bandwidth,
)
from ..codes.secrecy import OracleBudgetError, entropy_oracle, verify_all_eavesdroppers
from ..core.config import get_config
from ..core.errors import SecregenError, ValidationError
from ..core.persistence import bytes_save_atomic
from ..region.export import build_region_export, export_csv, export_json, resolve_preset
from ..region.tradeoff import SystemParams
from .sharefile import (
    ShareFile,
    ShareFormatError,
    ShareHeader,
    load_share_dir,
    share_filename,
    symbol_dtype,
    symbol_width,
    write_share,
)

logger = logging.getLogger(__name__)

LOCK_NAME = ".secregen.lock"


def _lock(directory: Path) -> FileLock:
    directory.mkdir(parents=True, exist_ok=True)
    return FileLock(str(directory / LOCK_NAME))


def parse_seed(text: str | None) -> int | None:
    if text is None:
        return None
    try:
        return int(text, 16)
    except ValueError:
        raise ValidationError(f"seed must be hexadecimal, got {text!r}") from None


# ── Byte <-> symbol blocks ─────────────────────────────────────────


def message_blocks(data: bytes, params: CodeParams) -> tuple[np.ndarray, int]:
    """Split *data* into zero-padded B-symbol blocks; returns (blocks x B array, padding bytes)."""
    block_bytes = derive_dimensions(params).B * symbol_width(params.field)
    blocks = max(1, ceil(len(data) / block_bytes))
    padding = blocks * block_bytes - len(data)
    symbols = np.frombuffer(data + bytes(padding), dtype=symbol_dtype(params.field))
    return symbols.astype(np.int64).reshape(blocks, -1), padding


def blocks_to_bytes(blocks: np.ndarray, params: CodeParams, length: int) -> bytes:
    return blocks.astype(symbol_dtype(params.field)).tobytes()[:length]


def _node_share(params: CodeParams, share: ShareFile, block: int) -> NodeShare:
    groups = group_layout(params).node_groups[share.header.node]
    return NodeShare(share.header.node, dict(zip(groups, share.payload[block].tolist())))


# ── encode / reconstruct / repair ──────────────────────────────────


def cmd_encode(
    n: int,
    ell: int,
    t: int,
    input_path: Path,
    out_dir: Path,
    *,
    seed: str | None = None,
    field: str | None = None,
) -> list[Path]:
    """Encode *input_path* into n share files, with fresh randomness for every block."""
    params = CodeParams(n, ell, t, FieldSpec.parse(field or get_config().field))
    data = input_path.read_bytes()
    if not data:
        raise ValidationError(f"{input_path} is empty")

    seed_value = parse_seed(seed)
    source: RandomnessSource = SystemRandomness() if seed_value is None else SeededRandomness(seed_value)
    blocks, padding = message_blocks(data, params)
    dims = derive_dimensions(params)
    randomness = source.draw(params.field, len(blocks) * dims.R).reshape(len(blocks), dims.R)
    payloads = encode_blocks(params, blocks, randomness)

    paths = []
    with _lock(out_dir):
        for node in params.nodes:
            header = ShareHeader(n, ell, t, params.field, node, len(blocks) * dims.alpha, len(data), padding % 256)
            path = out_dir / share_filename(node)
            write_share(path, ShareFile(header, payloads[node]))
            paths.append(path)
    logger.info("Encoded %d bytes into %d blocks x %d shares (%s)", len(data), len(blocks), n, params)
    return paths


def _load(shares_dir: Path) -> tuple[CodeParams, ShareHeader, dict[int, ShareFile]]:
    shares = load_share_dir(shares_dir)
    if not shares:
        raise InsufficientSharesError(f"insufficient shares: no share files in {shares_dir}")
    header = next(iter(shares.values())).header
    return header.params(), header, shares


def cmd_reconstruct(shares_dir: Path, out_path: Path) -> int:
    """Rebuild the original file from n-1 or more shares; returns its length."""
    params, header, shares = _load(shares_dir)
    if len(shares) < params.n - 1:
        raise InsufficientSharesError(f"insufficient shares: {len(shares)} in {shares_dir}, need {params.n - 1}")

    dims = derive_dimensions(params)
    width = symbol_width(params.field)
    padding = header.blocks * dims.B * width - header.message_length
    if not 0 <= padding < dims.B * width or padding % 256 != header.padding:
        raise ShareFormatError(f"message length {header.message_length} does not fit {header.blocks} blocks")

    out = reconstruct_blocks(params, {node: share.payload for node, share in shares.items()})
    data = blocks_to_bytes(out, params, header.message_length)
    bytes_save_atomic(out_path, data)
    logger.info("Reconstructed %d bytes from %d shares", len(data), len(shares))
    return len(data)


def cmd_repair(shares_dir: Path, failed: int, out_path: Path) -> dict[str, Any]:
    """Regenerate the share of node *failed* from the other n-1 and report the bandwidth used."""
    params, header, shares = _load(shares_dir)
    params.check_node(failed)
    helpers = {node: share for node, share in shares.items() if node != failed}
    absent = [node for node in params.nodes if node != failed and node not in helpers]
    if absent:
        raise MissingHelperSymbolsError(f"missing helper symbols: no share for helper nodes {absent}")

    dims = derive_dimensions(params)
    payload = np.zeros((header.blocks, dims.alpha), dtype=np.int64)
    sent = dict.fromkeys(sorted(helpers), 0)
    for b in range(header.blocks):
        transcript = build_transcript(params, failed, [_node_share(params, s, b) for s in helpers.values()])
        payload[b] = repair(params, failed, transcript).values()
        for helper, count in transcript.per_helper().items():
            sent[helper] += count

    with _lock(out_path.parent):
        write_share(out_path, ShareFile(replace(header, node=failed), payload))

    bandwidth = repair_bandwidth(params)
    total = sum(sent.values())
    report = {
        "failed": failed,
        "params": {"n": params.n, "ell": params.ell, "t": params.t, "field": str(params.field)},
        "blocks": header.blocks,
        "alpha": dims.alpha,
        "symbols_per_helper_per_block": bandwidth.per_helper,
        "symbols_per_block": bandwidth.total,
        "symbols_sent": {str(helper): count for helper, count in sent.items()},
        "total_symbols": total,
        "total_bytes": total * symbol_width(params.field),
        "ratio": str(bandwidth.ratio),
        "output": str(out_path),
    }
    logger.info("Repaired node %d over %d blocks, %d symbols downloaded", failed, header.blocks, total)
    return report


# ── verify ─────────────────────────────────────────────────────────


def _check_conditions(params: CodeParams, trials: int, rng: np.random.Generator) -> tuple[list, list]:
    dims = derive_dimensions(params)
    beta = dims.beta
    recon_failures: list[dict[str, Any]] = []
    repair_failures: list[dict[str, Any]] = []
    for trial in range(trials):
        message = params.field.random(dims.B, rng)
        shares = encode(params, message, params.field.random(dims.R, rng))
        for share in shares:
            j = share.node
            others = [s for s in shares if s.node != j]
            try:
                if not np.array_equal(reconstruct(params, others), message):
                    recon_failures.append({"trial": trial, "dropped": j, "error": "wrong message"})
            except SecregenError as exc:
                recon_failures.append({"trial": trial, "dropped": j, "error": str(exc)})
            try:
                transcript = build_transcript(params, j, others)
                if repair(params, j, transcript) != share:
                    repair_failures.append({"trial": trial, "failed": j, "error": "share differs"})
                elif set(transcript.per_helper().values()) != {beta}:
                    repair_failures.append({"trial": trial, "failed": j, "error": "wrong helper bandwidth"})
            except SecregenError as exc:
                repair_failures.append({"trial": trial, "failed": j, "error": str(exc)})
    return recon_failures, repair_failures


def _run_oracle(params: CodeParams) -> dict[str, Any]:
    reports = []
    for targets in combinations(params.nodes, params.ell):
        try:
            reports.append(entropy_oracle(params, targets).to_dict())
        except OracleBudgetError as exc:
            logger.warning("Skipping oracle: %s", exc)
            return {"skipped": str(exc), "subsets": reports}
    return {"skipped": None, "subsets": reports}


def cmd_verify(
    n: int,
    ell: int,
    t: int,
    *,
    field: str | None = None,
    oracle: bool = False,
    break_randomness: bool = False,
    trials: int = 1,
    seed: str | None = None,
    workers: int | None = None,
) -> dict[str, Any]:
    """Check reconstruction, exact repair and secrecy; ``report["passed"]`` is the overall verdict.

    ``SecrecyMismatchError`` from the oracle propagates as a verification failure.
    """
    params = CodeParams(n, ell, t, FieldSpec.parse(field or get_config().field))
    if trials < 1:
        raise ValidationError(f"trials must be positive, got {trials}")
    dims = derive_dimensions(params)
    rng = np.random.default_rng(parse_seed(seed))

    recon_failures, repair_failures = _check_conditions(params, trials, rng)
    secrecy = verify_all_eavesdroppers(params, break_randomness=break_randomness, workers=workers)
    point = normalized_point(params)
    report: dict[str, Any] = {
        "params": {"n": n, "ell": ell, "t": t, "field": str(params.field)},
        "dimensions": {"B": dims.B, "R": dims.R, "alpha": dims.alpha, "beta": dims.beta, "groups": dims.groups},
        "rates": {"alpha_bar": str(point.alpha_bar), "beta_bar": str(point.beta_bar)},
        "reconstruction": {
            "cases": trials * n,
            "failures": recon_failures,
            "passed": not recon_failures,
        },
        "repair": {
            "cases": trials * n,
            "failures": repair_failures,
            "passed": not repair_failures,
        },
        "secrecy": secrecy.to_dict(),
        "oracle": _run_oracle(params) if oracle else None,
    }
    report["passed"] = not recon_failures and not repair_failures and secrecy.passed
    logger.info("Verify %s: %s", params, "pass" if report["passed"] else "FAIL")
    return report


# ── region ─────────────────────────────────────────────────────────


def cmd_region(
    *,
    n: int | None = None,
    k: int | None = None,
    d: int | None = None,
    ell: int | None = None,
    preset: str | None = None,
    fmt: str = "json",
) -> bytes:
    """Region data as JSON or CSV bytes."""
    if preset is not None:
        params = resolve_preset(preset)
    else:
        if None in (n, k, d, ell):
            raise ValidationError("region needs --preset or all of --n --k --d --ell")
        params = SystemParams(n, k, d, ell)
    export = build_region_export(params)
    if fmt == "json":
        return export_json(export)
    if fmt == "csv":
        return export_csv(export).encode()
    raise ValidationError(f"unknown format {fmt!r}")
