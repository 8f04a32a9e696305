"""Finite fields, MDS codes, the layered secure regenerating code and its secrecy checks."""

from .field import DEFAULT_FIELD, FieldElement, FieldMatrix, FieldSpec, inverse, rank, solve
from .layered import CodeParams, NodeShare, RepairTranscript, build_transcript, encode, reconstruct, repair
from .mds import MdsCode, erasure_decode
from .secrecy import entropy_oracle, leakage_rank, verify_all_eavesdroppers

__all__ = [
    "DEFAULT_FIELD",
    "FieldElement",
    "FieldMatrix",
    "FieldSpec",
    "inverse",
    "rank",
    "solve",
    "CodeParams",
    "NodeShare",
    "RepairTranscript",
    "build_transcript",
    "encode",
    "reconstruct",
    "repair",
    "MdsCode",
    "erasure_decode",
    "entropy_oracle",
    "leakage_rank",
    "verify_all_eavesdroppers",
]
