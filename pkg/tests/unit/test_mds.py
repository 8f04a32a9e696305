"""Systematic RS code: encoding, erasure decoding and the MDS property."""

import itertools

import numpy as np
import pytest

from secregen.codes.field import FieldMatrix, FieldSpec, solve
from secregen.codes.mds import (
    CorruptSymbolsError,
    InsufficientSymbolsError,
    MdsCode,
    MdsError,
    decode_blocks,
    encode,
    encode_parities,
    erasure_decode,
    generator_matrix,
    is_mds_subset,
    parity_matrix,
)


@pytest.fixture
def code_42(gf7):
    return MdsCode(gf7, 4, 2)


# ---------------------------------------------------------------------------
# Encoding
# ---------------------------------------------------------------------------


class TestEncode:
    def test_zero_message(self, gf65536):
        code = MdsCode.doubled(gf65536, 10)
        assert not encode_parities(code, np.zeros(10, dtype=np.int64)).any()

    def test_hand_interpolation(self, code_42):
        assert encode_parities(code_42, [1, 0]).tolist() == [6, 5]

    def test_systematic(self, gf7, rng):
        code = MdsCode(gf7, 6, 3)
        message = gf7.random(3, rng)
        assert np.array_equal(encode(code, message)[:3], message)

    def test_generator_agrees_with_encode(self, gf65536, rng):
        code = MdsCode.doubled(gf65536, 12)
        gen = generator_matrix(code)
        assert gen.take_rows(range(12)) == FieldMatrix.identity(gf65536, 12)
        message = gf65536.random(12, rng)
        assert np.array_equal(gen.apply(message), encode(code, message))

    def test_linearity(self, gf65536, rng):
        code = MdsCode.doubled(gf65536, 8)
        a, b = gf65536.random(8, rng), gf65536.random(8, rng)
        lhs = encode_parities(code, gf65536.add(a, b))
        rhs = gf65536.add(encode_parities(code, a), encode_parities(code, b))
        assert np.array_equal(lhs, rhs)

    def test_wrong_message_length(self, code_42):
        with pytest.raises(MdsError, match="2 symbols"):
            encode(code_42, [1, 2, 3])

    def test_field_too_small(self):
        with pytest.raises(MdsError, match="evaluation points"):
            MdsCode(FieldSpec.prime(5), 6, 3)


# ---------------------------------------------------------------------------
# Decoding
# ---------------------------------------------------------------------------


class TestErasureDecode:
    def test_systematic_positions(self, gf7):
        code = MdsCode(gf7, 6, 3)
        assert erasure_decode(code, {0: 4, 1: 5, 2: 6}).tolist() == [4, 5, 6]

    def test_from_parities(self, code_42):
        assert erasure_decode(code_42, [(2, 6), (3, 5)]).tolist() == [1, 0]

    def test_exhaustive_6_3_gf7(self, gf7):
        code = MdsCode(gf7, 6, 3)
        for message in itertools.product(range(7), repeat=3):
            word = encode(code, message)
            for subset in itertools.combinations(range(6), 3):
                decoded = erasure_decode(code, {p: int(word[p]) for p in subset})
                assert tuple(decoded.tolist()) == message

    def test_insufficient(self, code_42):
        with pytest.raises(InsufficientSymbolsError, match="insufficient symbols"):
            erasure_decode(code_42, {3: 1})

    def test_extra_symbols_checked(self, gf7, rng):
        code = MdsCode(gf7, 6, 3)
        word = encode(code, gf7.random(3, rng))
        known = {p: int(v) for p, v in enumerate(word)}
        assert np.array_equal(erasure_decode(code, known), word[:3])
        known[5] = (known[5] + 1) % 7
        with pytest.raises(CorruptSymbolsError, match="corrupt symbols"):
            erasure_decode(code, known)

    def test_duplicate_position(self, code_42):
        with pytest.raises(MdsError, match="more than once"):
            erasure_decode(code_42, [(0, 1), (0, 1)])

    def test_position_out_of_range(self, code_42):
        with pytest.raises(MdsError, match="outside"):
            erasure_decode(code_42, {0: 1, 9: 1})

    def test_agrees_with_gaussian_solve(self, gf65536, rng):
        code = MdsCode.doubled(gf65536, 9)
        word = encode(code, gf65536.random(9, rng))
        positions = sorted(rng.choice(18, size=9, replace=False).tolist())
        rows = generator_matrix(code).take_rows(positions)
        values = word[positions]
        by_solve = solve(rows, values)
        by_interpolation = erasure_decode(code, dict(zip(positions, values.tolist())))
        assert np.array_equal(by_solve, by_interpolation)


class TestDecodeBlocks:
    def test_matches_single_decode(self, gf65536, rng):
        code = MdsCode.doubled(gf65536, 6)
        messages = gf65536.random((40, 6), rng)
        codewords = np.stack([encode(code, m) for m in messages])
        positions = [1, 4, 6, 7, 9, 11]
        decoded = decode_blocks(code, positions, codewords[:, positions])
        assert np.array_equal(decoded, messages)
        assert np.array_equal(decoded[3], erasure_decode(code, {p: codewords[3, p] for p in positions}))

    def test_parity_positions(self, gf7, rng):
        code = MdsCode.doubled(gf7, 3)
        messages = gf7.random((10, 3), rng)
        parities = np.stack([encode_parities(code, m) for m in messages])
        assert np.array_equal(decode_blocks(code, code.parity_positions, parities), messages)

    def test_no_blocks(self, code_42):
        assert decode_blocks(code_42, [0, 3], np.zeros((0, 2), dtype=np.int64)).shape == (0, 2)

    @pytest.mark.parametrize("positions", [[0], [0, 1, 2], [2, 1], [1, 1], [0, 4]])
    def test_bad_positions(self, code_42, positions):
        with pytest.raises(MdsError):
            decode_blocks(code_42, positions, np.zeros((1, len(positions)), dtype=np.int64))

    def test_bad_shape(self, code_42):
        with pytest.raises(MdsError, match="values"):
            decode_blocks(code_42, [0, 1], np.zeros((2, 3), dtype=np.int64))


# ---------------------------------------------------------------------------
# MDS property
# ---------------------------------------------------------------------------


class TestMdsProperty:
    @pytest.mark.parametrize("spec", [FieldSpec.prime(13), FieldSpec.binary(4)], ids=str)
    def test_every_subset_exhaustive(self, spec):
        code = MdsCode(spec, 12, 6)
        assert all(is_mds_subset(code, s) for s in itertools.combinations(range(12), 6))

    def test_sampled_subsets_large_code(self, gf65536, rng):
        code = MdsCode.doubled(gf65536, 40)
        for _ in range(10):
            subset = rng.choice(80, size=40, replace=False).tolist()
            assert is_mds_subset(code, subset)

    def test_parity_matrix_shape(self, gf65536):
        code = MdsCode(gf65536, 30, 10)
        assert (parity_matrix(code).rows, parity_matrix(code).cols) == (20, 10)

    def test_repeated_position_is_not_mds(self, code_42):
        assert not is_mds_subset(code_42, [2, 2])
