"""Finite-field kernels, scalar API and exact linear algebra."""

import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from secregen.codes.field import (
    FieldElement,
    FieldError,
    FieldKind,
    FieldMatrix,
    FieldSpec,
    MixedFieldError,
    NoSolutionError,
    SingularMatrixError,
    UnderdeterminedError,
    ZeroInverseError,
    _binary_tables,
    add,
    inv,
    inverse,
    mul,
    rank,
    rank_split,
    solve,
)

GF65536 = FieldSpec.binary(16)


def el(field, value):
    return FieldElement(field, value)


# ---------------------------------------------------------------------------
# FieldSpec
# ---------------------------------------------------------------------------


class TestFieldSpec:
    @pytest.mark.parametrize(
        "text, kind, order",
        [
            ("2^16", FieldKind.BINARY, 65536),
            ("GF(2^8)", FieldKind.BINARY, 256),
            ("65536", FieldKind.BINARY, 65536),
            ("7", FieldKind.PRIME, 7),
            ("GF(7)", FieldKind.PRIME, 7),
            ("2", FieldKind.PRIME, 2),
        ],
    )
    def test_parse(self, text, kind, order):
        spec = FieldSpec.parse(text)
        assert spec.kind is kind
        assert spec.order == order

    @pytest.mark.parametrize("text", ["9", "3^2", "GF(2^17)", "banana", "1"])
    def test_parse_rejects(self, text):
        with pytest.raises(FieldError):
            FieldSpec.parse(text)

    def test_str(self):
        assert str(FieldSpec.binary(16)) == "GF(2^16)"
        assert str(FieldSpec.prime(7)) == "GF(7)"

    def test_prime_above_limit_rejected(self):
        with pytest.raises(FieldError, match="prime"):
            FieldSpec.prime(2**31 + 11)

    def test_values_out_of_range(self, gf7):
        with pytest.raises(FieldError, match="out of range"):
            gf7.array([1, 7])


# ---------------------------------------------------------------------------
# Scalar operations
# ---------------------------------------------------------------------------


class TestScalars:
    def test_prime_add(self, gf7):
        assert add(el(gf7, 3), el(gf7, 5)) == el(gf7, 1)

    def test_binary_add_is_xor(self, gf16):
        assert add(el(gf16, 0b1010), el(gf16, 0b0110)) == el(gf16, 0b1100)

    def test_prime_mul(self, gf7):
        assert mul(el(gf7, 3), el(gf7, 5)) == el(gf7, 1)

    def test_binary_mul_reduces_by_polynomial(self, gf16):
        assert mul(el(gf16, 0b0010), el(gf16, 0b1000)) == el(gf16, 0b0011)

    def test_prime_inverse(self, gf7):
        assert inv(el(gf7, 3)) == el(gf7, 5)

    @pytest.mark.parametrize("m", [1, 4, 8, 16])
    def test_inverse_of_one(self, m):
        one = el(FieldSpec.binary(m), 1)
        assert inv(one) == one

    def test_zero_has_no_inverse(self, gf7):
        with pytest.raises(ZeroInverseError, match="no inverse of zero"):
            inv(el(gf7, 0))

    def test_zero_division_is_zero_division_error(self, gf16):
        with pytest.raises(ZeroDivisionError):
            el(gf16, 3) / el(gf16, 0)

    def test_mixed_fields_rejected(self, gf7, gf16):
        with pytest.raises(MixedFieldError):
            el(gf7, 1) + el(gf16, 1)

    def test_element_out_of_range(self, gf7):
        with pytest.raises(FieldError):
            el(gf7, 7)

    def test_negation_and_subtraction(self, gf7):
        a, b = el(gf7, 2), el(gf7, 6)
        assert -a == el(gf7, 5)
        assert a - b == el(gf7, 3)
        assert (a - b) + b == a


# ---------------------------------------------------------------------------
# Field axioms
# ---------------------------------------------------------------------------


class TestAxioms:
    @pytest.mark.parametrize("spec", [FieldSpec.prime(7), FieldSpec.binary(4)], ids=str)
    def test_exhaustive(self, spec):
        q = spec.order
        a, b, c = (x.ravel() for x in np.meshgrid(np.arange(q), np.arange(q), np.arange(q), indexing="ij"))
        assert np.array_equal(spec.add(spec.add(a, b), c), spec.add(a, spec.add(b, c)))
        assert np.array_equal(spec.mul(spec.mul(a, b), c), spec.mul(a, spec.mul(b, c)))
        assert np.array_equal(spec.mul(a, spec.add(b, c)), spec.add(spec.mul(a, b), spec.mul(a, c)))
        assert np.array_equal(spec.mul(a, b), spec.mul(b, a))
        nonzero = np.arange(1, q)
        assert np.all(spec.mul(nonzero, spec.inv(nonzero)) == 1)
        assert np.all(spec.add(nonzero, spec.neg(nonzero)) == 0)

    @given(
        st.integers(0, 65535),
        st.integers(0, 65535),
        st.integers(0, 65535),
    )
    def test_gf65536_random_triples(self, a, b, c):
        f = GF65536
        assert int(f.mul(a, f.add(b, c))) == int(f.add(f.mul(a, b), f.mul(a, c)))
        assert int(f.mul(f.mul(a, b), c)) == int(f.mul(a, f.mul(b, c)))
        if a:
            assert int(f.mul(a, f.inv(a))) == 1

    def test_every_table_polynomial_is_primitive(self):
        for m in range(1, 17):
            exp, log = _binary_tables(m)
            q = 1 << m
            assert sorted(exp[: q - 1].tolist()) == list(range(1, q))
            assert exp[log[q - 1]] == q - 1

    def test_matches_galois(self, rng):
        galois = pytest.importorskip("galois")
        gf = galois.GF(2**16, irreducible_poly=0x1100B)
        a = GF65536.random(500, rng)
        b = GF65536.random(500, rng)
        expected = np.array(gf(a) * gf(b), dtype=np.int64)
        assert np.array_equal(GF65536.mul(a, b), expected)


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------


class TestMatrix:
    def test_read_only(self, gf7):
        m = FieldMatrix.identity(gf7, 3)
        with pytest.raises(ValueError):
            m.entries[0, 0] = 2

    def test_matmul_identity(self, gf7, rng):
        m = FieldMatrix.random(gf7, 4, 3, rng)
        assert FieldMatrix.identity(gf7, 4) @ m == m
        assert m @ FieldMatrix.identity(gf7, 3) == m

    def test_stacking_and_selection(self, gf7):
        a = FieldMatrix.from_rows(gf7, [[1, 2], [3, 4]])
        b = FieldMatrix.from_rows(gf7, [[5, 6]])
        stacked = a.vstack(b)
        assert stacked.rows == 3
        assert stacked.take_rows([2]) == b
        assert a.hstack(a).cols == 4
        assert a.transpose().take_cols([0]) == FieldMatrix.from_rows(gf7, [[1], [2]])

    def test_apply(self, gf7):
        m = FieldMatrix.from_rows(gf7, [[1, 2], [3, 4]])
        assert m.apply([1, 1]).tolist() == [3, 0]

    def test_not_2d(self, gf7):
        with pytest.raises(FieldError, match="2-D"):
            FieldMatrix(gf7, np.zeros(3, dtype=np.int64))


# ---------------------------------------------------------------------------
# Rank / solve / inverse
# ---------------------------------------------------------------------------


class TestRank:
    def test_zero_matrix(self, gf7):
        assert rank(FieldMatrix.zeros(gf7, 3, 4)) == 0

    @pytest.mark.parametrize("size", [1, 3, 8])
    def test_identity(self, gf16, size):
        assert rank(FieldMatrix.identity(gf16, size)) == size

    def test_dependent_row(self, gf7):
        m = FieldMatrix.from_rows(gf7, [[1, 2, 3], [4, 0, 6], [5, 2, 2]])
        assert rank(m) == 2

    def test_empty(self, gf7):
        assert rank(FieldMatrix.zeros(gf7, 0, 5)) == 0

    def test_deterministic(self, gf65536, rng):
        m = FieldMatrix.random(gf65536, 20, 30, rng)
        assert rank(m) == rank(m) == 20

    def test_rank_of_product_bounded(self, gf7, rng):
        a = FieldMatrix.random(gf7, 5, 2, rng)
        b = FieldMatrix.random(gf7, 2, 5, rng)
        assert rank(a @ b) <= 2

    @pytest.mark.parametrize("spec", [FieldSpec.prime(7), FieldSpec.binary(4), FieldSpec.binary(16)], ids=str)
    def test_transpose_preserves_rank(self, spec, rng):
        for _ in range(50):
            rows, cols, inner = rng.integers(1, 9, size=3)
            # low-rank products exercise the deficient case as well
            m = FieldMatrix.random(spec, rows, inner, rng) @ FieldMatrix.random(spec, inner, cols, rng)
            assert rank(m) == rank(m.transpose())

    @pytest.mark.parametrize("spec", [FieldSpec.prime(7), FieldSpec.binary(16)], ids=str)
    def test_hstack_rank_bounds(self, spec, rng):
        for _ in range(50):
            rows, inner = rng.integers(1, 8, size=2)
            a = FieldMatrix.random(spec, rows, inner, rng) @ FieldMatrix.random(spec, inner, rng.integers(1, 6), rng)
            b = FieldMatrix.random(spec, rows, inner, rng) @ FieldMatrix.random(spec, inner, rng.integers(1, 6), rng)
            joint = rank(a.hstack(b))
            assert max(rank(a), rank(b)) <= joint <= rank(a) + rank(b)


class TestRankSplit:
    @pytest.mark.parametrize("spec", [FieldSpec.prime(7), FieldSpec.binary(16)], ids=str)
    def test_matches_separate_ranks(self, spec, rng):
        for _ in range(50):
            rows, inner = rng.integers(1, 8, size=2)
            left = FieldMatrix.random(spec, rows, inner, rng) @ FieldMatrix.random(spec, inner, rng.integers(1, 6), rng)
            right = FieldMatrix.random(spec, rows, rng.integers(1, 6), rng)
            assert rank_split(left, right) == (rank(left), rank(left.hstack(right)))

    def test_full_row_rank_left(self, gf7):
        left = FieldMatrix.identity(gf7, 3)
        right = FieldMatrix.from_rows(gf7, [[1], [2], [3]])
        assert rank_split(left, right) == (3, 3)

    def test_zero_left(self, gf7):
        right = FieldMatrix.from_rows(gf7, [[1, 2], [2, 4]])
        assert rank_split(FieldMatrix.zeros(gf7, 2, 3), right) == (0, 1)

    def test_empty(self, gf7):
        assert rank_split(FieldMatrix.zeros(gf7, 0, 2), FieldMatrix.zeros(gf7, 0, 3)) == (0, 0)

    def test_row_mismatch(self, gf7):
        with pytest.raises(FieldError, match="row mismatch"):
            rank_split(FieldMatrix.zeros(gf7, 2, 2), FieldMatrix.zeros(gf7, 3, 2))

    def test_mixed_fields(self, gf7, gf16):
        with pytest.raises(MixedFieldError):
            rank_split(FieldMatrix.zeros(gf7, 2, 2), FieldMatrix.zeros(gf16, 2, 2))



class TestSolve:
    def test_identity(self, gf7):
        assert solve(FieldMatrix.identity(gf7, 3), [4, 5, 6]).tolist() == [4, 5, 6]

    def test_underdetermined(self, gf7):
        m = FieldMatrix.from_rows(gf7, [[1, 2], [2, 4]])
        with pytest.raises(UnderdeterminedError, match="underdetermined"):
            solve(m, [3, 6])

    def test_inconsistent(self, gf7):
        m = FieldMatrix.from_rows(gf7, [[1, 2], [2, 4]])
        with pytest.raises(NoSolutionError, match="no solution"):
            solve(m, [3, 5])

    @pytest.mark.parametrize("spec", [FieldSpec.prime(7), FieldSpec.binary(16)], ids=str)
    def test_round_trip(self, spec, rng):
        for _ in range(20):
            a = FieldMatrix.random(spec, 6, 6, rng)
            if rank(a) < 6:
                continue
            x = spec.random(6, rng)
            assert np.array_equal(solve(a, a.apply(x)), x)

    def test_overdetermined_consistent(self, gf7, rng):
        a = FieldMatrix.random(gf7, 8, 3, rng)
        while rank(a) < 3:
            a = FieldMatrix.random(gf7, 8, 3, rng)
        x = gf7.random(3, rng)
        assert np.array_equal(solve(a, a.apply(x)), x)


class TestInverse:
    def test_inverse_times_matrix(self, gf65536, rng):
        a = FieldMatrix.random(gf65536, 5, 5, rng)
        assert inverse(a) @ a == FieldMatrix.identity(gf65536, 5)

    def test_singular(self, gf7):
        with pytest.raises(SingularMatrixError):
            inverse(FieldMatrix.from_rows(gf7, [[1, 2], [2, 4]]))

    def test_all_invertible_2x2_over_gf2(self):
        gf2 = FieldSpec.prime(2)
        invertible = 0
        for bits in itertools.product([0, 1], repeat=4):
            m = FieldMatrix(gf2, np.array(bits, dtype=np.int64).reshape(2, 2))
            if rank(m) == 2:
                invertible += 1
                assert inverse(m) @ m == FieldMatrix.identity(gf2, 2)
        assert invertible == 6
