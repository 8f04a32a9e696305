"""Share-file binary format."""

import numpy as np
import pytest

from secregen.cli.sharefile import (
    HEADER_SIZE,
    IncompatibleSharesError,
    ShareFile,
    ShareFormatError,
    ShareHeader,
    load_share_dir,
    read_share,
    share_filename,
    symbol_width,
    write_share,
)
from secregen.codes.field import FieldSpec

GOLDEN_HEADER = bytes.fromhex(
    "52474331"  # magic
    "01"  # version
    "0700" "0100" "0300"  # n, ell, t
    "00" "00000100"  # GF(2^16)
    "0100"  # node
    "0f000000"  # payload symbols
    "0100000000000000"  # message bytes
    "4f"  # padding
)


@pytest.fixture
def header():
    return ShareHeader(7, 1, 3, FieldSpec.binary(16), 1, 15, 1, 79)


class TestHeader:
    def test_golden_bytes(self, header):
        assert HEADER_SIZE == 31
        assert header.pack() == GOLDEN_HEADER

    def test_unpack_golden(self, header):
        assert ShareHeader.unpack(GOLDEN_HEADER) == header

    def test_bad_magic(self):
        with pytest.raises(ShareFormatError, match="magic"):
            ShareHeader.unpack(b"XXXX" + GOLDEN_HEADER[4:])

    def test_bad_version(self):
        with pytest.raises(ShareFormatError, match="version"):
            ShareHeader.unpack(GOLDEN_HEADER[:4] + b"\x02" + GOLDEN_HEADER[5:])

    def test_truncated(self):
        with pytest.raises(ShareFormatError, match="truncated"):
            ShareHeader.unpack(GOLDEN_HEADER[:20])

    def test_run_key_ignores_node(self, header):
        other = ShareHeader(7, 1, 3, FieldSpec.binary(16), 5, 15, 1, 79)
        assert other.run_key() == header.run_key()
        assert other != header

    @pytest.mark.parametrize("spec, width", [(FieldSpec.binary(8), 1), (FieldSpec.binary(16), 2)])
    def test_symbol_width(self, spec, width):
        assert symbol_width(spec) == width

    @pytest.mark.parametrize("spec", [FieldSpec.binary(4), FieldSpec.prime(257)], ids=str)
    def test_unsupported_field(self, spec):
        with pytest.raises(ShareFormatError, match="GF\\(2\\^8\\) or GF\\(2\\^16\\)"):
            symbol_width(spec)


class TestShareFile:
    def test_payload_little_endian(self, header):
        payload = np.arange(15, dtype=np.int64).reshape(1, 15) * 257
        data = ShareFile(header, payload).to_bytes()
        assert len(data) == 31 + 30
        assert data[31:35] == bytes([0, 0, 1, 1])

    def test_round_trip_through_disk(self, header, tmp_path):
        payload = np.full((1, 15), 0xABCD, dtype=np.int64)
        path = tmp_path / share_filename(1)
        write_share(path, ShareFile(header, payload))
        loaded = read_share(path)
        assert loaded.header == header
        assert np.array_equal(loaded.payload, payload)

    def test_payload_length_mismatch(self, header):
        data = ShareFile(header, np.zeros((1, 15), dtype=np.int64)).to_bytes()
        with pytest.raises(ShareFormatError, match="payload"):
            ShareFile.from_bytes(data[:-2])

    def test_filename(self):
        assert share_filename(3) == "share-03.rgc"


class TestLoadDir:
    def test_mixed_headers(self, header, tmp_path):
        payload = np.zeros((1, 15), dtype=np.int64)
        write_share(tmp_path / share_filename(1), ShareFile(header, payload))
        other = ShareHeader(7, 1, 3, FieldSpec.binary(16), 2, 15, 2, 78)
        write_share(tmp_path / share_filename(2), ShareFile(other, payload))
        with pytest.raises(IncompatibleSharesError, match="incompatible shares"):
            load_share_dir(tmp_path)

    def test_duplicate_node(self, header, tmp_path):
        payload = np.zeros((1, 15), dtype=np.int64)
        write_share(tmp_path / "a.rgc", ShareFile(header, payload))
        write_share(tmp_path / "b.rgc", ShareFile(header, payload))
        with pytest.raises(IncompatibleSharesError, match="twice"):
            load_share_dir(tmp_path)

    def test_ignores_other_files(self, header, tmp_path):
        write_share(tmp_path / share_filename(1), ShareFile(header, np.zeros((1, 15), dtype=np.int64)))
        (tmp_path / "notes.txt").write_text("hello")
        assert list(load_share_dir(tmp_path)) == [1]
