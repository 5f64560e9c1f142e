"""RHMP heatmap files."""

from __future__ import annotations

import struct

import numpy as np
import pytest

from RopeTK.Core.errors import DataError
from RopeTK.Heatmaps.codec import decode
from RopeTK.Heatmaps.codec import encode
from RopeTK.Heatmaps.codec import load_stack
from RopeTK.Heatmaps.codec import save_stack
from RopeTK.Heatmaps.stack import HeatmapStack
from RopeTK.Heatmaps.stack import make_gaussian_stack


@pytest.fixture
def stack() -> HeatmapStack:
    return make_gaussian_stack([[10.2, 5.5], [3.0, 7.75]], (16, 12), 1.5)


class TestRhmp:

    def test_layout(self, stack: HeatmapStack):
        data = encode(stack)
        assert data[:4] == b"RHMP"
        assert data[4] == 1
        assert struct.unpack_from("<III", data, 5) == (2, 12, 16)
        assert len(data) == 17 + 4 * 2 * 12 * 16 + 1
        assert data[-1] == 1

    def test_values_survive_as_float32(self, stack: HeatmapStack):
        again = decode(encode(stack))
        assert again.normalized
        np.testing.assert_array_equal(again.values, stack.values.astype(np.float32).astype(np.float64))

    def test_raw_flag(self):
        raw = HeatmapStack(np.arange(6.0).reshape(1, 2, 3) - 2.0)
        again = decode(encode(raw))
        assert not again.normalized
        np.testing.assert_array_equal(again.values, raw.values)

    def test_file_round_trip(self, tmp_path, stack: HeatmapStack):
        path = tmp_path / "high.rhmp"
        save_stack(path, stack)
        assert path.read_bytes() == encode(stack)
        np.testing.assert_array_equal(load_stack(path).values, decode(encode(stack)).values)

    @pytest.mark.parametrize(
        "mangle",
        [
            lambda data: b"XHMP" + data[4:],
            lambda data: data[:4] + b"\x02" + data[5:],
            lambda data: data[:-5],
            lambda data: data[:10],
        ],
        ids=["magic", "version", "size", "truncated"],
    )
    def test_corrupt_payloads(self, stack: HeatmapStack, mangle):
        with pytest.raises(DataError):
            decode(mangle(encode(stack)))

    def test_normalized_flag_on_bad_sums(self):
        raw = HeatmapStack(np.ones((1, 2, 2)))
        data = encode(raw)
        with pytest.raises(DataError):
            decode(data[:-1] + b"\x01")

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError):
            load_stack(tmp_path / "absent.rhmp")
