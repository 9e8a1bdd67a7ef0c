import numpy as np
import pytest

from radam.aggregate import AggregatedMap
from radam.posenc import add_pe, positional_encoding


def _grid(w, h, z, fill=0.0):
    return AggregatedMap(
        data=np.full((w * h, z), fill), width=w, height=h, channel_offsets=[0]
    )


class TestTable:
    def test_origin_row(self):
        pe = positional_encoding(4, 4, 8)
        row = pe.table[0]  # pixel (0, 0)
        assert np.allclose(row[0::2], 0.0)  # all sin channels
        assert np.allclose(row[1::2], 1.0)  # all cos channels

    def test_pixel_one_zero_first_channel(self):
        pe = positional_encoding(4, 4, 8)
        # row r=1 is pixel (x=1, y=0); channel 0 is sin(x / 10000^0)
        assert np.isclose(pe.table[1, 0], np.sin(1.0))
        assert np.isclose(pe.table[1, 0], 0.84147, atol=1e-5)

    def test_frequency_progression(self):
        z = 16
        pe = positional_encoding(3, 1, z)
        for i in range(z // 4):
            expected = np.sin(2.0 / 10000 ** (4 * i / z))
            assert np.isclose(pe.table[2, 2 * i], expected)

    def test_single_pixel_grid(self):
        pe = positional_encoding(1, 1, 12)
        assert np.allclose(pe.table[0, 0::2], 0.0)
        assert np.allclose(pe.table[0, 1::2], 1.0)

    def test_bounds(self):
        pe = positional_encoding(7, 5, 24)
        assert np.abs(pe.table).max() <= 1.0

    def test_translation_structure(self):
        w, h, z = 6, 4, 16
        pe = positional_encoding(w, h, z)
        t = pe.table.reshape(h, w, z)
        # same x, different y: first half identical
        assert np.array_equal(t[0, 3, : z // 2], t[2, 3, : z // 2])
        # same y, different x: second half identical
        assert np.array_equal(t[1, 0, z // 2 :], t[1, 5, z // 2 :])

    def test_determinism(self):
        a = positional_encoding(5, 5, 8).table
        b = positional_encoding(5, 5, 8).table
        assert np.array_equal(a, b)

    def test_z_not_multiple_of_four(self):
        with pytest.raises(ValueError):
            positional_encoding(4, 4, 10)

    def test_bad_grid(self):
        with pytest.raises(ValueError):
            positional_encoding(0, 4, 8)


class TestAddPe:
    def test_zero_map_gives_table(self):
        pe = positional_encoding(3, 3, 8)
        out = add_pe(_grid(3, 3, 8), pe)
        assert np.array_equal(out.data, pe.table)

    def test_subtraction_oracle(self):
        rng = np.random.default_rng(0)
        pe = positional_encoding(4, 2, 8)
        x = AggregatedMap(
            data=rng.standard_normal((8, 8)), width=4, height=2, channel_offsets=[0]
        )
        out = add_pe(x, pe)
        assert np.allclose(out.data - x.data, pe.table, atol=1e-7)

    def test_shape_mismatch(self):
        pe = positional_encoding(3, 3, 8)
        with pytest.raises(ValueError):
            add_pe(_grid(2, 2, 8), pe)
