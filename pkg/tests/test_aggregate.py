import numpy as np
import pytest

from radam.aggregate import (
    ActivationMap,
    aggregate_maps,
    anchor_index,
    gap,
    gap_agg,
    normalize_channels,
    resize_bilinear,
)


def _amap(data, idx=1):
    return ActivationMap(data=np.asarray(data, dtype=np.float64), block_index=idx)


class TestNormalize:
    def test_single_channel(self):
        m = _amap(np.array([[3.0, 4.0], [0.0, 0.0]]).reshape(2, 2, 1))
        out = normalize_channels(m)
        assert np.allclose(out.data[:, :, 0], [[0.6, 0.8], [0.0, 0.0]])

    def test_zero_channel_untouched(self):
        m = _amap(np.zeros((3, 3, 2)))
        assert np.array_equal(normalize_channels(m).data, np.zeros((3, 3, 2)))

    def test_unit_norm(self):
        rng = np.random.default_rng(0)
        m = _amap(rng.standard_normal((5, 7, 4)))
        out = normalize_channels(m)
        norms = np.linalg.norm(out.data.reshape(-1, 4), axis=0)
        assert np.allclose(norms, 1.0, atol=1e-6)


def _bilinear_oracle(src, tw, th):
    # straightforward per-pixel half-pixel-center formula
    h, w = src.shape
    out = np.empty((th, tw))
    for r in range(th):
        for c in range(tw):
            sy = min(max((r + 0.5) * h / th - 0.5, 0.0), h - 1.0)
            sx = min(max((c + 0.5) * w / tw - 0.5, 0.0), w - 1.0)
            y0, x0 = int(np.floor(sy)), int(np.floor(sx))
            y1, x1 = min(y0 + 1, h - 1), min(x0 + 1, w - 1)
            fy, fx = sy - y0, sx - x0
            out[r, c] = (
                src[y0, x0] * (1 - fy) * (1 - fx)
                + src[y0, x1] * (1 - fy) * fx
                + src[y1, x0] * fy * (1 - fx)
                + src[y1, x1] * fy * fx
            )
    return out


class TestResize:
    def test_identity(self):
        rng = np.random.default_rng(1)
        src = rng.standard_normal((28, 28))
        assert np.array_equal(resize_bilinear(src, 28, 28), src)

    def test_constant_extension(self):
        out = resize_bilinear(np.full((1, 1), 7.0), 4, 4)
        assert np.allclose(out, 7.0)

    def test_matches_oracle_2x2_to_4x4(self):
        src = np.array([[0.0, 1.0], [2.0, 3.0]])
        assert np.allclose(
            resize_bilinear(src, 4, 4), _bilinear_oracle(src, 4, 4), atol=1e-6
        )

    @pytest.mark.parametrize("shape,target", [((5, 3), (8, 2)), ((7, 7), (3, 9))])
    def test_matches_oracle_random(self, shape, target):
        rng = np.random.default_rng(2)
        src = rng.standard_normal(shape)
        tw, th = target
        assert np.allclose(
            resize_bilinear(src, tw, th), _bilinear_oracle(src, tw, th), atol=1e-10
        )

    def test_bad_target(self):
        with pytest.raises(ValueError):
            resize_bilinear(np.ones((2, 2)), 0, 4)


class TestAggregate:
    def test_anchor_rule(self):
        assert anchor_index(4) == 2
        assert anchor_index(5) == 3

    def test_convnext_t_shapes(self):
        rng = np.random.default_rng(3)
        sizes = [(56, 96), (28, 192), (14, 384), (7, 768)]
        maps = [
            _amap(rng.standard_normal((s, s, z)), i)
            for i, (s, z) in enumerate(sizes, 1)
        ]
        agg = aggregate_maps(maps)
        assert agg.data.shape == (28 * 28, 1440)
        assert (agg.width, agg.height) == (28, 28)

    def test_constant_maps_give_identical_rows(self):
        m1 = _amap(np.tile([1.0, 2.0], (4, 4, 1)), 1)
        m2 = _amap(np.tile([5.0], (4, 4, 1)), 2)
        agg = aggregate_maps([m1, m2])
        assert np.allclose(agg.data, agg.data[0])

    def test_three_blocks_manual_oracle(self):
        rng = np.random.default_rng(4)
        maps = [
            _amap(rng.standard_normal((8, 8, 2)), 1),
            _amap(rng.standard_normal((4, 4, 3)), 2),
            _amap(rng.standard_normal((2, 2, 1)), 3),
        ]
        agg = aggregate_maps(maps)
        assert agg.data.shape == (16, 6)
        assert agg.channel_offsets == [0, 2, 5]
        # manual composition on the middle (anchor) block
        from radam.aggregate import normalize_channels as nc
        expected_mid = nc(maps[1]).data.reshape(16, 3)
        assert np.allclose(agg.data[:, 2:5], expected_mid)

    def test_column_provenance(self):
        rng = np.random.default_rng(5)
        base = [rng.standard_normal((4, 4, 2)), rng.standard_normal((2, 2, 3))]
        agg1 = aggregate_maps([_amap(base[0], 1), _amap(base[1], 2)])
        perturbed = base[1] + rng.standard_normal((2, 2, 3))
        agg2 = aggregate_maps([_amap(base[0], 1), _amap(perturbed, 2)])
        assert np.array_equal(agg1.data[:, :2], agg2.data[:, :2])
        assert not np.allclose(agg1.data[:, 2:], agg2.data[:, 2:])

    def test_row_pixel_bijection(self):
        h, w = 3, 5
        data = np.arange(h * w, dtype=np.float64).reshape(h, w, 1)
        m1 = _amap(data, 1)
        m2 = _amap(data, 2)
        agg = aggregate_maps([m1, m2])
        for y in range(h):
            for x in range(w):
                r = y * w + x
                norm = np.linalg.norm(data[:, :, 0])
                assert np.isclose(agg.data[r, 0], data[y, x, 0] / norm)

    def test_single_map_rejected(self):
        with pytest.raises(ValueError):
            aggregate_maps([_amap(np.ones((2, 2, 4)), 1)])

    def test_unsorted_rejected(self):
        maps = [_amap(np.ones((2, 2, 4)), 2), _amap(np.ones((2, 2, 4)), 1)]
        with pytest.raises(ValueError):
            aggregate_maps(maps)


class TestGap:
    def test_constant(self):
        assert np.allclose(gap(_amap(np.full((3, 3, 1), 5.0))), [5.0])

    def test_mean(self):
        m = _amap(np.array([[0.0, 1.0], [2.0, 3.0]]).reshape(2, 2, 1))
        assert np.allclose(gap(m), [1.5])

    def test_shape(self):
        assert gap(_amap(np.ones((4, 5, 3)))).shape == (3,)

    def test_gap_agg_concatenates(self):
        m1 = _amap(np.full((2, 2, 2), 1.0), 1)
        m2 = _amap(np.full((3, 3, 2), 2.0), 2)
        out = gap_agg([m1, m2])
        assert np.allclose(out, [1.0, 1.0, 2.0, 2.0])

    def test_gap_agg_length(self):
        rng = np.random.default_rng(6)
        sizes = [(56, 96), (28, 192), (14, 384), (7, 768)]
        maps = [
            _amap(rng.standard_normal((4, 4, z)), i)
            for i, (_, z) in enumerate(sizes, 1)
        ]
        assert gap_agg(maps).shape == (1440,)
