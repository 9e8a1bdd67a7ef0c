import numpy as np
import pytest

from radam.aggregate import ActivationMap, aggregate_maps
from radam.posenc import add_pe, positional_encoding
from radam.rae import (
    fit_decoder,
    radam_feature,
    sigmoid_forward,
    soup,
)
from radam.rng import LcgParams, encoder_weights


class TestSigmoid:
    def test_zero_input(self):
        g = sigmoid_forward(np.zeros((3, 2)), np.ones((2, 1)))
        assert np.allclose(g, 0.5)

    def test_saturation_no_overflow(self):
        g = sigmoid_forward(np.array([[40.0], [-40.0]]), np.ones((1, 1)))
        assert np.isclose(g[0, 0], 1.0, atol=1e-12)
        assert g[1, 0] > 0.0

    def test_log3_gives_three_quarters(self):
        # x @ w = [0, ln 3]
        x = np.array([[0.0, 0.0], [np.log(3.0), 0.0]])
        w = np.array([[1.0], [0.0]])
        assert np.allclose(sigmoid_forward(x, w)[:, 0], [0.5, 0.75])

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            sigmoid_forward(np.ones((3, 2)), np.ones((3, 1)))


class TestFitDecoder:
    def test_exact_reconstruction(self):
        g = np.array([1.0, 1.0])
        x = np.array([[2.0, 4.0], [2.0, 4.0]])
        f = fit_decoder(x, g).nu
        assert np.allclose(f, [2.0, 4.0])
        assert np.allclose(np.outer(g, f), x)

    def test_scale_covariance(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal((10, 4))
        g = rng.random(10) + 0.1
        f1 = fit_decoder(x, g).nu
        f2 = fit_decoder(x, 3.0 * g).nu
        assert np.allclose(f2, f1 / 3.0)
        assert np.allclose(np.outer(3.0 * g, f2), np.outer(g, f1))

    def test_normal_equation_residual(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal((784, 64))
        g = rng.random(784)
        f = fit_decoder(x, g).nu
        lhs = x.T @ g
        residual = np.linalg.norm(lhs - (g @ g) * f)
        assert residual <= 1e-6 * np.linalg.norm(lhs)

    def test_q2_least_squares(self):
        rng = np.random.default_rng(2)
        x = rng.standard_normal((50, 8))
        g = rng.random((50, 2))
        f = fit_decoder(x, g).nu
        # compare with lstsq solving g @ f.T ~= x
        ref, *_ = np.linalg.lstsq(g, x, rcond=None)
        assert np.allclose(f, ref.T, atol=1e-8)

    def test_degenerate_encoder(self):
        from radam.rng import DegenerateInputError

        with pytest.raises(DegenerateInputError):
            fit_decoder(np.ones((3, 2)), np.zeros(3))


class TestSoup:
    def test_singleton(self):
        from radam.rae import DecoderWeights

        f = DecoderWeights(nu=np.array([1.0, 2.0]))
        assert np.array_equal(soup([f]).phi, [1.0, 2.0])

    def test_doubling(self):
        from radam.rae import DecoderWeights

        f = DecoderWeights(nu=np.array([1.0, -2.0]))
        assert np.array_equal(soup([f, f]).phi, [2.0, -4.0])

    def test_fold_sum_oracle(self):
        from radam.rae import DecoderWeights

        rng = np.random.default_rng(3)
        vecs = [rng.standard_normal(6) for _ in range(4)]
        expected = np.zeros(6)
        for v in vecs:
            expected = expected + v
        out = soup([DecoderWeights(nu=v) for v in vecs])
        assert np.array_equal(out.phi, expected)
        assert out.m == 4

    def test_length_mismatch(self):
        from radam.rae import DecoderWeights

        with pytest.raises(ValueError):
            soup([DecoderWeights(nu=np.ones(3)), DecoderWeights(nu=np.ones(4))])


def _toy_maps(seed=0):
    rng = np.random.default_rng(seed)
    return [
        ActivationMap(rng.standard_normal((8, 8, 4)), 1),
        ActivationMap(rng.standard_normal((4, 4, 4)), 2),
    ]


class TestRadamFeature:
    def test_convnext_t_length(self):
        rng = np.random.default_rng(4)
        sizes = [(14, 96), (7, 192), (4, 384), (2, 768)]  # shrunk spatially
        maps = [
            ActivationMap(rng.standard_normal((s, s, z)), i)
            for i, (s, z) in enumerate(sizes, 1)
        ]
        assert radam_feature(maps, m=4).phi.shape == (1440,)

    def test_determinism(self):
        maps = _toy_maps()
        a = radam_feature(maps, m=1)
        b = radam_feature(maps, m=1)
        assert np.array_equal(a.phi, b.phi)

    def test_prefix_decomposition(self):
        maps = _toy_maps(5)
        lcg = LcgParams()
        phi1 = radam_feature(maps, m=1, lcg=lcg).phi
        phi2 = radam_feature(maps, m=2, lcg=lcg).phi
        # decoder of RAE 2 alone, composed by hand
        agg = aggregate_maps(maps)
        z = agg.data.shape[1]
        pe = positional_encoding(agg.width, agg.height, z)
        data = add_pe(agg, pe).data
        w2 = encoder_weights(lcg, z=z, q=1, m=2)[1]
        g2 = sigmoid_forward(data, w2)
        f2 = fit_decoder(data, g2).nu
        assert np.max(np.abs((phi2 - phi1) - f2)) <= 1e-9

    def test_invalid_m(self):
        with pytest.raises(ValueError):
            radam_feature(_toy_maps(), m=0)
