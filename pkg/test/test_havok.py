import logging
import unittest

import numpy as np

from hankeldyn.havok import HavokModel, delay_matrix, havok_fit, havok_predict, one_step_error


def two_tones(n, start=0):
    k = np.arange(start, start + n)
    return np.sin(0.1 * k) + 0.5 * np.sin(0.23 * k + 1.0)


class TestDelayMatrix(unittest.TestCase):

    def test_anti_diagonals(self):
        series = np.random.RandomState(0).normal(size=30)
        h = delay_matrix(series, 7)
        self.assertEqual(h.shape, (7, 24))
        for i in range(7):
            for j in range(24):
                self.assertEqual(h[i, j], series[i + j])

    def test_channels(self):
        series = np.arange(20.0).reshape(10, 2)
        h = delay_matrix(series, 3)
        self.assertEqual(h.shape, (6, 8))
        self.assertTrue(np.array_equal(h[:3], delay_matrix(series[:, 0], 3)))
        self.assertTrue(np.array_equal(h[3:], delay_matrix(series[:, 1], 3)))

    def test_invalid(self):
        self.assertRaises(ValueError, delay_matrix, np.ones(5), 6)
        self.assertRaises(ValueError, delay_matrix, np.ones(5), 0)


class TestHavok(unittest.TestCase):

    def test_linear_signal_forecast(self):
        model = havok_fit(two_tones(400), q=20, r=4)
        forecast = havok_predict(model, two_tones(20, start=400), 100)
        self.assertEqual(forecast.shape, (100,))
        self.assertLess(np.max(np.abs(forecast - two_tones(100, start=420))), 1e-6)
        self.assertLess(one_step_error(model, two_tones(200)), 1e-12)

    def test_rank_reduction(self):
        with self.assertLogs("hankeldyn.havok", level=logging.WARNING):
            model = havok_fit(two_tones(400), q=20, r=6)
        self.assertEqual(model.r, 4)
        self.assertEqual(model.m.shape, (4, 4))

    def test_several_series(self):
        model = havok_fit([two_tones(150), two_tones(150, start=1000)], q=20, r=4)
        forecast = havok_predict(model, two_tones(20, start=500), 50)
        self.assertLess(np.max(np.abs(forecast - two_tones(50, start=520))), 1e-6)

    def test_multichannel(self):
        series = np.column_stack([two_tones(300), two_tones(300, start=7)])
        model = havok_fit(series, q=10, r=4)
        self.assertEqual(model.channels, 2)
        self.assertEqual(model.basis.shape, (20, 4))
        window = np.column_stack([two_tones(10, start=300), two_tones(10, start=307)])
        forecast = havok_predict(model, window, 30)
        self.assertEqual(forecast.shape, (30, 2))
        self.assertLess(np.max(np.abs(forecast[:, 0] - two_tones(30, start=310))), 1e-6)

    def test_planted_delay_system(self):
        # x_k is a fixed linear combination of the previous four samples.
        roots = [0.999 * np.exp(1j * 0.2), 0.999 * np.exp(-1j * 0.2),
                 0.995 * np.exp(1j * 0.45), 0.995 * np.exp(-1j * 0.45)]
        coeffs = -np.real(np.poly(roots))[1:]
        x = np.zeros(500)
        x[:4] = np.random.RandomState(2).normal(size=4)
        for k in range(4, 500):
            x[k] = coeffs.dot(x[k - 4:k][::-1])
        model = havok_fit(x[:400], q=12, r=4)
        self.assertEqual(model.r, 4)
        forecast = havok_predict(model, x[388:400], 100)
        scale = np.max(np.abs(x))
        self.assertLess(np.max(np.abs(forecast - x[400:])), 1e-3 * scale)
        self.assertLess(one_step_error(model, x), 1e-6 * scale ** 2)

    def test_coordinate(self):
        rows = np.column_stack([np.random.RandomState(3).normal(size=300), two_tones(300)])
        model = havok_fit(rows, q=20, r=4, coordinate=1)
        alone = havok_fit(two_tones(300), q=20, r=4)
        self.assertEqual((model.channels, model.coordinate), (1, 1))
        self.assertTrue(np.allclose(havok_predict(model, rows[-20:], 5),
                                    havok_predict(alone, two_tones(20, start=280), 5)))
        forecast = havok_predict(model, rows[-20:], 30)
        self.assertEqual(forecast.shape, (30,))
        self.assertLess(np.max(np.abs(forecast - two_tones(30, start=300))), 1e-6)
        restored = HavokModel.from_dict(model.to_dict())
        self.assertEqual(restored.coordinate, 1)
        self.assertEqual(restored.embed(rows[-20:]).shape, (4,))
        self.assertRaises(ValueError, havok_fit, rows, q=20, r=4, coordinate=2)

    def test_transitions(self):
        clean = two_tones(200)
        corrupt = clean.copy()
        corrupt[150:] = np.random.RandomState(4).normal(size=50)
        keep = np.arange(199) < 140
        model = havok_fit(corrupt, q=20, r=4, transitions=[keep])
        forecast = havok_predict(model, two_tones(20, start=500), 50)
        self.assertLess(np.max(np.abs(forecast - two_tones(50, start=520))), 1e-6)
        self.assertLess(one_step_error(model, corrupt, transitions=[keep]), 1e-12)
        self.assertRaises(ValueError, havok_fit, clean, q=20, r=4,
                          transitions=[np.ones(10, dtype=bool)])
        self.assertRaises(ValueError, havok_fit, clean, q=20, r=4,
                          transitions=[np.zeros(199, dtype=bool)])

    def test_counts(self):
        model = havok_fit(np.random.RandomState(1).normal(size=300), q=100, r=15)
        self.assertEqual(model.param_count(), 100 * 15 + 15 * 15)
        self.assertEqual(model.flop_count(), 2 * 15 * 15 + 2 * 15)

    def test_invalid(self):
        self.assertRaises(ValueError, havok_fit, two_tones(100), q=10, r=11)
        self.assertRaises(ValueError, havok_fit, two_tones(20), q=10, r=10)
        self.assertRaises(ValueError, havok_fit, [])
        self.assertRaises(ValueError, havok_fit, [two_tones(100), np.ones((100, 2))], q=10, r=2)
        model = havok_fit(two_tones(100), q=10, r=4)
        self.assertRaises(ValueError, havok_predict, model, two_tones(10), 0)
        self.assertRaises(ValueError, model.embed, two_tones(9))

    def test_dict(self):
        model = havok_fit(two_tones(100), q=10, r=4)
        restored = HavokModel.from_dict(model.to_dict())
        self.assertTrue(np.array_equal(restored.m, model.m))
        self.assertEqual(restored.newest_rows(), [9])
        self.assertRaises(ValueError, HavokModel.from_dict, {"kind": "dmd"})


if __name__ == "__main__":
    unittest.main()
