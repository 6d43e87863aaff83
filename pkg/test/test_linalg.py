import unittest

import numpy as np

from hankeldyn import linalg
from hankeldyn.errors import (
    ConvergenceError, NotPowerOfTwoError, SingularSystemError)
from hankeldyn.hankel import FlopCounter


class TestPowerOfTwo(unittest.TestCase):

    def test_is_power_of_two(self):
        self.assertTrue(all(linalg.is_power_of_two(n) for n in (1, 2, 4, 1024)))
        self.assertFalse(any(linalg.is_power_of_two(n) for n in (0, 3, 6, 1000)))

    def test_next_power_of_two(self):
        self.assertEqual(linalg.next_power_of_two(1), 1)
        self.assertEqual(linalg.next_power_of_two(5), 8)
        self.assertEqual(linalg.next_power_of_two(8), 8)
        self.assertRaises(ValueError, linalg.next_power_of_two, 0)


class TestFFT(unittest.TestCase):

    def test_matches_numpy(self):
        gen = np.random.RandomState(1)
        for n in (1, 2, 8, 64):
            v = gen.normal(size=n) + 1j * gen.normal(size=n)
            np.testing.assert_allclose(linalg.fft(v), np.fft.fft(v), atol=1e-10)
            np.testing.assert_allclose(linalg.ifft(v), np.fft.ifft(v), atol=1e-10)

    def test_batched(self):
        v = np.random.RandomState(2).normal(size=(3, 16))
        np.testing.assert_allclose(linalg.fft(v), np.fft.fft(v, axis=-1), atol=1e-10)

    def test_round_trip(self):
        v = np.random.RandomState(3).normal(size=32)
        np.testing.assert_allclose(linalg.ifft(linalg.fft(v)).real, v, atol=1e-12)

    def test_not_power_of_two(self):
        with self.assertRaises(NotPowerOfTwoError) as cm:
            linalg.fft(np.ones(6))
        self.assertEqual(cm.exception.length, 6)
        self.assertEqual(cm.exception.required_length, 8)
        self.assertIsInstance(cm.exception, ValueError)

    def test_counter(self):
        counter = FlopCounter()
        linalg.fft(np.ones(8), counter=counter)
        # three stages of four butterflies
        self.assertEqual(counter.mults, 3 * 16)
        self.assertEqual(counter.adds, 3 * 24)

    def test_rfft(self):
        x = np.random.RandomState(4).normal(size=16)
        np.testing.assert_allclose(linalg.rfft(x), np.fft.rfft(x), atol=1e-10)
        np.testing.assert_allclose(linalg.irfft(np.fft.rfft(x), 16), x, atol=1e-10)
        self.assertRaises(NotPowerOfTwoError, linalg.rfft, np.ones(12))


class TestSVD(unittest.TestCase):

    def _check(self, a):
        u, s, v = linalg.svd(a)
        k = min(a.shape)
        self.assertEqual(u.shape, (a.shape[0], k))
        self.assertEqual(v.shape, (a.shape[1], k))
        np.testing.assert_allclose(u.dot(np.diag(s)).dot(v.T), a, atol=1e-10)
        np.testing.assert_allclose(u.T.dot(u), np.eye(k), atol=1e-10)
        np.testing.assert_allclose(v.T.dot(v), np.eye(k), atol=1e-10)
        np.testing.assert_allclose(s, np.linalg.svd(a, compute_uv=False), atol=1e-10)
        self.assertTrue(np.all(np.diff(s) <= 0))

    def test_square(self):
        self._check(np.random.RandomState(5).normal(size=(6, 6)))

    def test_tall(self):
        self._check(np.random.RandomState(6).normal(size=(50, 5)))

    def test_wide(self):
        self._check(np.random.RandomState(7).normal(size=(4, 9)))

    def test_rank_deficient(self):
        gen = np.random.RandomState(8)
        a = np.outer(gen.normal(size=5), gen.normal(size=5))
        self._check(a)
        self.assertEqual(np.count_nonzero(linalg.singular_values(a) > 1e-10), 1)

    def test_zero(self):
        u, s, v = linalg.svd(np.zeros((3, 3)))
        self.assertTrue(np.all(s == 0))
        np.testing.assert_allclose(u.T.dot(u), np.eye(3), atol=1e-12)

    def test_invalid(self):
        self.assertRaises(ValueError, linalg.svd, np.array([[np.nan, 1.0]]))
        self.assertRaises(ValueError, linalg.svd, np.ones(3))

    def test_sweep_cap(self):
        a = np.random.RandomState(9).normal(size=(8, 8))
        with self.assertRaises(ConvergenceError) as cm:
            linalg.svd(a, max_sweeps=1)
        self.assertEqual(cm.exception.iterations, 1)

    def test_norms(self):
        a = np.diag([3.0, -2.0, 0.5])
        self.assertAlmostEqual(linalg.nuclear_norm(a), 5.5)
        self.assertAlmostEqual(linalg.spectral_norm(a), 3.0)


class TestPinv(unittest.TestCase):

    def test_matches_numpy(self):
        a = np.random.RandomState(10).normal(size=(3, 40))
        np.testing.assert_allclose(linalg.pinv(a), np.linalg.pinv(a), atol=1e-10)

    def test_zero(self):
        self.assertTrue(np.array_equal(linalg.pinv(np.zeros((2, 3))), np.zeros((3, 2))))


class TestDampedSolve(unittest.TestCase):

    def test_solve(self):
        jtj = np.array([[2.0, 1.0], [1.0, 3.0]])
        rhs = np.array([1.0, 2.0])
        delta = linalg.solve_damped_normal(jtj, 0.5, rhs)
        np.testing.assert_allclose((jtj + 0.5 * np.eye(2)).dot(delta), rhs)

    def test_singular(self):
        jtj = np.array([[1.0, 1.0], [1.0, 1.0]])
        with self.assertRaises(SingularSystemError) as cm:
            linalg.solve_damped_normal(jtj, 0.0, np.ones(2))
        self.assertIn("increase the damping", str(cm.exception))
        delta = linalg.solve_damped_normal(jtj, 1e-3, np.ones(2))
        self.assertTrue(np.all(np.isfinite(delta)))

    def test_negative_damping(self):
        self.assertRaises(ValueError, linalg.solve_damped_normal, np.eye(2), -1.0,
                          np.ones(2))


if __name__ == "__main__":
    unittest.main()
