import unittest

import numpy as np

from hankeldyn.hankel import (
    CirculantEmbedding, FlopCounter, HankelOperator, anti_identity,
    complexity_report, reflect_index, upper_shift)


def brute_force_matvec(h, x):
    out = np.zeros(h.n)
    for i in range(h.n):
        for j in range(h.n):
            out[i] += h.entry(i, j) * x[j]
    return out


class TestHankelOperator(unittest.TestCase):

    def test_init(self):
        self.assertRaises(ValueError, HankelOperator, [])
        self.assertRaises(ValueError, HankelOperator, [1.0, np.inf])
        self.assertRaises(ValueError, HankelOperator, np.ones((2, 2)))
        h = HankelOperator([1.0, 2.0])
        self.assertEqual(len(h), 2)
        self.assertEqual(h, HankelOperator([1.0, 2.0]))

    def test_immutable(self):
        samples = np.array([1.0, 2.0, 3.0])
        h = HankelOperator(samples)
        samples[0] = 10.0
        self.assertEqual(h.entry(0, 0), 1.0)
        with self.assertRaises(ValueError):
            h.samples[0] = 5.0

    def test_entry(self):
        h = HankelOperator([10.0, 11.0, 12.0, 13.0])
        self.assertEqual(h.entry(0, 0), 10.0)
        self.assertEqual(h.entry(3, 3), 10.0)
        self.assertEqual(h.entry(1, 3), 12.0)
        self.assertEqual(h.entry(0, 3), 13.0)
        self.assertRaises(IndexError, h.entry, 4, 0)
        self.assertRaises(IndexError, h.entry, 0, -1)

    def test_reflect_index(self):
        self.assertTrue(np.array_equal(reflect_index(np.arange(7), 4),
                                       [0, 1, 2, 3, 2, 1, 0]))

    def test_dense_rows(self):
        h = HankelOperator([0.0, 1.0, 2.0, 3.0])
        expected = np.array([[0, 1, 2, 3],
                             [1, 2, 3, 2],
                             [2, 3, 2, 1],
                             [3, 2, 1, 0]], dtype=float)
        self.assertTrue(np.array_equal(h.dense(), expected))

    def test_persymmetric(self):
        for n in (1, 2, 5, 8):
            h = HankelOperator(np.random.RandomState(n).normal(size=n))
            self.assertTrue(h.is_persymmetric())
            flip = anti_identity(n)
            self.assertTrue(np.array_equal(flip.dot(h.dense()).dot(flip), h.dense().T))

    def test_matvec_dense(self):
        gen = np.random.RandomState(0)
        h = HankelOperator(gen.normal(size=8))
        x, y = gen.normal(size=8), gen.normal(size=8)
        np.testing.assert_allclose(h.matvec_dense(np.eye(8)[0]), h.samples)
        np.testing.assert_allclose(h.matvec_dense(x), brute_force_matvec(h, x), atol=1e-12)
        np.testing.assert_allclose(h.matvec_dense(2 * x - 3 * y),
                                   2 * h.matvec_dense(x) - 3 * h.matvec_dense(y),
                                   atol=1e-12)
        self.assertRaises(ValueError, h.matvec_dense, np.ones(7))

    def test_shift_factors(self):
        h = HankelOperator([5.0, 7.0])
        h_u, h_l = h.shift_factors()
        self.assertTrue(np.array_equal(h_u, [[5.0, 7.0], [7.0, 0.0]]))
        recon = h_u + h_l - h.samples[-1] * anti_identity(2)
        self.assertTrue(np.array_equal(recon, [[5.0, 7.0], [7.0, 5.0]]))
        for n in (3, 4, 7):
            h = HankelOperator(np.random.RandomState(n).normal(size=n))
            h_u, h_l = h.shift_factors()
            np.testing.assert_allclose(h_u + h_l - h.samples[-1] * anti_identity(n),
                                       h.dense(), atol=1e-14)

    def test_upper_shift(self):
        v = np.array([1.0, 2.0, 3.0])
        self.assertTrue(np.array_equal(upper_shift(3).dot(v), [2.0, 3.0, 0.0]))

    def test_matvec_shift(self):
        gen = np.random.RandomState(1)
        h = HankelOperator(gen.normal(size=16))
        x = gen.normal(size=16)
        np.testing.assert_allclose(h.matvec_shift(x), h.matvec_dense(x), atol=1e-12)
        self.assertTrue(np.array_equal(h.matvec_shift(np.zeros(16)), np.zeros(16)))

    def test_matvec_shift_flops(self):
        for n in (4, 8, 16):
            h = HankelOperator(np.ones(n))
            shift, dense = FlopCounter(), FlopCounter()
            h.matvec_shift(np.ones(n), counter=shift)
            h.matvec_dense(np.ones(n), counter=dense)
            self.assertEqual(shift.mults, n * n)
            self.assertEqual(shift.adds, n * (n - 1))
            self.assertLess(shift.total, dense.total)

    def test_matvec_fft(self):
        gen = np.random.RandomState(2)
        for n in (4, 6, 13):
            h = HankelOperator(gen.normal(size=n))
            x = gen.normal(size=n)
            np.testing.assert_allclose(h.matvec_fft(x), h.matvec_dense(x), atol=1e-10)

    def test_matvec_fft_constant(self):
        h = HankelOperator(np.ones(8))
        x = np.arange(8.0)
        np.testing.assert_allclose(h.matvec_fft(x), np.full(8, x.sum()), atol=1e-10)

    def test_three_way_equivalence(self):
        gen = np.random.RandomState(3)
        for n in (2, 4, 8, 16, 32, 64):
            for _ in range(100):
                h = HankelOperator(gen.uniform(-1, 1, n))
                x = gen.uniform(-1, 1, n)
                dense = h.matvec_dense(x)
                scale = max(np.linalg.norm(dense), 1e-12)
                self.assertLess(np.linalg.norm(h.matvec_shift(x) - dense) / scale, 1e-9)
                self.assertLess(np.linalg.norm(h.matvec_fft(x) - dense) / scale, 1e-9)


class TestCirculantEmbedding(unittest.TestCase):

    def test_first_column(self):
        c = CirculantEmbedding([0.0, 1.0, 2.0, 3.0])
        self.assertEqual(c.r, 8)
        self.assertTrue(np.array_equal(c.c, [3, 2, 1, 0, 3, 0, 1, 2]))

    def test_padding(self):
        c = CirculantEmbedding(np.arange(1.0, 7.0))
        self.assertEqual((c.n, c.n_pad, c.r), (6, 8, 16))

    def test_circulant_matvec(self):
        c = CirculantEmbedding(np.random.RandomState(4).normal(size=8))
        e1 = np.zeros(c.r)
        e1[0] = 1.0
        np.testing.assert_allclose(c.circulant_matvec(e1), c.c, atol=1e-12)
        v = np.random.RandomState(5).normal(size=c.r)
        np.testing.assert_allclose(c.circulant_matvec(v), c.dense().dot(v), atol=1e-10)

    def test_embedding_reproduces_operator(self):
        gen = np.random.RandomState(6)
        for n in (4, 8, 5):
            h = HankelOperator(gen.normal(size=n))
            c = h.embedding
            recon = c.dense()[:n, :n][::-1]
            np.testing.assert_allclose(recon, h.dense(), atol=1e-10)


class TestFlopCounter(unittest.TestCase):

    def test_conventions(self):
        counter = FlopCounter()
        counter.dense(3, 4)
        self.assertEqual(counter.total, 24)
        counter.diag(5)
        counter.vadd(2)
        counter.bias(7)
        self.assertEqual(counter.total, 31)
        counter = FlopCounter(count_bias_adds=True, dense_2mk=False)
        counter.dense(3, 4)
        counter.bias(3)
        self.assertEqual((counter.mults, counter.adds), (12, 12))

    def test_measure_resets(self):
        counter = FlopCounter()
        counter.mul(10)
        with counter.measure() as c:
            c.add(3)
        self.assertEqual(counter.total, 3)


class TestComplexityReport(unittest.TestCase):

    def test_report(self):
        rows = complexity_report([4, 8, 16, 64])
        by_n = {r["n"]: r for r in rows}
        self.assertEqual(by_n[8]["dense"], 128)
        self.assertEqual(by_n[16]["dense"], 4 * by_n[8]["dense"])
        self.assertEqual(by_n[8]["shift"], 2 * 64 - 8)
        self.assertLess(by_n[64]["fft"], by_n[64]["dense"])

    def test_empty(self):
        self.assertRaises(ValueError, complexity_report, [])


if __name__ == "__main__":
    unittest.main()
