import unittest

import numpy as np

from hankeldyn.bestfit import (
    FitProblem, fit_operator, numerical_rank, project_persymmetric_hankel, svt)
from hankeldyn.hankel import HankelOperator


def planted_problem(alpha=1e-8, noise=0.0, seed=0):
    gen = np.random.RandomState(seed)
    h_true = gen.normal(size=(8, 2)).dot(gen.normal(size=(2, 8)))
    q, _ = np.linalg.qr(gen.normal(size=(8, 8)))
    x = q.dot(np.diag(np.linspace(1.0, 2.0, 8)))
    xp = h_true.dot(x) + noise * gen.normal(size=(8, 8))
    return h_true, FitProblem(x, xp, alpha)


class TestSVT(unittest.TestCase):

    def test_zero_threshold(self):
        a = np.random.RandomState(0).normal(size=(5, 3))
        np.testing.assert_allclose(svt(a, 0.0), a, atol=1e-9)

    def test_diagonal(self):
        np.testing.assert_allclose(svt(np.diag([3.0, 1.0]), 2.0),
                                   np.diag([1.0, 0.0]), atol=1e-12)

    def test_large_threshold(self):
        a = np.random.RandomState(1).normal(size=(4, 4))
        self.assertTrue(np.allclose(svt(a, 1e3), 0.0))

    def test_nonexpansive(self):
        gen = np.random.RandomState(2)
        for _ in range(20):
            a, b = gen.normal(size=(4, 4)), gen.normal(size=(4, 4))
            t = gen.uniform(0, 2)
            self.assertLessEqual(np.linalg.norm(svt(a, t) - svt(b, t)),
                                 np.linalg.norm(a - b) + 1e-12)

    def test_negative_threshold(self):
        self.assertRaises(ValueError, svt, np.eye(2), -1.0)


class TestFitProblem(unittest.TestCase):

    def test_validation(self):
        self.assertRaises(ValueError, FitProblem, np.ones((2, 3)), np.ones((3, 2)))
        self.assertRaises(ValueError, FitProblem, np.ones((2, 2)), np.ones((2, 2)), -1.0)
        self.assertRaises(ValueError, FitProblem, np.full((2, 2), np.nan), np.ones((2, 2)))

    def test_gradient(self):
        gen = np.random.RandomState(3)
        p = FitProblem(gen.normal(size=(3, 6)), gen.normal(size=(3, 6)))
        g = gen.normal(size=(3, 3))
        e = np.zeros((3, 3))
        e[1, 2] = 1e-6
        numeric = (p.smooth(g + e) - p.smooth(g - e)) / 2e-6
        self.assertAlmostEqual(numeric, p.gradient(g)[1, 2], places=5)


class TestFitOperator(unittest.TestCase):

    def test_identity_data(self):
        xp = np.random.RandomState(4).normal(size=(3, 3))
        result = fit_operator(FitProblem(np.eye(3), xp))
        np.testing.assert_allclose(result.h_hat, xp, atol=1e-10)
        self.assertTrue(result.converged)
        self.assertEqual(result.rank, 3)

    def test_planted_rank_two(self):
        h_true, problem = planted_problem()
        result = fit_operator(problem)
        err = np.linalg.norm(result.h_hat - h_true) / np.linalg.norm(h_true)
        self.assertLess(err, 1e-4)
        self.assertEqual(result.rank, 2)
        self.assertTrue(result.converged)

    def test_monotone_trace(self):
        for alpha in (0.0, 1e-3, 0.1, 1.0):
            _, problem = planted_problem(alpha=alpha, noise=0.05, seed=5)
            trace = fit_operator(problem).objective_trace
            for prev, cur in zip(trace, trace[1:]):
                self.assertLessEqual(cur, prev * (1 + 1e-12) + 1e-15)

    def test_normal_equations(self):
        gen = np.random.RandomState(6)
        x, xp = gen.normal(size=(4, 20)), gen.normal(size=(4, 20))
        h = fit_operator(FitProblem(x, xp), max_iter=1000, rel_tol=0.0).h_hat
        self.assertLess(np.linalg.norm((h.dot(x) - xp).dot(x.T)),
                        1e-6 * np.linalg.norm(xp.dot(x.T)))

    def test_rank_decreases_with_alpha(self):
        ranks = []
        for alpha in (0.0, 1e-3, 0.1, 1.0, 10.0, 1e3):
            _, problem = planted_problem(alpha=alpha, noise=0.01, seed=7)
            ranks.append(fit_operator(problem).rank)
        self.assertEqual(ranks[-1], 0)
        for prev, cur in zip(ranks, ranks[1:]):
            self.assertLessEqual(cur, prev)

    def test_not_converged(self):
        _, problem = planted_problem()
        result = fit_operator(problem, max_iter=1)
        self.assertFalse(result.converged)
        self.assertEqual(result.iterations, 1)
        self.assertEqual(len(result.objective_trace), 2)

    def test_backtracking_and_accelerated(self):
        h_true, problem = planted_problem()
        for kwargs in (dict(step_rule="backtracking"), dict(accelerated=True)):
            result = fit_operator(problem, **kwargs)
            err = np.linalg.norm(result.h_hat - h_true) / np.linalg.norm(h_true)
            self.assertLess(err, 1e-4)

    def test_zero_snapshots(self):
        result = fit_operator(FitProblem(np.zeros((2, 4)), np.ones((2, 4))))
        self.assertTrue(np.array_equal(result.h_hat, np.zeros((2, 2))))
        self.assertEqual(result.rank, 0)

    def test_invalid_arguments(self):
        _, problem = planted_problem()
        self.assertRaises(ValueError, fit_operator, problem, max_iter=0)
        self.assertRaises(ValueError, fit_operator, problem, step_rule="armijo")

    def test_predict_and_project(self):
        _, problem = planted_problem()
        result = fit_operator(problem, project=True)
        self.assertIsInstance(result.hankel, HankelOperator)
        x = np.ones(8)
        np.testing.assert_allclose(result.predict(x), result.h_hat.dot(x))


class TestProjection(unittest.TestCase):

    def test_identity(self):
        self.assertTrue(np.array_equal(project_persymmetric_hankel(np.eye(2)).samples,
                                       [1.0, 0.0]))

    def test_recovers_hankel(self):
        h = HankelOperator(np.random.RandomState(8).normal(size=6))
        np.testing.assert_allclose(project_persymmetric_hankel(h.dense()).samples,
                                   h.samples, rtol=1e-14)

    def test_idempotent(self):
        a = np.random.RandomState(9).normal(size=(5, 5))
        once = project_persymmetric_hankel(a)
        twice = project_persymmetric_hankel(once.dense())
        np.testing.assert_allclose(twice.samples, once.samples, rtol=1e-14)

    def test_not_square(self):
        self.assertRaises(ValueError, project_persymmetric_hankel, np.ones((2, 3)))

    def test_numerical_rank(self):
        self.assertEqual(numerical_rank(np.zeros((3, 3))), 0)
        self.assertEqual(numerical_rank(np.diag([1.0, 1e-3, 0.0])), 2)


if __name__ == "__main__":
    unittest.main()
