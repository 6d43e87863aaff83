import unittest

import numpy as np

from hankeldyn import stnn
from hankeldyn.hankel import FlopCounter
from hankeldyn.lm import LMSettings
from test.utils import numerical_jacobian, relative_error

SMOOTH = ("tanh", "sigmoid", "tanh", "identity")
LINEAR = ("identity",) * 4


def random_params(p=2, activations=SMOOTH, alpha=(0.0,) * 4, seed=0):
    return stnn.init(stnn.StnnConfig(p=p, activations=activations, alpha=alpha,
                                     seed=seed))


class TestConfig(unittest.TestCase):

    def test_validation(self):
        self.assertRaises(ValueError, stnn.StnnConfig, n=3)
        self.assertRaises(ValueError, stnn.StnnConfig, p=0)
        self.assertRaises(ValueError, stnn.StnnConfig, activations=("tanh",))
        self.assertRaises(ValueError, stnn.StnnConfig, alpha=(0, -1, 0, 0))
        self.assertRaises(ValueError, stnn.StnnConfig, activations=("tanh", "x", "relu", "identity"))

    def test_dict(self):
        cfg = stnn.StnnConfig(p=3, seed=7)
        self.assertEqual(stnn.StnnConfig.from_dict(cfg.to_dict()), cfg)
        self.assertEqual(cfg.activations[1], "leaky_relu(0.01)")


class TestCounts(unittest.TestCase):

    def test_branch_size(self):
        self.assertEqual(stnn.BRANCH_SIZE, 64)

    def test_param_count(self):
        for p in (1, 2, 6, 8):
            self.assertEqual(stnn.param_count(p), 64 * p)
            self.assertEqual(stnn.count_params(random_params(p=p)), 64 * p)

    def test_flop_count(self):
        self.assertEqual(stnn.flop_count(6), 884)
        for p in (1, 2, 4, 6, 8):
            self.assertEqual(stnn.flop_count(p), 148 * p - 4)
            self.assertEqual(stnn.count_flops(stnn.StnnConfig(p=p)), 148 * p - 4)

    def test_counter_per_state(self):
        params = random_params(p=2)
        counter = FlopCounter(count_bias_adds=True)
        stnn.forward(params, np.zeros((4, 3)), counter=counter)
        self.assertEqual(counter.total, 3 * stnn.flop_count(2))


class TestForward(unittest.TestCase):

    def test_shapes(self):
        params = random_params()
        self.assertEqual(stnn.forward(params, np.ones(4)).shape, (4,))
        self.assertEqual(stnn.forward(params, np.ones((4, 7))).shape, (4, 7))
        self.assertRaises(ValueError, stnn.forward, params, np.ones(3))

    def test_columns_match_single(self):
        params = random_params()
        x = np.random.RandomState(1).normal(size=(4, 5))
        batch = stnn.forward(params, x)
        for j in range(5):
            self.assertTrue(np.allclose(batch[:, j], stnn.forward(params, x[:, j])))

    def test_dense_equivalence(self):
        params = random_params(p=3, activations=LINEAR, seed=2)
        mats = stnn.materialize(params)
        x = np.random.RandomState(3).normal(size=4)
        expected = np.zeros(4)
        for b in range(3):
            z1 = mats["w10"][b].dot(x) + params.block("l1.bias")[b]
            z2 = mats["w21"][b].dot(z1) + params.block("l2.bias")[b]
            z3 = mats["w32"][b].dot(z2) + params.block("l3.bias")[b]
            expected += mats["w43"][b].dot(z3) + params.block("l4.bias")[b]
        self.assertTrue(np.allclose(stnn.forward(params, x), expected))

    def test_fixed_structure(self):
        mats = stnn.materialize(random_params(p=2))
        self.assertEqual(mats["w10"].shape, (2, 8, 4))
        self.assertEqual(mats["w21"].shape, (2, 4, 8))
        self.assertTrue(np.array_equal(mats["w32"][1], np.fliplr(np.eye(4))))
        w43 = mats["w43"][0]
        self.assertTrue(np.array_equal(w43, np.diag(np.diag(w43))))

    def test_factors(self):
        params = random_params(p=2, seed=4)
        mats = stnn.materialize(params)
        for layer in (1, 2):
            for branch in (0, 1):
                f = stnn.f8_factors(params, layer, branch)
                self.assertTrue(np.allclose(f["f8"], f["p8"].T.dot(f["blocks"]).dot(f["h8"])))
                if layer == 1:
                    self.assertTrue(np.allclose(f["f8"][:, :4], mats["w10"][branch]))
                else:
                    dhat = params.block("l2.dhat")[branch]
                    self.assertTrue(np.allclose(f["f8"][:4] * dhat, mats["w21"][branch]))

    def test_branch_permutation(self):
        params = random_params(p=3, seed=5)
        x = np.random.RandomState(6).normal(size=(4, 4))
        permuted = params.permute_branches([2, 0, 1])
        self.assertTrue(np.allclose(stnn.forward(permuted, x), stnn.forward(params, x)))
        self.assertRaises(ValueError, params.permute_branches, [0, 0, 1])

    def test_init_bounds(self):
        params = random_params(p=4, seed=8)
        for name, _, fan_in in stnn.BLOCKS:
            self.assertTrue(np.all(np.abs(params.block(name)) <= 1.0 / np.sqrt(fan_in)))
        self.assertEqual(random_params(seed=8), random_params(seed=8))

    def test_params_validation(self):
        self.assertRaises(ValueError, stnn.StnnParams, stnn.StnnConfig(p=2), np.zeros(64))
        doc = random_params().to_dict()
        self.assertEqual(doc["kind"], "stnn")
        self.assertEqual(stnn.StnnParams.from_dict(doc), random_params())
        self.assertRaises(ValueError, stnn.StnnParams.from_dict, dict(doc, kind="ffnn"))


class TestGradients(unittest.TestCase):

    def test_data_jacobian(self):
        for seed in range(10):
            params = random_params(p=2, seed=seed)
            model = stnn.StnnModel(params.config)
            gen = np.random.RandomState(100 + seed)
            x, y = gen.normal(size=(5, 4)), gen.normal(size=(5, 4))
            analytic = model.data_jacobian(params.theta, x, y)
            numeric = numerical_jacobian(lambda t: model.data_residuals(t, x, y),
                                         params.theta)
            self.assertEqual(analytic.shape, (20, 128))
            self.assertLess(relative_error(analytic, numeric), 1e-4, "seed %d" % seed)

    def test_reg_jacobian(self):
        for seed in range(10):
            params = random_params(p=2, alpha=(1e-3, 1e-2, 0.0, 0.5), seed=20 + seed)
            model = stnn.StnnModel(params.config)
            analytic = model.reg_jacobian(params.theta)
            numeric = numerical_jacobian(model.reg_residuals, params.theta)
            self.assertEqual(analytic.shape, (3 * 2 * 4, 128))
            self.assertLess(relative_error(analytic, numeric), 1e-4, "seed %d" % seed)

    def test_regularized_residuals(self):
        params = random_params(p=2, alpha=(0.0, 1e-3, 0.0, 0.5), seed=11)
        model = stnn.StnnModel(params.config)
        x = np.random.RandomState(12).normal(size=(3, 4))
        jac = model.jacobian(params.theta, x, x)
        self.assertEqual(jac.shape, (12 + 2 * 2 * 4, 128))
        mats = stnn.materialize(params)
        expected = sum(1e-3 * np.linalg.svd(mats["w21"][b], compute_uv=False).sum() +
                       0.5 * np.linalg.svd(mats["w43"][b], compute_uv=False).sum()
                       for b in range(2))
        reg = model.reg_residuals(params.theta)
        self.assertAlmostEqual(float(reg.dot(reg)), expected, places=10)

    def test_loss_is_mse_without_regularization(self):
        params = random_params(p=2, seed=13)
        gen = np.random.RandomState(14)
        x, xp = gen.normal(size=(4, 6)), gen.normal(size=(4, 6))
        mse = np.mean((stnn.forward(params, x) - xp) ** 2)
        self.assertAlmostEqual(stnn.loss(params, (x, xp)), mse, places=12)
        self.assertRaises(ValueError, stnn.loss, params, (np.zeros((4, 0)), np.zeros((4, 0))))


class TestTraining(unittest.TestCase):

    def test_train_decreases_loss(self):
        params = random_params(p=2, activations=stnn.DEFAULT_ACTIVATIONS,
                               alpha=stnn.DEFAULT_ALPHA, seed=15)
        x = np.random.RandomState(16).uniform(-1, 1, size=(4, 40))
        before = params.theta.copy()
        trained, report = stnn.train_lm(params, (x, 0.5 * x), epochs=2, batch_size=40,
                                        settings=LMSettings(damping=1e-2))
        self.assertTrue(np.array_equal(params.theta, before))
        self.assertEqual(len(report.loss_trace), 2)
        self.assertLess(report.final_train_loss, report.initial_train_loss)
        self.assertAlmostEqual(stnn.loss(trained, (x, 0.5 * x)), report.final_train_loss)

    def test_fits_scaling_map(self):
        # y = 2x on the first coordinate is realizable by a linear branch.
        params = random_params(p=1, activations=LINEAR, seed=17)
        x = np.zeros((4, 40))
        x[0] = np.random.RandomState(18).uniform(-1, 1, 40)
        _, report = stnn.train_lm(params, (x, 2 * x), epochs=1, batch_size=40,
                                  settings=LMSettings(steps_per_batch=50))
        self.assertLessEqual(len(report.accepted_steps), 50)
        self.assertLess(report.final_train_loss, 1e-8)

    def test_accepted_steps_never_increase_loss(self):
        params = random_params(p=2, activations=stnn.DEFAULT_ACTIVATIONS,
                               alpha=stnn.DEFAULT_ALPHA, seed=19)
        x = np.random.RandomState(20).uniform(-1, 1, size=(4, 30))
        _, report = stnn.train_lm(params, (x, np.tanh(x)), epochs=1, batch_size=30,
                                  settings=LMSettings(steps_per_batch=15))
        self.assertTrue(report.accepted_steps)
        for before, after in report.accepted_steps:
            self.assertLessEqual(after, before)
        # One full batch: each step starts where the previous one ended.
        for (_, after), (before, _) in zip(report.accepted_steps, report.accepted_steps[1:]):
            self.assertAlmostEqual(after, before, delta=1e-12 * max(before, 1.0))

    def test_rollout(self):
        params = random_params()
        traj = stnn.rollout(params, np.zeros(4), 5, dt=0.1)
        self.assertEqual(len(traj), 6)
        self.assertTrue(np.allclose(traj.states[1], stnn.forward(params, np.zeros(4))))
        self.assertTrue(np.allclose(traj.times, 0.1 * np.arange(6)))


if __name__ == "__main__":
    unittest.main()
