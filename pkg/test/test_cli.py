import io
import os
import shutil
import tempfile
import unittest

import numpy as np
from mock import patch

from hankeldyn import cli, storage
from hankeldyn.dynsys import OdeModel, TrajectoryDataset, integrate
from hankeldyn.errors import StageError, TrainingError


class TestConfigFlags(unittest.TestCase):

    def test_flags(self):
        args = cli.build_parser().parse_args(
            ["run", "--hidden", "4,4,4", "--standardize", "false", "--batch", "10",
             "--dmd-rank", "2", "--n-traj", "3", "--alpha", "0,0,0,0"])
        cfg = cli.config_from_args(args)
        self.assertEqual(cfg.hidden, (4, 4, 4))
        self.assertFalse(cfg.standardize)
        self.assertEqual((cfg.batch_size, cfg.dmd_rank, cfg.n_traj), (10, 2, 3))
        self.assertEqual(cfg.alpha, (0.0, 0.0, 0.0, 0.0))

    def test_full_scale_then_flags(self):
        args = cli.build_parser().parse_args(["run", "--full", "--epochs", "2"])
        cfg = cli.config_from_args(args)
        self.assertEqual((cfg.n_traj, cfg.epochs), (100, 2))

    def test_bad_bool(self):
        with patch("sys.stderr", new_callable=io.StringIO):
            self.assertRaises(SystemExit, cli.build_parser().parse_args,
                              ["run", "--standardize", "maybe"])


class TestMain(unittest.TestCase):

    def setUp(self):
        self.dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.dir)

    def path(self, name):
        return os.path.join(self.dir, name)

    def test_bench_stdout(self):
        with patch("sys.stdout", new_callable=io.StringIO) as out:
            self.assertEqual(cli.main(["bench", "stnn", "--p", "1,6"]), cli.EXIT_OK)
        lines = out.getvalue().splitlines()
        self.assertEqual(lines[0], "p,params,flops,param_saving,flop_saving,"
                                   "reported_param_saving,reported_flop_saving")
        self.assertTrue(lines[2].startswith("6,384,884,"))

    def test_bench_file(self):
        code = cli.main(["bench", "hankel", "--sizes", "4,8", "--out", self.path("h.csv")])
        self.assertEqual(code, cli.EXIT_OK)
        header, rows = storage.read_table(self.path("h.csv"))
        self.assertEqual(header, ["n", "dense", "shift", "fft"])
        self.assertEqual(rows[1][:2], ["8", "128"])

    def test_config_errors(self):
        self.assertEqual(cli.main(["run", "--system", "lotka_volterra", "--model", "sindy"]),
                         cli.EXIT_CONFIG)
        self.assertEqual(cli.main(["run", "--config", self.path("missing.json")]),
                         cli.EXIT_CONFIG)

    def test_numerical_failure(self):
        error = StageError("train", "abc", TrainingError("Damping overflow"))
        with patch("hankeldyn.experiment.run", side_effect=error):
            self.assertEqual(cli.main(["run"]), cli.EXIT_NUMERICAL)
        with patch("hankeldyn.experiment.run", side_effect=StageError("write", "abc", IOError("disk"))):
            self.assertEqual(cli.main(["run"]), cli.EXIT_FAILURE)

    def test_fit_and_rollout(self):
        traj = integrate(OdeModel.lorenz(), [0.0, 1.0, 20.0], (0.0, 1.0), 0.01, tol=1e-9)
        storage.write_trajectory(self.path("traj.csv"), traj)
        code = cli.main(["fit", "dmd", "--input", self.path("traj.csv"),
                         "--out", self.path("dmd.json")])
        self.assertEqual(code, cli.EXIT_OK)
        code = cli.main(["rollout", "--model", self.path("dmd.json"), "--steps", "5",
                         "--ic", "0,1,20", "--out", self.path("pred.csv")])
        self.assertEqual(code, cli.EXIT_OK)
        pred = storage.read_trajectory(self.path("pred.csv"))
        self.assertEqual(len(pred), 6)
        self.assertTrue(np.array_equal(pred.states[0], [0.0, 1.0, 20.0]))
        code = cli.main(["rollout", "--model", self.path("dmd.json"),
                         "--out", self.path("none.csv")])
        self.assertEqual(code, cli.EXIT_CONFIG)
        code = cli.main(["rollout", "--model", self.path("dmd.json"), "--ic", "1,2",
                         "--out", self.path("none.csv")])
        self.assertEqual(code, cli.EXIT_CONFIG)

    def test_fit_havok_rollout_with_history(self):
        traj = integrate(OdeModel.lorenz(), [0.0, 1.0, 20.0], (0.0, 2.0), 0.01, tol=1e-9)
        storage.write_trajectory(self.path("traj.csv"), traj)
        code = cli.main(["fit", "havok", "--input", self.path("traj.csv"), "--q", "20",
                         "--r", "6", "--out", self.path("havok.json")])
        self.assertEqual(code, cli.EXIT_OK)
        code = cli.main(["rollout", "--model", self.path("havok.json"), "--steps", "3",
                         "--history", self.path("traj.csv"), "--out", self.path("pred.csv")])
        self.assertEqual(code, cli.EXIT_OK)
        pred = storage.read_trajectory(self.path("pred.csv"))
        self.assertEqual(len(pred), 4)
        self.assertTrue(np.all(np.isfinite(pred.states[:, 0])))
        self.assertTrue(np.all(np.isnan(pred.states[1:, 1:])))
        code = cli.main(["fit", "havok", "--input", self.path("traj.csv"), "--q", "20",
                         "--r", "6", "--coordinate", "-1", "--out", self.path("all.json")])
        self.assertEqual(code, cli.EXIT_OK)
        code = cli.main(["rollout", "--model", self.path("all.json"), "--steps", "3",
                         "--history", self.path("traj.csv"), "--out", self.path("all.csv")])
        self.assertEqual(code, cli.EXIT_OK)
        self.assertTrue(np.all(np.isfinite(storage.read_trajectory(self.path("all.csv")).states)))

    def test_fit_hankel(self):
        a = np.diag([0.5, 0.25])
        x = np.random.RandomState(0).normal(size=(2, 10))
        storage.write_pairs(self.path("pairs.csv"), TrajectoryDataset(x, a.dot(x), 1.0))
        code = cli.main(["fit-hankel", "--input", self.path("pairs.csv"),
                         "--out", self.path("h.csv")])
        self.assertEqual(code, cli.EXIT_OK)
        _, h = storage.read_matrix(self.path("h.csv"))
        self.assertTrue(np.allclose(h, a, atol=1e-6))
        report = storage.read_json(self.path("h.json"))
        self.assertEqual(report["rank"], 2)

    def test_generate(self):
        out = self.path("data")
        code = cli.main(["generate", "--n-traj", "2", "--T", "0.5", "--havok-q", "5",
                         "--rollout-steps", "5", "--tol", "1e-9", "--out-dir", out])
        self.assertEqual(code, cli.EXIT_OK)
        for name in ("pairs.csv", "val_pairs.csv", "manifest.json", "config.json",
                     os.path.join("trajectories", "0001.csv")):
            self.assertTrue(os.path.exists(os.path.join(out, name)), name)
        self.assertEqual(storage.read_json(os.path.join(out, "manifest.json"))["n_traj"], 2)


if __name__ == "__main__":
    unittest.main()
