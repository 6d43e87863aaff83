'''
Accuracy and inference time of every model on one shared Lorenz split,
with the forecast x-coordinate of each model plotted against the truth.
'''
import argparse
import logging
import sys

import numpy as np
import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt

from hankeldyn import experiment
from hankeldyn.config import ExperimentConfig, MODELS

logging.basicConfig(level=logging.INFO)


if __name__ == "__main__":
    parser = argparse.ArgumentParser(
        description="Compare the structured network with the baselines on "
        "the Lorenz system.")
    parser.add_argument("--models", nargs="+", default=list(MODELS), choices=MODELS)
    parser.add_argument("--full", action="store_true",
                        help="Full-scale protocol instead of the desk-scale one.")
    parser.add_argument("--output", default="lorenz_comparison_benchmark.png")
    args = parser.parse_args(sys.argv[1:])

    base = ExperimentConfig()
    if args.full:
        base = base.full_scale()
    data = experiment.generate(base)
    case = data.cases[0]
    times = case.t0 + base.dt * np.arange(len(case.reference))

    fig, axe = plt.subplots(2, 1, sharex=True, figsize=(10, 6))
    axe[0].plot(times, case.reference[:, 0], color='k', label='truth')
    for model in args.models:
        config = base.replace(model=model)
        logging.info("> Fitting %s" % experiment.model_label(config))
        forecaster, train_error, _ = experiment.fit(config, data)
        mse, predictions = experiment.evaluate(forecaster, data)
        inference = experiment.time_inference(forecaster.timing_call(case.history),
                                              base.timing_calls, base.timing_warmup)
        logging.info("%s: test MSE %.4g, %d params, %d flops, %.3g sec per step"
                     % (model, mse, forecaster.param_count(),
                        forecaster.flop_count(), inference))
        pred = predictions[0]
        axe[0].plot(pred.times, pred.states[:, 0], label=model)
        n = min(len(pred), len(case.reference))
        err = np.abs(pred.states[:n, 0] - case.reference[:n, 0])
        axe[1].semilogy(pred.times[1:n], err[1:], label=model)
    axe[0].set_ylabel("x")
    axe[0].set_title("Autoregressive forecast")
    axe[0].legend()
    axe[0].grid()
    axe[1].set_xlabel("t")
    axe[1].set_ylabel("|x - x_true|")
    axe[1].grid()

    plt.tight_layout()
    fig.savefig(args.output)
    logging.info("Plot saved to %s" % args.output)
