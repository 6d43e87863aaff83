'''
Parameters and flops of the structured network against the dense
3-30-30-30-3 network, for a range of branch counts.
'''
import argparse
import logging
import sys

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt

from hankeldyn import ffnn
from hankeldyn.experiment import REPORTED_SAVINGS, stnn_table

logging.basicConfig(level=logging.INFO)


if __name__ == "__main__":
    parser = argparse.ArgumentParser(
        description="Parameter and flop savings of the structured network.")
    parser.add_argument("--max-p", type=int, default=16)
    parser.add_argument("--output", default="stnn_params_benchmark.png")
    args = parser.parse_args(sys.argv[1:])

    p_values = list(range(1, args.max_p + 1))
    rows = stnn_table(p_values)
    for row in rows:
        logging.info("p=%d: %d params (%.1f%% saved), %d flops (%.1f%% saved)"
                     % (row['p'], row['params'], row['param_saving'],
                        row['flops'], row['flop_saving']))
    # The structured network stops saving flops once 148p - 4 exceeds the
    # dense count.
    breakeven = next((r['p'] for r in rows if r['flop_saving'] <= 0), None)
    if breakeven is not None:
        logging.info("No flop saving from p=%d on" % breakeven)

    logging.info("> Plotting result")
    fig, axe = plt.subplots(1, 2, figsize=(10, 4))
    ax = axe[0]
    ax.plot(p_values, [r['params'] for r in rows], marker='+', label='StNN parameters')
    ax.plot(p_values, [r['flops'] for r in rows], marker='x', label='StNN flops')
    ax.axhline(ffnn.param_count(), color='C0', linestyle=':', label='FFNN parameters')
    ax.axhline(ffnn.flop_count(), color='C1', linestyle=':', label='FFNN flops')
    ax.set_xlabel("Branches p")
    ax.set_title("Model size")
    ax.legend()
    ax.grid()
    ax = axe[1]
    ax.plot(p_values, [r['param_saving'] for r in rows], marker='+', label='Parameters')
    ax.plot(p_values, [r['flop_saving'] for r in rows], marker='x', label='Flops')
    reported = sorted(REPORTED_SAVINGS)
    ax.scatter(reported, [REPORTED_SAVINGS[p][0] for p in reported], color='C0',
               facecolors='none', label='Reported parameters')
    ax.scatter(reported, [REPORTED_SAVINGS[p][1] for p in reported], color='C1',
               facecolors='none', label='Reported flops')
    ax.set_xlabel("Branches p")
    ax.set_ylabel("Saving over FFNN (%)")
    ax.set_title("Savings")
    ax.legend()
    ax.grid()

    plt.tight_layout()
    fig.savefig(args.output)
    logging.info("Plot saved to %s" % args.output)
