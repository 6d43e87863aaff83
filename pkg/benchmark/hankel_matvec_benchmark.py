'''
Benchmarking the flops and running time of the three Hankel
matrix-vector products: dense, shift-factored and FFT.
'''
import argparse
import logging
import sys
import time

import numpy as np
import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt

from hankeldyn.hankel import HankelOperator, complexity_report

logging.basicConfig(level=logging.INFO)


def run_time(h, x, method, repeat):
    matvec = getattr(h, method)
    start = time.perf_counter()
    for _ in range(repeat):
        matvec(x)
    return (time.perf_counter() - start) / repeat


if __name__ == "__main__":
    parser = argparse.ArgumentParser(
        description="Flops and running time of Hankel matrix-vector products.")
    parser.add_argument("--max-exp", type=int, default=10,
                        help="Largest size is 2^max-exp.")
    parser.add_argument("--repeat", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--output", default="hankel_matvec_benchmark.png")
    args = parser.parse_args(sys.argv[1:])

    sizes = [2 ** e for e in range(1, args.max_exp + 1)]
    logging.info("> Counting flops for sizes %s" % sizes)
    report = complexity_report(sizes, seed=args.seed)
    for row in report:
        logging.info("n=%d: dense %d, shift %d, fft %d flops"
                     % (row['n'], row['dense'], row['shift'], row['fft']))

    logging.info("> Timing the products")
    gen = np.random.RandomState(args.seed)
    methods = ("matvec_dense", "matvec_shift", "matvec_fft")
    times = {m: [] for m in methods}
    for n in sizes:
        h = HankelOperator(gen.uniform(-1, 1, n))
        x = gen.uniform(-1, 1, n)
        for m in methods:
            times[m].append(run_time(h, x, m, args.repeat))

    logging.info("> Plotting result")
    fig, axe = plt.subplots(1, 2, sharex=True, figsize=(10, 4))
    ax = axe[0]
    for key, label in (('dense', 'Dense'), ('shift', 'Shift'), ('fft', 'FFT')):
        ax.plot(sizes, [row[key] for row in report], marker='+', label=label)
    ax.plot(sizes, [n * np.log2(n) for n in sizes], linestyle=':', label='n log n')
    ax.set_xscale('log', base=2)
    ax.set_yscale('log')
    ax.set_xlabel("Operator size n")
    ax.set_ylabel("Flops")
    ax.set_title("Hankel product flops")
    ax.legend()
    ax.grid()
    ax = axe[1]
    for m, label in zip(methods, ('Dense', 'Shift', 'FFT')):
        ax.plot(sizes, times[m], marker='+', label=label)
    ax.set_xscale('log', base=2)
    ax.set_yscale('log')
    ax.set_xlabel("Operator size n")
    ax.set_ylabel("Running time (sec)")
    ax.set_title("Hankel product running time")
    ax.legend()
    ax.grid()

    plt.tight_layout()
    fig.savefig(args.output)
    logging.info("Plot saved to %s" % args.output)
