"""Convergence sweeps for every decay rate, with and without coarse graining.

Writes CSV tables and SVG plots under the output directory and prints the
fitted slopes and the QNL/QNLL solution differences.
"""

import argparse

from qnll.cli import main

NO_COARSE = [1.2, 1.5, 1.8]
COARSE = [0.8, 1.0, 1.2]


def run(out: str, k_list: str, paper_scale: bool) -> None:
    extra = ["--paper-scale"] if paper_scale else []
    for alpha in NO_COARSE:
        main(["converge", "--regime", "no_coarse", "--alpha", str(alpha),
              "--k-list", k_list, "--out", out, *extra])
    for alpha in COARSE:
        main(["converge", "--regime", "coarse", "--alpha", str(alpha),
              "--k-list", k_list, "--out", out, *extra])
    main(["converge", "--regime", "coarse", "--alpha", "0.8", "--scheme", "unbalanced",
          "--k-list", k_list, "--out", out, *extra])


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results")
    ap.add_argument("--k-list", default="4,8,16,32")
    ap.add_argument("--paper-scale", action="store_true")
    a = ap.parse_args()
    run(a.out, a.k_list, a.paper_scale)
