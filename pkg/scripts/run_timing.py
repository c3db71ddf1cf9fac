"""QNLL/QNL solve-time ratios for several nonlinear-region fractions."""

import argparse

from qnll.cli import main

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results")
    ap.add_argument("--alpha", default="1.2")
    ap.add_argument("--paper-scale", action="store_true")
    a = ap.parse_args()
    main(["timing", "--alpha", a.alpha, "--nl-fractions", "0.25,0.5,0.75,1.0",
          "--out", a.out] + (["--paper-scale"] if a.paper_scale else []))
