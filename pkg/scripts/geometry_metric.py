"""Fidelity metric g of the XXX chain under a transverse-field perturbation.

Also reports the ratio of the conductivity moment to g, which is 2 for every
instance with the conventions used here, and checks the small-step expansion
``C2(dV) ~ 2 g dlambda^2`` of the infinitesimal intertwiner on one instance.
"""

import argparse

import numpy as np

from cgploc.experiments import EnsembleConfig, run_geometry_sweep
from cgploc.geometry import cgp_of_infinitesimal_intertwiner, fidelity_metric
from cgploc.models import build, transverse_field_operator
from cgploc.rng import RngStream


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="4,6,8")
    ap.add_argument("--disorder", default="0.4,1.0,3.7,9.0")
    ap.add_argument("--samples", type=int, default=50)
    args = ap.parse_args()

    cfg = EnsembleConfig("xxx", [int(s) for s in args.sizes.split(",")],
                         [float(w) for w in args.disorder.split(",")], n_samples=args.samples)
    print(f"{'L':>4}{'W':>6}{'g':>14}{'ln g / L':>10}{'cond / g':>10}")
    for row in run_geometry_sweep(cfg):
        print(f"{row['L']:>4}{row['disorder']:>6g}{row['g_mean']:>14.5g}"
              f"{np.log(row['g_mean']) / row['L']:>10.4f}{row['ratio_mean']:>10.4f}")

    h, _ = build("xxx", 6, 1.0, RngStream(0, 0), hx=0.3)
    v = transverse_field_operator(6)
    g = fidelity_metric(h, v).g
    print("\n dlambda   C2/(2 g dl^2)   +-dl average")
    for dl in (1e-2, 1e-3, 1e-4):
        plus = cgp_of_infinitesimal_intertwiner(h, v, dl) / (2 * g * dl * dl)
        minus = cgp_of_infinitesimal_intertwiner(h, v, -dl) / (2 * g * dl * dl)
        print(f"{dl:>8.0e}{plus:>16.6f}{(plus + minus) / 2:>15.8f}")


if __name__ == "__main__":
    main()
