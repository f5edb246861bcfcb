"""Mounting-recovery sweep over random phone orientations.

Prints the angular error distribution of the full calibrate/filter/align
chain for rides with one acceleration and one turn.

    python scripts/alignment_sweep.py --rides 500 --accel-noise 0.1 --gyro-noise 0.01
"""

import argparse
import math
import time

import numpy as np

from ridecomfort.config import Config
from ridecomfort.core import Vec3
from ridecomfort.pipeline import run_pipeline
from ridecomfort.synth import Scenario, Segment, generate_ride, random_rotation


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--rides", type=int, default=200)
    ap.add_argument("--rate", type=float, default=50.0)
    ap.add_argument("--accel-noise", type=float, default=0.05)
    ap.add_argument("--gyro-noise", type=float, default=0.005)
    ap.add_argument("--bias-sigma", type=float, default=0.01)
    ap.add_argument("--roughness", type=float, default=0.0)
    ap.add_argument("--time-constant", type=float, default=0.5)
    ap.add_argument("--orientation", choices=["paper", "conventional"], default="paper")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    segments = [
        Segment(5.0),
        Segment(5.0, 2.0, roughness_sigma=args.roughness),
        Segment(3.0, roughness_sigma=args.roughness),
        Segment(10.0, 0.0, 0.3, args.roughness),
        Segment(4.0, roughness_sigma=args.roughness),
    ]
    cfg = Config(time_constant=args.time_constant, filter_orientation=args.orientation)
    errors, failures = [], 0
    start = time.perf_counter()
    for k in range(args.rides):
        mounting = random_rotation(rng)
        bias = Vec3.from_array(rng.normal(0.0, args.bias_sigma, 3))
        sc = Scenario(segments, args.rate, mounting, args.accel_noise, args.gyro_noise, bias, seed=k)
        series, _ = generate_ride(sc)
        try:
            est = run_pipeline(series, cfg).estimate
        except ValueError as exc:
            failures += 1
            print(f"ride {k}: {exc}")
            continue
        errors.append(math.degrees(est.rotation.angle_to(mounting)))
    elapsed = time.perf_counter() - start

    e = np.array(errors)
    print(f"{len(e)} rides aligned, {failures} failed, {elapsed:.2f} s")
    if len(e):
        for q in (50, 90, 95, 99, 100):
            print(f"  p{q:<3d} {np.percentile(e, q):7.3f} deg")
        print(f"  within 2 deg: {(e < 2.0).sum()}/{args.rides}")


if __name__ == "__main__":
    main()
