"""Compare the two smoothing-weight orientations on white noise and a step.

    python scripts/filter_response.py --rate 100 --time-constant 0.5
"""

import argparse

import numpy as np

from ridecomfort.core import Frame, SampleSeries
from ridecomfort.filtering import FilterParams, alpha, alpha_conventional, lowpass_series


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--rate", type=float, default=100.0)
    ap.add_argument("--time-constant", type=float, default=0.5)
    ap.add_argument("--samples", type=int, default=100_000)
    args = ap.parse_args()

    dt = 1.0 / args.rate
    t = np.arange(args.samples) * dt
    noise = np.random.default_rng(0).standard_normal((args.samples, 3))
    series = SampleSeries(t, noise, noise, Frame.VEHICLE)
    step = np.zeros((400, 3))
    step[100:] = 1.0
    step_series = SampleSeries(t[:400], step, step, Frame.VEHICLE)

    print(f"rate {args.rate} Hz, time constant {args.time_constant} s")
    for orientation, weight in (("paper", alpha), ("conventional", alpha_conventional)):
        a = weight(args.time_constant, dt)
        params = FilterParams(args.time_constant, orientation)
        out = lowpass_series(series, params).accel[1000:, 0]
        rise = lowpass_series(step_series, params).accel[:, 0]
        to_90 = (np.argmax(rise >= 0.9) - 100) * dt
        print(
            f"  {orientation:<12s} alpha={a:.5f}  noise var {out.var():.4f} "
            f"(closed form {a / (2 - a):.4f})  10-90 rise {to_90:.3f} s"
        )


if __name__ == "__main__":
    main()
