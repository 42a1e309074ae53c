#!/usr/bin/env python3
"""Generate data/sample_prices.csv: a synthetic hourly real-time price series.

The daily shape has a night trough and an afternoon peak around 15:00, with
day-level and hour-level lognormal noise and occasional price spikes. The
output is deterministic for a given --seed.
"""
import argparse
import datetime as dt
import math
import random

# $/kWh by hour of day.
SHAPE = [0.024, 0.021, 0.019, 0.018, 0.018, 0.020, 0.024, 0.028,
         0.031, 0.034, 0.037, 0.040, 0.044, 0.048, 0.054, 0.058,
         0.056, 0.050, 0.043, 0.038, 0.035, 0.032, 0.029, 0.026]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--start", default="2012-06-01")
    ap.add_argument("--days", type=int, default=122)
    ap.add_argument("--seed", type=int, default=20120601)
    ap.add_argument("--out", default="data/sample_prices.csv")
    args = ap.parse_args()

    rng = random.Random(args.seed)
    start = dt.datetime.fromisoformat(args.start)
    with open(args.out, "w", newline="\n") as f:
        f.write("timestamp,price_usd_per_kwh\n")
        for d in range(args.days):
            day = start + dt.timedelta(days=d)
            level = math.exp(rng.gauss(0.0, 0.18))
            # Hot days push the afternoon peak up further.
            heat = max(0.0, rng.gauss(0.0, 0.15))
            for h in range(24):
                afternoon = math.exp(-((h - 15.5) / 2.5) ** 2)
                price = SHAPE[h] * level * (1.0 + heat * afternoon)
                price *= math.exp(rng.gauss(0.0, 0.08))
                if rng.random() < 0.004:
                    price *= rng.uniform(1.5, 3.0)
                t = day + dt.timedelta(hours=h)
                f.write(f"{t:%Y-%m-%dT%H}:00,{price:.5f}\n")


if __name__ == "__main__":
    main()
