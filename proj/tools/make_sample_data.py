#!/usr/bin/env python3
"""Regenerates the bundled sample traces in data/.

Seven days of 30-minute carbon intensity with a daily cycle (midday solar dip,
evening peak) plus seeded noise, and a request trace whose load peaks in the
afternoon. Output is deterministic.
"""

import argparse
import csv
import math
import random
from datetime import datetime, timedelta, timezone
from pathlib import Path

START = datetime(2023, 6, 1, tzinfo=timezone.utc)
STEP = timedelta(minutes=30)


def iso(t):
    return t.strftime("%Y-%m-%dT%H:%MZ")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "data")
    parser.add_argument("--days", type=int, default=7)
    parser.add_argument("--seed", type=int, default=2023)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    args.out.mkdir(parents=True, exist_ok=True)
    steps = args.days * 48

    with open(args.out / "carbon_sample.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["start_utc", "end_utc", "intensity_g_per_kwh"])
        for i in range(steps):
            t = START + i * STEP
            hour = (i % 48) / 2
            solar = max(0.0, math.sin(math.pi * (hour - 6) / 12))
            evening = math.exp(-((hour - 19) ** 2) / 6)
            day_shift = 15 * math.sin(2 * math.pi * i / steps)
            value = 190 - 85 * solar + 45 * evening + day_shift + rng.gauss(0, 6)
            w.writerow([iso(t), iso(t + STEP), f"{max(value, 20):.1f}"])

    with open(args.out / "requests_sample.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["start_utc", "end_utc", "count"])
        for i in range(steps):
            t = START + i * STEP
            hour = (i % 48) / 2
            load = 60000 + 40000 * math.exp(-((hour - 15) ** 2) / 18)
            w.writerow([iso(t), iso(t + STEP), int(load * rng.uniform(0.9, 1.1))])


if __name__ == "__main__":
    main()
