#!/usr/bin/env python3
"""Writes a small synthetic dataset in the MRCLAM text layout.

Two robots drive between random waypoints in a 15-landmark arena and report
range/bearing to whatever sits in a forward field of view. A few sightings of the
other robot and of an unregistered barcode are mixed in so the ingester's skip
paths are exercised.
"""

import argparse
import math
import os
import random

ROBOT_BARCODES = [5, 14, 41, 32, 23]
LANDMARK_BARCODES = [72, 27, 54, 70, 36, 18, 25, 9, 81, 16, 90, 61, 45, 7, 63]
UNKNOWN_BARCODE = 99


def wrap(a):
    return math.atan2(math.sin(a), math.cos(a))


def landmarks(rng):
    pts = {}
    while len(pts) < 15:
        p = (rng.uniform(-1.5, 4.5), rng.uniform(-3.0, 3.0))
        if all(math.dist(p, q) > 0.8 for q in pts.values()):
            pts[6 + len(pts)] = p
    return pts


def drive(rng, duration, dt):
    x, y, th = rng.uniform(0, 3), rng.uniform(-2, 2), rng.uniform(-math.pi, math.pi)
    goal = (rng.uniform(-1.2, 4.2), rng.uniform(-2.7, 2.7))
    out = []
    t = 0.0
    while t <= duration + 1e-9:
        out.append((round(t, 3), x, y, th))
        if math.dist((x, y), goal) < 0.2:
            goal = (rng.uniform(-1.2, 4.2), rng.uniform(-2.7, 2.7))
        turn = wrap(math.atan2(goal[1] - y, goal[0] - x) - th)
        th = wrap(th + max(-0.6, min(0.6, turn)) * dt * 2.0)
        v = 0.25 if abs(turn) < 1.0 else 0.05
        x += v * math.cos(th) * dt
        y += v * math.sin(th) * dt
        t += dt
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data", "mrclam_fixture"))
    ap.add_argument("--seed", type=int, default=3)
    ap.add_argument("--robots", type=int, default=2)
    ap.add_argument("--duration", type=float, default=180.0)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    os.makedirs(args.out, exist_ok=True)

    lms = landmarks(rng)
    with open(os.path.join(args.out, "Barcodes.dat"), "w") as f:
        f.write("# Subject #    Barcode #\n")
        for i, b in enumerate(ROBOT_BARCODES):
            f.write(f"{i + 1}\t{b}\n")
        for i, b in enumerate(LANDMARK_BARCODES):
            f.write(f"{i + 6}\t{b}\n")
    with open(os.path.join(args.out, "Landmark_Groundtruth.dat"), "w") as f:
        f.write("# Subject #    x [m]    y [m]    x std-dev [m]    y std-dev [m]\n")
        for sid, (x, y) in lms.items():
            f.write(f"{sid}\t{x:.6f}\t{y:.6f}\t0.000500\t0.000500\n")

    paths = [drive(rng, args.duration, 0.1) for _ in range(args.robots)]
    for r, gt in enumerate(paths, start=1):
        with open(os.path.join(args.out, f"Robot{r}_Groundtruth.dat"), "w") as f:
            f.write("# Time [s]    x [m]    y [m]    orientation [rad]\n")
            for t, x, y, th in gt:
                f.write(f"{t:.3f}\t{x:.6f}\t{y:.6f}\t{th:.6f}\n")
        with open(os.path.join(args.out, f"Robot{r}_Measurement.dat"), "w") as f:
            f.write("# Time [s]    Subject #    range [m]    bearing [rad]\n")
            for t, x, y, th in gt[::2]:
                seen = []
                for sid, p in lms.items():
                    rel = wrap(math.atan2(p[1] - y, p[0] - x) - th)
                    rng_m = math.dist((x, y), p)
                    if abs(rel) < math.radians(40) and rng_m < 4.0 and rng.random() < 0.4:
                        seen.append((LANDMARK_BARCODES[sid - 6], rng_m, rel))
                other = paths[r % len(paths)]
                ox, oy = other[min(len(other) - 1, int(round(t / 0.1)))][1:3]
                rel = wrap(math.atan2(oy - y, ox - x) - th)
                if r != (r % len(paths)) + 1 and abs(rel) < math.radians(60) and rng.random() < 0.2:
                    seen.append((ROBOT_BARCODES[r % len(paths)], math.dist((x, y), (ox, oy)), rel))
                if rng.random() < 0.01:
                    seen.append((UNKNOWN_BARCODE, 1.0, 0.0))
                for k, (b, rm, phi) in enumerate(seen):
                    ts = t + 0.01 * k
                    f.write(f"{ts:.3f}\t{b}\t{rm + rng.gauss(0, 0.02):.4f}\t{wrap(phi + rng.gauss(0, math.radians(1))):.5f}\n")


if __name__ == "__main__":
    main()
