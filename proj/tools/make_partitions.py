#!/usr/bin/env python3
"""Write the bundled partition files (edc.json, double_cross.json).

Every region is a list of convex pieces. A piece is a counter-clockwise
vertex chain plus, for unbounded pieces, two rays: the first one leads
from infinity into vertices[0], the second one leaves vertices[-1].
"""
import argparse
import json
import math
from pathlib import Path


def arc(cx, cy, t0, t1, step):
    n = max(1, round(abs(t1 - t0) / step))
    return [(cx + math.cos(math.radians(t0 + (t1 - t0) * k / n)),
             cy + math.sin(math.radians(t0 + (t1 - t0) * k / n))) for k in range(n + 1)]


def interp_x(chain, y):
    for (x0, y0), (x1, y1) in zip(chain, chain[1:]):
        lo, hi = min(y0, y1), max(y0, y1)
        if lo - 1e-15 <= y <= hi + 1e-15:
            if hi - lo < 1e-15:
                return max(x0, x1)
            return x0 + (x1 - x0) * (y - y0) / (y1 - y0)
    raise ValueError(y)


def piece(vertices, rays=None):
    out = []
    for v in vertices:
        if not out or math.dist(out[-1], v) > 1e-12:
            out.append(v)
    p = {"vertices": [[round(x, 15), round(y, 15)] for x, y in out]}
    if rays:
        p["rays"] = [list(r) for r in rays]
    return p


def mirror(p, fx, fy):
    verts = [[fx * x, fy * y] for x, y in reversed(p["vertices"])]
    out = {"vertices": verts}
    if "rays" in p:
        r0, r1 = p["rays"]
        out["rays"] = [[fx * r1[0], fy * r1[1]], [fx * r0[0], fy * r0[1]]]
    return out


def shift_y(p, dy):
    q = dict(p)
    q["vertices"] = [[x, y + dy] for x, y in p["vertices"]]
    return q


def edc(step):
    # right half, lower part (y < 1/2); circle a: centre A radius 1, circle b: centre B radius 1
    a_low = arc(0, 0, -90, 0, step)          # (0,-1) .. (1,0)
    a_mid = arc(0, 0, 0, 30, step)           # (1,0) .. P
    b_low = arc(0, 1, -90, -30, step)        # A .. P

    r1 = [piece([(0, 0)] + a_low)]
    r2 = [piece([a_low[k + 1], a_low[k]], [(0, -1), (0, -1)]) for k in range(len(a_low) - 1)]
    r2.append(piece([(1, 0)], [(1, 0), (0, -1)]))
    r3 = [piece([(0, 0)] + b_low + [(0, 0.5)])]
    ys = sorted({round(y, 14) for _, y in b_low} | {round(y, 14) for _, y in a_mid})
    r4 = []
    for yl, yu in zip(ys, ys[1:]):
        r4.append(piece([(interp_x(b_low, yl), yl), (interp_x(a_mid, yl), yl),
                         (interp_x(a_mid, yu), yu), (interp_x(b_low, yu), yu)]))
    r5 = [piece([a_mid[k + 1], a_mid[k]], [(1, 0), (1, 0)]) for k in range(len(a_mid) - 1)]

    lower = [("right, behind A, near", r1), ("right, behind A, far", r2),
             ("right, near A and B", r3), ("right, near A only", r4), ("right, lower, far", r5)]

    def flip_y(pieces):
        return [shift_y(mirror(p, 1, -1), 1) for p in pieces]

    upper = [("right, near A and B, upper", flip_y(r3)), ("right, near B only", flip_y(r4)),
             ("right, upper, far", flip_y(r5)), ("right, ahead of B, near", flip_y(r1)),
             ("right, ahead of B, far", flip_y(r2))]
    right = lower + upper
    left = [(name.replace("right", "left"), [mirror(p, -1, 1) for p in pieces]) for name, pieces in right]
    regions = []
    for idx, (name, pieces) in enumerate(right + left, start=1):
        regions.append({"index": idx, "label": name, "pieces": pieces})
    # integration box sits just outside the unit circles so no border is tangent to them;
    # metric centroids use the simulation world box
    return {"name": "edc", "borders": {"xmin": -1.02, "xmax": 1.02, "ymin": -1.02, "ymax": 2.02},
            "metric_borders": {"xmin": -3, "xmax": 3, "ymin": -3, "ymax": 4}, "regions": regions}


def double_cross():
    right = [
        ("right, behind A", [piece([(0, 0)], [(1, 0), (0, -1)])]),
        ("right, between A and B", [piece([(0, 1), (0, 0)], [(1, 0), (1, 0)])]),
        ("right, ahead of B", [piece([(0, 1)], [(0, 1), (1, 0)])]),
    ]
    left = [(name.replace("right", "left"), [mirror(p, -1, 1) for p in pieces]) for name, pieces in right]
    regions = [{"index": i, "label": n, "pieces": p} for i, (n, p) in enumerate(right + left, start=1)]
    return {"name": "double_cross", "borders": {"xmin": -1, "xmax": 1, "ymin": -1, "ymax": 2},
            "regions": regions}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out-dir", default=str(Path(__file__).resolve().parent.parent / "data" / "partitions"))
    ap.add_argument("--arc-step-deg", type=float, default=7.5)
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "edc.json").write_text(json.dumps(edc(args.arc_step_deg), indent=1) + "\n")
    (out / "double_cross.json").write_text(json.dumps(double_cross(), indent=1) + "\n")


if __name__ == "__main__":
    main()
