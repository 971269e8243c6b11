#!/usr/bin/env python3
"""Regenerates the bundled scenario files under scenarios/."""
import json
import pathlib


def box(lo, hi):
    return {"center": [(a + b) / 2 for a, b in zip(lo, hi)],
            "half_extent": [(b - a) / 2 for a, b in zip(lo, hi)]}


def courtyard():
    obs = [box([0, 0, 0], [30, 0.8, 4]), box([0, 19.2, 0], [30, 20, 4]),
           box([0, 0, 0], [0.8, 20, 4]), box([29.2, 0, 0], [30, 20, 4]),
           box([12, 8, 0], [18, 12, 5])]
    # Tall pillars on a 4 m lattice, kept clear of the walkway and the building.
    x = 3.0
    while x < 27:
        y = 2.5
        while y < 18:
            clear = (10.5 < x < 19.5 and 6.5 < y < 13.5) or abs(y - 4.6) <= 1.0 \
                or abs(y - 15.4) <= 1.0 or abs(x - 26) <= 1.0
            if not clear:
                obs.append(box([x, y, 0], [x + 1.2, y + 1.2, 6.5]))
            y += 4
        x += 4
    path = [(0, [4, 4.4, 1]), (10, [15, 4.6, 1]), (20, [26, 4.6, 1]),
            (28, [26, 15, 1]), (38, [15, 15.4, 1]), (48, [4, 15.4, 1])]
    return {"name": "courtyard",
            "bounds": {"min": [0, 0, 0], "max": [30, 20, 7]}, "resolution": 0.4,
            "obstacles": obs,
            "target_path": [{"t": t, "pos": p} for t, p in path],
            "chaser_init": {"pos": [2.0, 4.4, 3.0]}}


def city():
    heights = [[6, 8.5, 5], [7.5, 5.5, 9], [5, 9, 6.5]]
    spans = [(6, 13), (19, 26), (32, 39)]
    obs = [box([x0, y0, 0], [x1, y1, heights[i][j]])
           for i, (x0, x1) in enumerate(spans) for j, (y0, y1) in enumerate(spans)]
    obs += [box([9, 4.4, 0], [10, 5.2, 3]), box([30.6, 12, 0], [31.4, 13, 3.5]),
            box([20, 30.6, 0], [21, 31.4, 3])]
    path = [(0, [3, 3, 1]), (26, [29, 3, 1]), (52, [29, 29, 1]), (78, [3, 29, 1])]
    return {"name": "city",
            "bounds": {"min": [0, 0, 0], "max": [40, 40, 10]}, "resolution": 0.4,
            "obstacles": obs,
            "target_path": [{"t": t, "pos": p} for t, p in path],
            "chaser_init": {"pos": [1.5, 1.5, 3.0]}}


def minimal():
    return {"name": "minimal",
            "bounds": {"min": [0, 0, 0], "max": [12, 12, 6]}, "resolution": 0.4,
            "obstacles": [box([5, 8.4, 0], [7, 9.6, 3])],
            "target_path": [{"t": 0, "pos": [4, 4, 1]}, {"t": 8, "pos": [8, 5, 1]}],
            "chaser_init": {"pos": [2, 3, 2.5]}}


if __name__ == "__main__":
    out = pathlib.Path(__file__).resolve().parent.parent / "scenarios"
    for make in (courtyard, city, minimal):
        doc = make()
        (out / f"{doc['name']}.json").write_text(json.dumps(doc, indent=1) + "\n")
