#!/usr/bin/env python3
"""Regenerates corridor.pgm and corridor_map.json.

A 10 m x 4 m office floor: a 1 m wide corridor lined on both sides by
identical 2 m cubicles, each with a 0.8 m doorway. The raster is exactly
mirror-symmetric about x = 5 m and about the corridor centre line y = 2 m.

The repeating cubicles make the floor feature-scarce. A scanner that cannot
see the end walls cannot tell one cubicle pitch from the next, and the two
mirrors together add a half-turn ambiguity: (x, y, theta) and
(10 - x, 4 - y, theta + pi) produce identical scans.
"""

import json
import pathlib

RES = 0.05
WIDTH_M, HEIGHT_M = 10.0, 4.0
PITCH = 2.0
DOOR = 0.8
PARTITION = 0.1
MARGIN = 0.3  # outer wall thickness


def free(x, y):
    if not (MARGIN <= x < WIDTH_M - MARGIN):
        return False
    y = y if y >= HEIGHT_M / 2 else HEIGHT_M - y  # lower half mirrors the upper
    if 2.0 <= y < 2.5:  # corridor
        return True
    # offset inside the cubicle pitch, measured from a partition; one cubicle
    # is centred on the vertical mid-axis
    u = (x - WIDTH_M / 2 + PITCH / 2) % PITCH
    if 2.7 <= y < 3.7:  # cubicles
        return PARTITION / 2 <= u < PITCH - PARTITION / 2
    if 2.5 <= y < 2.7:  # doorways through the corridor wall
        return abs(u - PITCH / 2) < DOOR / 2
    return False


def main():
    here = pathlib.Path(__file__).resolve().parent
    w, h = round(WIDTH_M / RES), round(HEIGHT_M / RES)
    rows = []
    for img_row in range(h):
        y = (h - 1 - img_row + 0.5) * RES  # image row 0 is the top of the map
        rows.append(bytes(254 if free((c + 0.5) * RES, y) else 0 for c in range(w)))
    for r in range(h):
        assert rows[r] == rows[h - 1 - r] and rows[r] == rows[r][::-1], "map is not symmetric"

    header = f"P5\n# corridor\n{w} {h}\n255\n"
    (here / "corridor.pgm").write_bytes(header.encode("ascii") + b"".join(rows))
    meta = {
        "resolution": RES,
        "origin": {"x": 0.0, "y": 0.0, "theta": 0.0},
        "occupied_thresh": 0.65,
        "free_thresh": 0.196,
        "negate": 0,
    }
    (here / "corridor_map.json").write_text(json.dumps(meta, indent=2) + "\n")


if __name__ == "__main__":
    main()
