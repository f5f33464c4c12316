#!/usr/bin/env python3
"""Regenerates the ASCII maps under scenarios/maps/."""

from pathlib import Path

import numpy as np

RES = 0.1
OUT = Path(__file__).resolve().parent / "maps"


def blank(width_m, height_m):
    g = np.zeros((round(height_m / RES), round(width_m / RES)), dtype=bool)
    return g


def box(g, x0, y0, x1, y1, value=True):
    """Marks cells whose centers fall inside [x0, x1] x [y0, y1]."""
    rows, cols = g.shape
    xs = (np.arange(cols) + 0.5) * RES
    ys = (np.arange(rows) + 0.5) * RES
    mx = (xs >= x0) & (xs <= x1)
    my = (ys >= y0) & (ys <= y1)
    g[np.ix_(my, mx)] = value


def border(g, t=0.2):
    h, w = g.shape[0] * RES, g.shape[1] * RES
    box(g, 0, 0, w, t)
    box(g, 0, h - t, w, h)
    box(g, 0, 0, t, h)
    box(g, w - t, 0, w, h)


def write(name, g):
    OUT.mkdir(exist_ok=True)
    lines = [f"res {RES} origin 0 0"]
    for row in g[::-1]:  # first text row is the top of the map
        lines.append("".join("#" if c else "." for c in row))
    (OUT / name).write_text("\n".join(lines) + "\n")


def open_map():
    g = blank(10, 6)
    border(g)
    return g


def narrow_s():
    # 16 x 8 m. Two staggered walls make the S; a 0.8 m door in the middle
    # wall is the narrowest passage.
    g = blank(16, 8)
    border(g)
    box(g, 4.8, 0, 5.2, 5.6)
    box(g, 10.8, 2.4, 11.2, 8)
    box(g, 7.8, 0, 8.2, 3.6)
    box(g, 7.8, 4.4, 8.2, 8)
    return g


def scale_course():
    # 15 x 8 m. A 0.6 m door in a vertical wall, then a 0.6 m door in a
    # horizontal wall, so the body has to turn between them.
    g = blank(15, 8)
    border(g)
    box(g, 4.8, 0, 5.2, 2.0)
    box(g, 4.8, 2.6, 5.2, 8)
    box(g, 5.2, 3.8, 7.2, 4.2)
    box(g, 7.8, 3.8, 15, 4.2)
    return g


if __name__ == "__main__":
    write("open.txt", open_map())
    write("narrow_s.txt", narrow_s())
    write("scale_course.txt", scale_course())
