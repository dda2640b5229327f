"""Regenerate blobs_128.pgm, the bundled low-rank test image.

The image is a fixed sum of five separable smooth terms (outer products
of Gaussian bumps on a gentle baseline), so its exact rank is five and
recovery from a modest sample of pixels is well posed.  Deterministic;
rerunning reproduces the committed file byte for byte.
"""

import pathlib

import numpy as np

from nmfc.io import write_pgm


def bump(t, center, width):
    return np.exp(-((t - center) / width) ** 2)


def build(size=128):
    t = np.linspace(0.0, 1.0, size)
    rows = [
        0.9 * bump(t, 0.25, 0.18) + 0.1,
        0.8 * bump(t, 0.70, 0.12) + 0.1,
        0.7 * bump(t, 0.50, 0.30) + 0.2,
        0.6 * bump(t, 0.85, 0.10) + 0.1,
        0.3 + 0.5 * t,
    ]
    cols = [
        0.8 * bump(t, 0.65, 0.15) + 0.1,
        0.9 * bump(t, 0.30, 0.20) + 0.1,
        0.5 * bump(t, 0.15, 0.10) + 0.2,
        0.7 * bump(t, 0.55, 0.25) + 0.1,
        0.4 + 0.4 * (1.0 - t),
    ]
    img = sum(np.outer(u, v) for u, v in zip(rows, cols))
    return 255.0 * img / img.max()


if __name__ == "__main__":
    out = pathlib.Path(__file__).parent / "blobs_128.pgm"
    write_pgm(build(), 255, out)
    print("wrote", out)
