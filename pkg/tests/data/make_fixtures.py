"""Regenerate the two PNG fixtures used by the color-transfer tests."""

import numpy as np
from PIL import Image


def _image(seed, base, tilt, size=64):
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:size, 0:size] / (size - 1)
    wave = 0.5 + 0.5 * np.sin(6.0 * xx + 4.0 * yy)
    img = np.empty((size, size, 3))
    for c in range(3):
        img[..., c] = base[c] + tilt[c][0] * xx + tilt[c][1] * yy + 40.0 * (wave - 0.5)
    img += rng.normal(0.0, 6.0, img.shape)
    return np.clip(np.rint(img), 0, 255).astype(np.uint8)


if __name__ == "__main__":
    warm = _image(1, (200, 110, 50), ((40, 10), (-60, 60), (10, 30)))
    cool = _image(2, (40, 120, 190), ((20, 30), (50, -40), (-50, 50)))
    Image.fromarray(warm, "RGB").save("source.png")
    Image.fromarray(cool, "RGB").save("target.png")
