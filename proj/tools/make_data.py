#!/usr/bin/env python3
"""Regenerate the test images in data/ from the scikit-image sample set.

Colour images are converted with skimage.color.rgb2gray and quantized with
img_as_ubyte. Output is binary PGM (P5, maxval 255).
"""
import argparse
import pathlib

import numpy as np
import skimage.data
from skimage.color import rgb2gray
from skimage.util import img_as_ubyte

IMAGES = {"camera": "camera_512.pgm", "moon": "moon_512.pgm", "astronaut": "astronaut_512.pgm"}


def write_pgm(path, img):
    h, w = img.shape
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (w, h))
        f.write(np.ascontiguousarray(img, dtype=np.uint8).tobytes())


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data"))
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, fname in IMAGES.items():
        img = getattr(skimage.data, name)()
        if img.ndim == 3:
            img = rgb2gray(img[..., :3])
        img = img_as_ubyte(img)
        assert img.shape == (512, 512), (name, img.shape)
        write_pgm(out / fname, img)
        print(out / fname)


if __name__ == "__main__":
    main()
