"""Regenerates the 128x128 8-bit PGM test images shipped in this directory.

cameraman.pgm  scikit-image `data.camera()`, area-downsampled from 512x512
portrait.pgm   scikit-image `data.astronaut()` (NASA, public domain), grayscale, area-downsampled
qrcode.pgm     QR code generated with the `qrcode` package, nearest-neighbour scaled

Requires numpy, scikit-image and qrcode.
"""

import os

import numpy as np
import qrcode
from skimage import color, data, transform

SIZE = 128
HERE = os.path.dirname(os.path.abspath(__file__))


def write_pgm(path, img):
    img = np.asarray(img, dtype=np.uint8)
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (w, h))
        fh.write(img.tobytes())


def area_downsample(img):
    out = transform.resize(img, (SIZE, SIZE), order=1, anti_aliasing=True, preserve_range=True)
    return np.clip(np.rint(out), 0, 255)


def main():
    write_pgm(os.path.join(HERE, "cameraman.pgm"), area_downsample(data.camera().astype(float)))

    gray = color.rgb2gray(data.astronaut()) * 255.0
    write_pgm(os.path.join(HERE, "portrait.pgm"), area_downsample(gray))

    qr = qrcode.QRCode(version=2, border=2, error_correction=qrcode.constants.ERROR_CORRECT_M)
    qr.add_data("https://example.org/qtv")
    qr.make(fit=False)
    modules = np.array(qr.get_matrix(), dtype=bool)
    m = modules.shape[0]
    idx = (np.arange(SIZE) * m) // SIZE
    img = np.where(modules[np.ix_(idx, idx)], 0, 255)
    write_pgm(os.path.join(HERE, "qrcode.pgm"), img)


if __name__ == "__main__":
    main()
