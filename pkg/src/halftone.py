"""
Binary halftoning of gray-level document scans and the low-pass inverse.

Images are plain 2-D numpy arrays: a GrayImage is ``uint8`` in [0, 255], a
BitImage is ``uint8`` holding only 0 and 1. A halftone keeps white as 1, so
after `complement` the document content becomes the (sparse) 1-bits.
"""
import numpy as np
from scipy import ndimage

FS_THRESHOLD = 128
FS_WEIGHTS = (7 / 16, 3 / 16, 5 / 16, 1 / 16)

GAUSSIAN_SIGMA = 0.5


def as_gray(img) -> np.ndarray:
    arr = np.asarray(img)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"gray image must be a non-empty 2-D array, got shape {arr.shape}")
    if arr.dtype != np.uint8:
        if arr.size and (arr.min() < 0 or arr.max() > 255):
            raise ValueError("gray image values must lie in [0, 255]")
        if np.issubdtype(arr.dtype, np.floating):
            arr = np.rint(arr)
        arr = arr.astype(np.uint8)
    return arr


def as_bits(img) -> np.ndarray:
    arr = np.asarray(img)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"bit image must be a non-empty 2-D array, got shape {arr.shape}")
    if arr.dtype == np.bool_:
        return arr.astype(np.uint8)
    if np.any((arr != 0) & (arr != 1)):
        raise ValueError("bit image may only contain 0 and 1")
    return arr.astype(np.uint8, copy=False)


def to_halftone(doc) -> np.ndarray:
    """
    Floyd-Steinberg error diffusion, plain raster scan.

    A pixel whose diffused value reaches FS_THRESHOLD becomes 1 (white),
    anything below becomes 0. Error falling outside the page is dropped.
    """
    doc = as_gray(doc)
    rows, cols = doc.shape
    w_right, w_down_left, w_down, w_down_right = FS_WEIGHTS
    out = np.empty((rows, cols), dtype=np.uint8)

    current = doc[0].astype(np.float64).tolist()
    for y in range(rows):
        below = doc[y + 1].astype(np.float64).tolist() if y + 1 < rows else [0.0] * cols
        bits = out[y]
        for x in range(cols):
            old = current[x]
            if old >= FS_THRESHOLD:
                bits[x] = 1
                err = old - 255.0
            else:
                bits[x] = 0
                err = old
            if err == 0.0:
                continue
            if x + 1 < cols:
                current[x + 1] += err * w_right
                below[x + 1] += err * w_down_right
            if x > 0:
                below[x - 1] += err * w_down_left
            below[x] += err * w_down
        current = below
    return out


def gaussian_kernel(sigma: float = GAUSSIAN_SIGMA) -> np.ndarray:
    offsets = np.arange(-1, 2, dtype=np.float64)
    yy, xx = np.meshgrid(offsets, offsets, indexing="ij")
    kernel = np.exp(-(xx ** 2 + yy ** 2) / (2.0 * sigma ** 2))
    return kernel / kernel.sum()


def from_halftone(ht, sigma: float = GAUSSIAN_SIGMA) -> np.ndarray:
    """Inverse halftone: 3x3 Gaussian low-pass with edge replication."""
    ht = as_bits(ht)
    smooth = ndimage.correlate(ht.astype(np.float64), gaussian_kernel(sigma), mode="nearest")
    return np.clip(np.rint(255.0 * smooth), 0, 255).astype(np.uint8)


def complement(b) -> np.ndarray:
    return (1 - as_bits(b)).astype(np.uint8)
