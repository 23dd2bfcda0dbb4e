import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from src.halftone import as_gray
from src.keywords import Layout


@dataclass(frozen=True)
class QualityReport:
    psnr_db: float
    ssim: Optional[float]
    embedding_rate_bpp: float
    physical_rate_bpp: float


def _pair(a, b) -> Tuple[np.ndarray, np.ndarray]:
    a = as_gray(a)
    b = as_gray(b)
    if a.shape != b.shape:
        raise ValueError(f"image dimensions differ: {a.shape} vs {b.shape}")
    return a.astype(np.float64), b.astype(np.float64)


def mse(a, b) -> float:
    a, b = _pair(a, b)
    return float(np.mean((a - b) ** 2))


def psnr(a, b) -> float:
    """PSNR whose peak is the largest squared pixel of the first image."""
    error = mse(a, b)
    if error == 0.0:
        return math.inf
    peak = float(np.max(as_gray(a))) ** 2
    if peak == 0.0:
        return -math.inf
    return 10.0 * math.log10(peak / error)


def ssim_global(a, b) -> Optional[float]:
    """
    Whole-image SSIM without stabilizing constants: correlation, luminance
    and contrast terms over sample statistics (divisor N-1). None when either
    image is constant, where the terms are undefined.
    """
    a, b = _pair(a, b)
    x = a.ravel()
    y = b.ravel()
    if x.size < 2:
        return None
    mx, my = x.mean(), y.mean()
    sx, sy = x.std(ddof=1), y.std(ddof=1)
    if sx == 0.0 or sy == 0.0:
        return None
    sxy = float(np.sum((x - mx) * (y - my))) / (x.size - 1)
    correlation = sxy / (sx * sy)
    luminance = 2.0 * mx * my / (mx ** 2 + my ** 2)
    contrast = 2.0 * sx * sy / (sx ** 2 + sy ** 2)
    return float(correlation * luminance * contrast)


def rates(host_dims: Tuple[int, int], doc_dims: Tuple[int, int], words: int) -> Tuple[float, float]:
    host_rows, host_cols = host_dims
    doc_rows, doc_cols = doc_dims
    if min(host_rows, host_cols, doc_rows, doc_cols) <= 0:
        raise ValueError(f"dimensions must be positive: host {host_dims}, doc {doc_dims}")
    host_pixels = host_rows * host_cols
    return doc_rows * doc_cols / host_pixels, Layout.WORD_BITS * words / host_pixels


def quality_report(host, stego, doc_dims: Tuple[int, int], words: int) -> QualityReport:
    embedding_rate, physical_rate = rates(np.shape(host), doc_dims, words)
    return QualityReport(psnr(host, stego), ssim_global(host, stego), embedding_rate, physical_rate)
