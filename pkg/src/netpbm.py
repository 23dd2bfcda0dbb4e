"""
Binary netpbm I/O: P5 for gray images, P4 for halftones.

PBM stores 1 for black while a halftone keeps white as 1, so bits are
inverted on the way in and out.
"""
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np

from src.halftone import as_bits, as_gray, to_halftone

PathLike = Union[str, Path]

GRAY_SUFFIXES = {".pgm"}
BIT_SUFFIXES = {".pbm"}


def _read_header(data: bytes, count: int) -> Tuple[List[bytes], int]:
    """Read `count` whitespace separated header tokens, skipping # comments."""
    tokens = []
    pos = 0
    while len(tokens) < count:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if pos >= len(data):
            raise ValueError("truncated netpbm header")
        if data[pos:pos + 1] == b"#":
            end = data.find(b"\n", pos)
            pos = len(data) if end < 0 else end + 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        tokens.append(data[start:pos])
    # exactly one whitespace byte separates the header from the raster
    return tokens, pos + 1


def _dims(tokens: List[bytes]) -> Tuple[int, int]:
    try:
        cols, rows = int(tokens[1]), int(tokens[2])
    except ValueError:
        raise ValueError(f"bad netpbm dimensions: {tokens[1:3]}") from None
    if rows < 1 or cols < 1:
        raise ValueError(f"netpbm image is empty: {cols}x{rows}")
    return rows, cols


def read_pgm(path: PathLike) -> np.ndarray:
    data = Path(path).read_bytes()
    tokens, offset = _read_header(data, 4)
    if tokens[0] != b"P5":
        raise ValueError(f"{path}: expected a binary PGM (P5), got {tokens[0]!r}")
    rows, cols = _dims(tokens)
    maxval = int(tokens[3])
    if not 0 < maxval <= 255:
        raise ValueError(f"{path}: only 8-bit PGM is supported, maxval={maxval}")
    raster = np.frombuffer(data, dtype=np.uint8, count=rows * cols, offset=offset)
    img = raster.reshape(rows, cols)
    if maxval != 255:
        img = np.rint(img.astype(np.float64) * 255.0 / maxval).astype(np.uint8)
    return img.copy()


def write_pgm(path: PathLike, img) -> None:
    img = as_gray(img)
    rows, cols = img.shape
    Path(path).write_bytes(f"P5\n{cols} {rows}\n255\n".encode("ascii") + img.tobytes())


def read_pbm(path: PathLike) -> np.ndarray:
    data = Path(path).read_bytes()
    tokens, offset = _read_header(data, 3)
    if tokens[0] != b"P4":
        raise ValueError(f"{path}: expected a binary PBM (P4), got {tokens[0]!r}")
    rows, cols = _dims(tokens)
    stride = (cols + 7) // 8
    raster = np.frombuffer(data, dtype=np.uint8, count=rows * stride, offset=offset)
    black = np.unpackbits(raster.reshape(rows, stride), axis=1)[:, :cols]
    return (1 - black).astype(np.uint8)


def write_pbm(path: PathLike, bits) -> None:
    bits = as_bits(bits)
    rows, cols = bits.shape
    black = np.packbits(1 - bits, axis=1)
    Path(path).write_bytes(f"P4\n{cols} {rows}\n".encode("ascii") + black.tobytes())


def load_gray(path: PathLike, allow_other: bool = False) -> np.ndarray:
    path = Path(path)
    if path.suffix.lower() in GRAY_SUFFIXES:
        return read_pgm(path)
    if not allow_other:
        raise ValueError(f"{path}: only .pgm is read without --allow-other-formats")
    from PIL import Image

    with Image.open(path) as im:
        return np.asarray(im.convert("L"), dtype=np.uint8).copy()


def load_bits(path: PathLike, allow_other: bool = False) -> np.ndarray:
    """A halftone file as-is, or a gray document halftoned on the fly."""
    path = Path(path)
    if path.suffix.lower() in BIT_SUFFIXES:
        return read_pbm(path)
    return to_halftone(load_gray(path, allow_other))
