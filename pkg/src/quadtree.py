from dataclasses import dataclass, field
from typing import List, Tuple, Iterable, Dict

import numpy as np
from loguru import logger

from src.errors import FieldOverflowError
from src.halftone import as_bits
from src.keywords import Layout, MergeOrder


@dataclass(frozen=True)
class Rect:
    """Block coordinates: x is the left column, y the top row."""
    x: int
    y: int
    w: int
    h: int

    @property
    def area(self) -> int:
        return self.w * self.h

    @property
    def raster_key(self) -> Tuple[int, int]:
        return self.y, self.x

    def slice_of(self, img: np.ndarray) -> np.ndarray:
        return img[self.y:self.y + self.h, self.x:self.x + self.w]

    def fits_field(self) -> bool:
        return all(0 <= v <= Layout.MAX_COORD for v in (self.x, self.y, self.w, self.h))

    def inside(self, rows: int, cols: int) -> bool:
        return self.w >= 1 and self.h >= 1 and self.x >= 0 and self.y >= 0 \
            and self.x + self.w <= cols and self.y + self.h <= rows

    def split(self) -> Tuple["Rect", "Rect", "Rect", "Rect"]:
        to_m = self.w // 2
        to_n = self.h // 2
        return (Rect(self.x, self.y, to_m, to_n),
                Rect(self.x + to_m, self.y, self.w - to_m, to_n),
                Rect(self.x, self.y + to_n, to_m, self.h - to_n),
                Rect(self.x + to_m, self.y + to_n, self.w - to_m, self.h - to_n))

    def __str__(self):
        return f"({self.x},{self.y},{self.w},{self.h})"


@dataclass
class Decomposition:
    image_dims: Tuple[int, int]
    leaves: List[Rect] = field(default_factory=list)

    @property
    def area(self) -> int:
        return sum(r.area for r in self.leaves)


def _is_divisible(block: np.ndarray, rect: Rect, min_length: int, threshold: int) -> bool:
    if min(rect.w, rect.h) <= 2 * min_length:
        return False
    return int(block.max()) - int(block.min()) >= threshold


def r_quadtree(img, min_length: int = 4, threshold: int = 1) -> Decomposition:
    """
    Rectangular quadtree: split any block whose shorter side exceeds
    2*min_length and whose intensity spread reaches threshold into four
    floor-half children. Leaves are returned in depth-first order
    (top-left, top-right, bottom-left, bottom-right).
    """
    if min_length < 1:
        raise ValueError("min_length must be at least 1")
    if threshold < 1:
        raise ValueError("threshold must be at least 1")
    img = np.asarray(img)
    if img.ndim != 2 or img.size == 0:
        raise ValueError(f"cannot decompose an empty image of shape {img.shape}")

    rows, cols = img.shape
    leaves: List[Rect] = []
    stack = [Rect(0, 0, cols, rows)]
    while stack:
        rect = stack.pop()
        if _is_divisible(rect.slice_of(img), rect, min_length, threshold):
            stack.extend(reversed(rect.split()))
        else:
            leaves.append(rect)
    logger.debug(f"r-quadtree: {rows}x{cols}, min length {min_length}, leaves: {len(leaves)}")
    return Decomposition((rows, cols), leaves)


def content_rects(img, d: Decomposition) -> List[Rect]:
    """Leaves holding at least one 1-bit, in raster order."""
    img = as_bits(img)
    if img.shape != tuple(d.image_dims):
        raise ValueError(f"decomposition of {d.image_dims} does not match image {img.shape}")
    found = [r for r in d.leaves if r.slice_of(img).any()]
    return sorted(found, key=lambda r: r.raster_key)


def tile_rects(img, rects: Iterable[Rect], limit: int = Layout.MAX_COORD) -> List[Rect]:
    """
    Cut every rect wider or taller than limit into tiles of at most limit per
    side. Tiles without a 1-bit are dropped; the result is raster sorted.
    """
    img = as_bits(img)
    tiles = []
    for r in rects:
        if r.w <= limit and r.h <= limit:
            tiles.append(r)
            continue
        for y in range(r.y, r.y + r.h, limit):
            for x in range(r.x, r.x + r.w, limit):
                tile = Rect(x, y, min(limit, r.x + r.w - x), min(limit, r.y + r.h - y))
                if tile.slice_of(img).any():
                    tiles.append(tile)
    return sorted(tiles, key=lambda r: r.raster_key)


def _merge_pass(rects: List[Rect], vertical: bool) -> Tuple[List[Rect], bool]:
    # keyed by top-left corner; disjoint rects never share one
    remaining: Dict[Tuple[int, int], Rect] = {(r.x, r.y): r for r in rects}
    merged: List[Rect] = []
    changed = False
    while remaining:
        first = remaining.pop(next(iter(remaining)))
        x, y, w, h = first.x, first.y, first.w, first.h
        while True:
            if vertical:
                b = remaining.get((x, y + h))
                if b is None or b.w != w or h + b.h > Layout.MAX_COORD:
                    break
                h += b.h
            else:
                b = remaining.get((x + w, y))
                if b is None or b.h != h or w + b.w > Layout.MAX_COORD:
                    break
                w += b.w
            del remaining[(b.x, b.y)]
            changed = True
        merged.append(Rect(x, y, w, h))
    return merged, changed


def merge_rects(rects: Iterable[Rect], order: MergeOrder = MergeOrder.VERTICAL_FIRST) -> List[Rect]:
    """
    Merge adjacent blocks: vertical pass joins equal (x, w) neighbours stacked
    on each other, horizontal pass joins equal (y, h) neighbours side by side.
    Both passes repeat until nothing changes, then blocks are raster sorted.
    A merge that would exceed the 12-bit field is skipped.
    """
    current = sorted(rects, key=lambda r: r.raster_key)
    for r in current:
        if not r.fits_field():
            raise FieldOverflowError(f"rect {r}", max(r.x, r.y, r.w, r.h), Layout.COORD_BITS)
    passes = (True, False) if order is MergeOrder.VERTICAL_FIRST else (False, True)
    rounds = 0
    changed = True
    while changed:
        changed = False
        for vertical in passes:
            current, did = _merge_pass(current, vertical)
            current.sort(key=lambda r: r.raster_key)
            changed = changed or did
        rounds += 1
    logger.debug(f"merged into {len(current)} blocks after {rounds} rounds")
    return current


def coverage(rects: Iterable[Rect], rows: int, cols: int) -> np.ndarray:
    """How many rects cover each cell."""
    mask = np.zeros((rows, cols), dtype=np.int32)
    for r in rects:
        r.slice_of(mask)[...] += 1
    return mask
