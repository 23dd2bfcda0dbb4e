import math
import time
from dataclasses import asdict, dataclass, fields
from itertools import product
from pathlib import Path
from typing import Dict, List, Sequence, TextIO, Tuple, Union

import numpy as np
import pandas as pd
from loguru import logger

from src.metrics import psnr, ssim_global
from src.netpbm import load_gray
from src.stego import EmbedParams, PreparedDocument, StegoKey, hide_prepared, prepare_document, reveal_document

FLOAT_FORMAT = "%.4f"
ROW_KEY_STEP = 0x9E3779B97F4A7C15


def row_key(index: int) -> int:
    return ((index + 1) * ROW_KEY_STEP) & ((1 << 64) - 1)


@dataclass
class BenchRow:
    row: int = 0
    host: str = ""
    doc: str = ""
    sd_threshold: float = math.nan
    min_length: int = 0
    key: str = ""
    host_rows: int = 0
    host_cols: int = 0
    doc_rows: int = 0
    doc_cols: int = 0
    content_rects: int = 0
    merged_rects: int = 0
    payload_bits: int = 0
    words: int = 0
    available_words: int = 0
    embedding_rate_bpp: float = math.nan
    physical_rate_bpp: float = math.nan
    capacity_rate_bpp: float = math.nan
    psnr_db: float = math.nan
    ssim: float = math.nan
    doc_psnr_db: float = math.nan
    doc_ssim: float = math.nan
    roundtrip_ok: bool = False
    error: str = ""


COLUMNS = [f.name for f in fields(BenchRow)]


def _undefined(value):
    return math.nan if value is None else value


class BenchStatistics:
    def __init__(self, config):
        self.start = time.time()
        self.split_threshold = config.split_threshold
        self.merge_order = config.merge_order
        self.sd_thresholds = list(config.sd_thresholds)
        self.min_lengths = list(config.min_lengths)
        self.allow_other_formats = config.allow_other_formats
        self._rows: List[BenchRow] = []
        self._images: Dict[str, np.ndarray] = {}
        self._prepared: Dict[Tuple[str, int], PreparedDocument] = {}

    @property
    def rows(self) -> List[BenchRow]:
        return list(self._rows)

    def _image(self, path: str) -> np.ndarray:
        if path not in self._images:
            self._images[path] = load_gray(path, self.allow_other_formats)
        return self._images[path]

    def _document(self, path: str, min_length: int) -> PreparedDocument:
        if (path, min_length) not in self._prepared:
            self._prepared[(path, min_length)] = prepare_document(self._image(path), min_length,
                                                                  self.split_threshold, self.merge_order)
        return self._prepared[(path, min_length)]

    def run(self, hosts: Sequence[str], docs: Sequence[str]) -> List[BenchRow]:
        combinations = list(product(hosts, docs, self.sd_thresholds, self.min_lengths))
        logger.info(f"bench: {len(combinations)} combinations")
        for index, (host, doc, sd_threshold, min_length) in enumerate(combinations):
            row = self._measure(index, str(host), str(doc), sd_threshold, min_length)
            logger.debug(f"{index + 1}-th row: {row}")
            self._rows.append(row)

        failed = sum(1 for r in self._rows if r.error)
        logger.info(f"bench finished in {time.time() - self.start:.1f}s, {failed} failed rows")
        return self.rows

    def _measure(self, index: int, host: str, doc: str, sd_threshold: float, min_length: int) -> BenchRow:
        key = row_key(index)
        row = BenchRow(row=index, host=host, doc=doc, sd_threshold=sd_threshold, min_length=min_length,
                       key=f"{key:#018x}")
        try:
            host_img = self._image(host)
            doc_img = self._image(doc)
            prepared = self._document(doc, min_length)
            row.content_rects = prepared.content_rects
            row.merged_rects = prepared.payload.block_count
            row.payload_bits = prepared.payload_bits
            row.words = len(prepared.words)

            p = EmbedParams(sd_threshold)
            stego, stats = hide_prepared(host_img, prepared, StegoKey(key), p)
            for name in ("host_rows", "host_cols", "doc_rows", "doc_cols", "available_words",
                         "embedding_rate_bpp", "physical_rate_bpp", "capacity_rate_bpp"):
                setattr(row, name, getattr(stats, name))
            row.psnr_db = psnr(host_img, stego)
            row.ssim = _undefined(ssim_global(host_img, stego))

            halftone, gray = reveal_document(stego, StegoKey(key), p)
            row.roundtrip_ok = bool(np.array_equal(halftone, prepared.halftone))
            row.doc_psnr_db = psnr(doc_img, gray)
            row.doc_ssim = _undefined(ssim_global(doc_img, gray))
        except Exception as e:
            logger.warning(f"row {index} ({host}, {doc}, T3={sd_threshold}, min_length={min_length}): {e}")
            row.error = f"{type(e).__name__}: {e}"
        return row

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame([asdict(r) for r in self._rows], columns=COLUMNS)
        frame["roundtrip_ok"] = frame["roundtrip_ok"].map({True: "true", False: "false"})
        return frame

    def write_report(self, target: Union[str, Path, TextIO]):
        self.to_frame().to_csv(target, index=False, float_format=FLOAT_FORMAT, na_rep="undefined",
                               lineterminator="\n")
        if isinstance(target, (str, Path)):
            logger.info(f"bench report written to {target}")
