import math
import sys
from dataclasses import asdict
from pathlib import Path

import pandas as pd
from loguru import logger

from src.codec import bits_to_words, decode_stream, encode_stream, pack_bit_file, tokens_to_words, \
    unpack_bit_file, words_to_bits, words_to_tokens
from src.halftone import complement, from_halftone, to_halftone
from src.keywords import StatsFormat
from src.metrics import psnr, ssim_global
from src.netpbm import load_bits, load_gray, read_pbm, write_pbm, write_pgm
from src.quadtree import content_rects, merge_rects, r_quadtree
from src.statistics import FLOAT_FORMAT, BenchStatistics
from src.stego import EmbedParams, StegoKey, choose_sd_threshold, hide_prepared, prepare_document, \
    reveal_document

LOG_FORMAT = "<level>{level: <6}</level> | <cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> - <level>{message}</level>"


class Initialize:
    def __init__(self, config, out=None):
        self._config = config
        self._logger = logger
        self._out = out if out is not None else sys.stdout

        self._update_log_config()

    def _update_log_config(self):
        logger.remove()
        logger.add(sys.stderr, level=self._config.log_level, format=LOG_FORMAT)
        if self._config.log_dir is not None:
            loggerPath = Path(self._config.log_dir) / "log_{time}.log"
            logger.add(loggerPath.as_posix(), level=self._config.log_level, rotation="100 MB", format=LOG_FORMAT)


class StegoDoc(Initialize):
    def __init__(self, config, out=None):
        super().__init__(config, out)
        self._settings = config.settings

    def run(self):
        self._logger.debug(f"command: {self._config.command}")
        handler = getattr(self, f"cmd_{self._config.command}")
        handler()

    def _write_csv(self, frame: pd.DataFrame):
        frame.to_csv(self._out, index=False, float_format=FLOAT_FORMAT, na_rep="undefined", lineterminator="\n")

    def cmd_halftone(self):
        s = self._settings
        if s.inverse:
            gray = from_halftone(read_pbm(s.input))
            write_pgm(s.out, gray)
            self._logger.info(f"inverse halftone {gray.shape[1]}x{gray.shape[0]} -> {s.out}")
        else:
            ht = to_halftone(load_gray(s.input, self._config.allow_other_formats))
            write_pbm(s.out, ht)
            self._logger.info(f"halftone {ht.shape[1]}x{ht.shape[0]} -> {s.out}")

    def cmd_inspect(self):
        s = self._settings
        message = complement(load_bits(s.input, self._config.allow_other_formats))
        decomposition = r_quadtree(message, self._config.min_length, self._config.split_threshold)
        content = content_rects(message, decomposition)

        groups = []
        if s.what in ("all", "leaves"):
            groups.append(("leaf", decomposition.leaves))
        if s.what in ("all", "content"):
            groups.append(("content", content))
        if s.what in ("all", "merged"):
            groups.append(("merged", merge_rects(content, self._config.merge_order)))

        rows = [(kind, r.x, r.y, r.w, r.h, int(r.slice_of(message).sum())) for kind, rects in groups for r in rects]
        self._logger.info(f"leaves: {len(decomposition.leaves)}, content rects: {len(content)}")
        self._write_csv(pd.DataFrame(rows, columns=["kind", "x", "y", "w", "h", "ones_count"]))

    def cmd_embed(self):
        s = self._settings
        cfg = self._config
        host = load_gray(s.host, cfg.allow_other_formats)
        doc = load_gray(s.doc, cfg.allow_other_formats)
        prepared = prepare_document(doc, cfg.min_length, cfg.split_threshold, cfg.merge_order)

        sd_threshold = cfg.sd_threshold
        if cfg.auto_sd_thresholds:
            sd_threshold = choose_sd_threshold(host, prepared, cfg.auto_sd_thresholds)

        stego, stats = hide_prepared(host, prepared, StegoKey(cfg.key), EmbedParams(sd_threshold))
        write_pgm(s.out, stego)

        if cfg.stats is StatsFormat.CSV:
            self._write_csv(pd.DataFrame([asdict(stats)]))

    def cmd_extract(self):
        s = self._settings
        stego = load_gray(s.stego, self._config.allow_other_formats)
        halftone, gray = reveal_document(stego, StegoKey(self._config.key), EmbedParams(self._config.sd_threshold))
        if s.out_halftone:
            write_pbm(s.out_halftone, halftone)
        if s.out_gray:
            write_pgm(s.out_gray, gray)
        self._logger.info(f"recovered a {halftone.shape[1]}x{halftone.shape[0]} document")

    def cmd_metrics(self):
        s = self._settings
        ref = load_gray(s.ref, self._config.allow_other_formats)
        test = load_gray(s.test, self._config.allow_other_formats)
        ssim = ssim_global(ref, test)
        self._write_csv(pd.DataFrame([{"psnr": psnr(ref, test), "ssim": math.nan if ssim is None else ssim}]))

    def cmd_codec(self):
        s = self._settings
        bits = unpack_bit_file(Path(s.input).read_bytes())
        if s.action == "encode":
            words = tokens_to_words(encode_stream(bits))
            out = words_to_bits(words)
            self._logger.info(f"encoded {len(bits)} bits into {len(words)} words")
        else:
            out = decode_stream(words_to_tokens(bits_to_words(bits)))
            self._logger.info(f"decoded {len(bits) // 12} words into {len(out)} bits")
        Path(s.out).write_bytes(pack_bit_file(out))

    def cmd_bench(self):
        s = self._settings
        bench = BenchStatistics(self._config)
        bench.run(s.hosts, s.docs)
        if s.out:
            bench.write_report(s.out)
        else:
            bench.write_report(self._out)
