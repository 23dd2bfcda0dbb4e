"""
Texture adaptive 3-LSB embedding of a compressed document.

Only the five most significant bits of the host decide which pixels carry
data, so the receiver recomputes the same mask from the stego image.
"""
import math
from dataclasses import dataclass
from typing import List, Iterable, Iterator, Sequence, Tuple

import numpy as np
from loguru import logger
from scipy import ndimage

from src.codec import (Payload, StreamDecoder, encode_stream, paint_payload, payload_from_image, read_payload,
                       serialize_payload, tokens_to_words, word_to_token)
from src.errors import CapacityExceeded, CorruptPayloadError
from src.halftone import as_gray, complement, from_halftone, to_halftone
from src.keywords import Layout, MergeOrder
from src.metrics import rates
from src.quadtree import content_rects, merge_rects, r_quadtree, tile_rects

MASK64 = (1 << 64) - 1
ZERO_SEED_STATE = 0x9E3779B97F4A7C15
MULTIPLIER = 0x2545F4914F6CDD1D

_SHIFTS = np.array([9, 6, 3, 0], dtype=np.int64)
_LSB_MASK = (1 << Layout.LSB_BITS) - 1


@dataclass(frozen=True)
class StegoKey:
    seed: int

    def __post_init__(self):
        if not 0 <= self.seed <= MASK64:
            raise ValueError(f"key {self.seed} is not a 64-bit unsigned integer")


@dataclass(frozen=True)
class EmbedParams:
    sd_threshold: float = 2.5

    def __post_init__(self):
        if not math.isfinite(self.sd_threshold) or self.sd_threshold < 0:
            raise ValueError(f"sd threshold must be finite and non-negative, got {self.sd_threshold}")


class Keystream:
    """xorshift64 state with a multiplicative output step, 12 bits per draw."""

    def __init__(self, key: StegoKey):
        self._state = key.seed or ZERO_SEED_STATE

    def next_word(self) -> int:
        s = self._state
        s ^= (s << 13) & MASK64
        s ^= s >> 7
        s ^= (s << 17) & MASK64
        self._state = s
        return ((s * MULTIPLIER) & MASK64) >> 52

    def next_words(self, n: int) -> np.ndarray:
        return np.fromiter((self.next_word() for _ in range(n)), dtype=np.int64, count=n)


def keystream(key: StegoKey, n: int) -> List[int]:
    return Keystream(key).next_words(n).tolist()


def embeddable_mask(host, p: EmbedParams) -> np.ndarray:
    """
    Interior pixels whose 3x3 neighbourhood, with the 3 LSBs cleared, has a
    sample standard deviation (divisor 8) above the threshold.
    """
    host = as_gray(host)
    if host.shape[0] < 3 or host.shape[1] < 3:
        raise ValueError(f"host must be at least 3x3, got {host.shape}")
    f = (host >> Layout.LSB_BITS).astype(np.int64) << Layout.LSB_BITS
    window = np.ones((3, 3), dtype=np.int64)
    s = ndimage.correlate(f, window, mode="constant")
    q = ndimage.correlate(f * f, window, mode="constant")
    # 72 * variance, exact in integers
    spread = 9 * q - s * s
    mask = spread > 72.0 * p.sd_threshold * p.sd_threshold
    mask[0, :] = mask[-1, :] = False
    mask[:, 0] = mask[:, -1] = False
    return mask


def _positions(img: np.ndarray, p: EmbedParams) -> np.ndarray:
    return np.flatnonzero(embeddable_mask(img, p))


def capacity_words(host, p: EmbedParams) -> int:
    return int(np.count_nonzero(embeddable_mask(host, p))) // Layout.PIXELS_PER_WORD


def _check_words(words) -> np.ndarray:
    words = np.asarray(list(words), dtype=np.int64)
    if words.size and (words.min() < 0 or words.max() >= 1 << Layout.WORD_BITS):
        raise ValueError(f"words must fit in {Layout.WORD_BITS} bits")
    return words


def embed(host, words: Sequence[int], key: StegoKey, p: EmbedParams) -> np.ndarray:
    host = as_gray(host)
    words = _check_words(words)
    if words.size == 0:
        return host.copy()
    positions = _positions(host, p)
    available = len(positions) // Layout.PIXELS_PER_WORD
    if words.size > available:
        raise CapacityExceeded(available, int(words.size))

    keyed = words ^ Keystream(key).next_words(words.size)
    triples = ((keyed[:, None] >> _SHIFTS) & _LSB_MASK).ravel()
    stego = host.copy()
    flat = stego.reshape(-1)
    idx = positions[:triples.size]
    flat[idx] = (flat[idx] & ~np.uint8(_LSB_MASK)) | triples.astype(np.uint8)
    return stego


def _read_words(flat: np.ndarray, idx: np.ndarray, stream: Keystream) -> np.ndarray:
    triples = (flat[idx] & _LSB_MASK).astype(np.int64).reshape(-1, Layout.PIXELS_PER_WORD)
    words = (triples << _SHIFTS).sum(axis=1)
    return words ^ stream.next_words(len(words))


def extract(stego, word_count: int, key: StegoKey, p: EmbedParams) -> List[int]:
    stego = as_gray(stego)
    positions = _positions(stego, p)
    available = len(positions) // Layout.PIXELS_PER_WORD
    if word_count > available:
        raise CapacityExceeded(available, word_count)
    idx = positions[:word_count * Layout.PIXELS_PER_WORD]
    return _read_words(stego.reshape(-1), idx, Keystream(key)).tolist()


def iter_extract(stego, key: StegoKey, p: EmbedParams, chunk: int = 4096) -> Iterator[int]:
    """Every word the stego image can hold, decoded lazily in chunks."""
    stego = as_gray(stego)
    positions = _positions(stego, p)
    usable = len(positions) - len(positions) % Layout.PIXELS_PER_WORD
    flat = stego.reshape(-1)
    stream = Keystream(key)
    step = chunk * Layout.PIXELS_PER_WORD
    for start in range(0, usable, step):
        yield from _read_words(flat, positions[start:min(start + step, usable)], stream).tolist()


@dataclass
class PreparedDocument:
    halftone: np.ndarray
    min_length: int
    leaves: int
    content_rects: int
    payload: Payload
    payload_bits: int
    words: List[int]


@dataclass
class EmbedStats:
    host_rows: int
    host_cols: int
    doc_rows: int
    doc_cols: int
    sd_threshold: float
    min_length: int
    leaves: int
    content_rects: int
    merged_rects: int
    payload_bits: int
    words: int
    available_words: int
    embedding_rate_bpp: float
    physical_rate_bpp: float
    capacity_rate_bpp: float


def prepare_document(doc, min_length: int = 4, split_threshold: int = 1,
                     merge_order: MergeOrder = MergeOrder.VERTICAL_FIRST) -> PreparedDocument:
    """Halftone, isolate content, merge blocks and compress into 12-bit words."""
    ht = to_halftone(doc)
    message = complement(ht)
    decomposition = r_quadtree(message, min_length, split_threshold)
    # thin pages stop the quadtree early; leaves may exceed the 12-bit size field
    content = tile_rects(message, content_rects(message, decomposition))
    merged = merge_rects(content, merge_order)
    payload = payload_from_image(message, merged)
    bits = serialize_payload(payload)
    words = tokens_to_words(encode_stream(bits))
    logger.debug(f"leaves: {len(decomposition.leaves)}, content rects: {len(content)}, "
                 f"merged: {len(merged)}, payload bits: {len(bits)}, words: {len(words)}")
    return PreparedDocument(ht, min_length, len(decomposition.leaves), len(content), payload, len(bits), words)


def hide_prepared(host, prepared: PreparedDocument, key: StegoKey, p: EmbedParams) -> Tuple[np.ndarray, EmbedStats]:
    host = as_gray(host)
    available = capacity_words(host, p)
    required = len(prepared.words)
    if required > available:
        raise CapacityExceeded(available, required)
    stego = embed(host, prepared.words, key, p)

    doc_dims = (prepared.payload.doc_rows, prepared.payload.doc_cols)
    embedding_rate, physical_rate = rates(host.shape, doc_dims, required)
    capacity_rate = embedding_rate * available / required if required else 0.0
    stats = EmbedStats(host.shape[0], host.shape[1], doc_dims[0], doc_dims[1], p.sd_threshold, prepared.min_length,
                       prepared.leaves, prepared.content_rects, prepared.payload.block_count,
                       prepared.payload_bits, required, available, embedding_rate, physical_rate, capacity_rate)
    logger.info(f"embedded {required}/{available} words, {embedding_rate:.4f} bpp "
                f"(physical {physical_rate:.4f} bpp)")
    return stego, stats


def hide_document(host, doc, key: StegoKey, p: EmbedParams, min_length: int = 4, split_threshold: int = 1,
                  merge_order: MergeOrder = MergeOrder.VERTICAL_FIRST) -> Tuple[np.ndarray, EmbedStats]:
    prepared = prepare_document(doc, min_length, split_threshold, merge_order)
    return hide_prepared(host, prepared, key, p)


def choose_sd_threshold(host, prepared: PreparedDocument, candidates: Iterable[float]) -> float:
    """Largest candidate threshold whose mask still holds the whole payload."""
    required = len(prepared.words)
    best_available = 0
    for t in sorted(set(candidates), reverse=True):
        available = capacity_words(host, EmbedParams(t))
        logger.debug(f"sd threshold {t}: {available} words available, {required} required")
        if available >= required:
            logger.info(f"selected sd threshold {t}")
            return t
        best_available = max(best_available, available)
    raise CapacityExceeded(best_available, required)


def extract_payload(stego, key: StegoKey, p: EmbedParams) -> Tuple[Payload, int]:
    """Decode the payload, reading only as many words as its header asks for."""
    stego = as_gray(stego)
    available = capacity_words(stego, p)
    tokens = (word_to_token(w) for w in iter_extract(stego, key, p))
    decoder = StreamDecoder(tokens, strict=True, max_bits=available * Layout.MAX_TOKEN_LENGTH)
    payload = read_payload(decoder.read)
    decoder.finish()
    logger.debug(f"payload {payload.doc_rows}x{payload.doc_cols}, {payload.block_count} blocks, "
                 f"{decoder.tokens_read} words read")
    return payload, decoder.tokens_read


def reveal_document(stego, key: StegoKey, p: EmbedParams) -> Tuple[np.ndarray, np.ndarray]:
    payload, _ = extract_payload(stego, key, p)
    try:
        halftone = complement(paint_payload(payload))
    except MemoryError:
        raise CorruptPayloadError(f"header declares a {payload.doc_rows}x{payload.doc_cols} document "
                                  f"that cannot be allocated") from None
    return halftone, from_halftone(halftone)
