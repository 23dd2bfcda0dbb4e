"""
Payload layout and the decimal coding of bit vectors.

A payload is serialized MSB-first as

    doc_rows(20) | doc_cols(20) | block_count(16) | {x(12) y(12) w(12) h(12)}* | contents

and the resulting bit vector is cut greedily into tokens: at each cursor the
longest prefix whose value stays below 64 (at most 63 bits long) becomes one
(length, value) pair, packed as a 12-bit word.
"""
import struct
from dataclasses import dataclass, field
from typing import List, Iterable, Callable, Optional

import numpy as np
from loguru import logger

from src.errors import CorruptPayloadError, FieldOverflowError
from src.keywords import Layout
from src.quadtree import Rect

LENGTH_PREFIX = struct.Struct(">Q")


@dataclass(frozen=True)
class Token:
    length: int
    value: int

    @property
    def is_valid(self) -> bool:
        return 0 <= self.length <= Layout.MAX_TOKEN_LENGTH and 0 <= self.value <= Layout.MAX_TOKEN_VALUE \
            and self.value < (1 << min(self.length, Layout.FIELD_BITS))

    @property
    def is_canonical(self) -> bool:
        """True when the greedy encoder can emit this token anywhere but at the end of a stream."""
        if self.length == Layout.MAX_TOKEN_LENGTH:
            return True
        return self.length >= Layout.FIELD_BITS and self.value >= 1 << (Layout.FIELD_BITS - 1)

    def bits(self) -> np.ndarray:
        if not self.is_valid:
            raise CorruptPayloadError(f"invalid token {self}")
        out = np.zeros(self.length, dtype=np.uint8)
        tail = min(self.length, Layout.FIELD_BITS)
        if tail:
            out[self.length - tail:] = int_to_bits(self.value, tail)
        return out


@dataclass
class Payload:
    doc_rows: int
    doc_cols: int
    blocks: List[Rect] = field(default_factory=list)
    contents: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.uint8))

    @property
    def block_count(self) -> int:
        return len(self.blocks)

    @property
    def bit_length(self) -> int:
        return Layout.HEADER_BITS + Layout.RECT_BITS * self.block_count + len(self.contents)

    def validate(self):
        _check_field("doc_rows", self.doc_rows, Layout.MAX_DIM, Layout.DIM_BITS)
        _check_field("doc_cols", self.doc_cols, Layout.MAX_DIM, Layout.DIM_BITS)
        _check_field("block_count", self.block_count, Layout.MAX_COUNT, Layout.COUNT_BITS)
        for r in self.blocks:
            for name in ("x", "y", "w", "h"):
                _check_field(f"block {r} {name}", getattr(r, name), Layout.MAX_COORD, Layout.COORD_BITS)
            if not r.inside(self.doc_rows, self.doc_cols):
                raise ValueError(f"block {r} lies outside the {self.doc_rows}x{self.doc_cols} document")
        expected = sum(r.area for r in self.blocks)
        if len(self.contents) != expected:
            raise ValueError(f"contents hold {len(self.contents)} bits, blocks cover {expected}")

    def __eq__(self, other):
        if not isinstance(other, Payload):
            return NotImplemented
        return (self.doc_rows, self.doc_cols, self.blocks) == (other.doc_rows, other.doc_cols, other.blocks) \
            and np.array_equal(self.contents, other.contents)


def _check_field(name: str, value: int, maximum: int, bits: int):
    if not 0 <= value <= maximum:
        raise FieldOverflowError(name, value, bits)


def int_to_bits(value: int, width: int) -> np.ndarray:
    shifts = np.arange(width - 1, -1, -1, dtype=np.uint64)
    return ((np.uint64(value) >> shifts) & np.uint64(1)).astype(np.uint8)


def bits_to_int(bits) -> int:
    value = 0
    for b in np.asarray(bits).tolist():
        value = (value << 1) | int(b)
    return value


def as_bit_vector(bits) -> np.ndarray:
    arr = np.asarray(bits, dtype=np.uint8).ravel()
    if np.any(arr > 1):
        raise ValueError("bit vector may only contain 0 and 1")
    return arr


# payload

def payload_from_image(img: np.ndarray, rects: List[Rect]) -> Payload:
    rows, cols = img.shape
    if rects:
        contents = np.concatenate([r.slice_of(img).ravel() for r in rects]).astype(np.uint8)
    else:
        contents = np.zeros(0, dtype=np.uint8)
    return Payload(rows, cols, list(rects), contents)


def paint_payload(p: Payload) -> np.ndarray:
    canvas = np.zeros((p.doc_rows, p.doc_cols), dtype=np.uint8)
    offset = 0
    for r in p.blocks:
        r.slice_of(canvas)[...] = p.contents[offset:offset + r.area].reshape(r.h, r.w)
        offset += r.area
    return canvas


def serialize_payload(p: Payload) -> np.ndarray:
    p.validate()
    parts = [int_to_bits(p.doc_rows, Layout.DIM_BITS),
             int_to_bits(p.doc_cols, Layout.DIM_BITS),
             int_to_bits(p.block_count, Layout.COUNT_BITS)]
    for r in p.blocks:
        parts.extend(int_to_bits(v, Layout.COORD_BITS) for v in (r.x, r.y, r.w, r.h))
    parts.append(as_bit_vector(p.contents))
    return np.concatenate(parts)


def read_payload(read: Callable[[int], np.ndarray]) -> Payload:
    """Parse a payload from a bit source that hands out the next n bits per call."""
    doc_rows = bits_to_int(read(Layout.DIM_BITS))
    doc_cols = bits_to_int(read(Layout.DIM_BITS))
    count = bits_to_int(read(Layout.COUNT_BITS))
    if doc_rows == 0 or doc_cols == 0:
        raise CorruptPayloadError(f"header declares an empty {doc_rows}x{doc_cols} document")

    blocks = []
    for _ in range(count):
        coords = read(Layout.RECT_BITS)
        x, y, w, h = (bits_to_int(coords[i:i + Layout.COORD_BITS])
                      for i in range(0, Layout.RECT_BITS, Layout.COORD_BITS))
        rect = Rect(x, y, w, h)
        if not rect.inside(doc_rows, doc_cols):
            raise CorruptPayloadError(f"block {rect} lies outside the {doc_rows}x{doc_cols} document")
        blocks.append(rect)

    contents = np.array(read(sum(r.area for r in blocks)), dtype=np.uint8)
    return Payload(doc_rows, doc_cols, blocks, contents)


def parse_payload(bits) -> Payload:
    bits = as_bit_vector(bits)
    cursor = 0

    def read(n: int) -> np.ndarray:
        nonlocal cursor
        if cursor + n > len(bits):
            raise CorruptPayloadError(f"stream truncated: need {cursor + n} bits, have {len(bits)}")
        chunk = bits[cursor:cursor + n]
        cursor += n
        return chunk

    return read_payload(read)


# decimal coding

def encode_stream(bits) -> List[Token]:
    """Greedy tokens: length = min(63, leading zeros + 6, remaining bits)."""
    seq = as_bit_vector(bits).tolist()
    n = len(seq)
    ones = np.flatnonzero(np.asarray(seq, dtype=np.uint8)).tolist()
    tokens = []
    pos = 0
    k = 0
    while pos < n:
        while k < len(ones) and ones[k] < pos:
            k += 1
        zeros = (ones[k] if k < len(ones) else n) - pos
        length = min(Layout.MAX_TOKEN_LENGTH, zeros + Layout.FIELD_BITS, n - pos)
        value = 0
        for b in seq[pos + length - min(length, Layout.FIELD_BITS):pos + length]:
            value = (value << 1) | b
        tokens.append(Token(length, value))
        pos += length
    return tokens


def encode_stream_reference(bits) -> List[Token]:
    """Incremental form: grow the prefix bit by bit while its value stays <= 63."""
    seq = as_bit_vector(bits).tolist()
    tokens = []
    pos = 0
    while pos < len(seq):
        length = 0
        value = 0
        while pos + length < len(seq) and length < Layout.MAX_TOKEN_LENGTH:
            grown = (value << 1) | seq[pos + length]
            if grown > Layout.MAX_TOKEN_VALUE:
                break
            value = grown
            length += 1
        tokens.append(Token(length, value))
        pos += length
    return tokens


def decode_stream(tokens: Iterable[Token]) -> np.ndarray:
    tokens = list(tokens)
    for t in tokens:
        if not t.is_valid:
            raise CorruptPayloadError(f"invalid token {t}")
    out = np.zeros(sum(t.length for t in tokens), dtype=np.uint8)
    pos = 0
    for t in tokens:
        pos += t.length
        value = t.value
        i = pos - 1
        while value:
            out[i] = value & 1
            value >>= 1
            i -= 1
    return out


def tokens_to_words(tokens: Iterable[Token]) -> List[int]:
    return [(t.length << Layout.FIELD_BITS) | t.value for t in tokens]


def words_to_tokens(words: Iterable[int]) -> List[Token]:
    return [word_to_token(w) for w in words]


def word_to_token(word: int) -> Token:
    if not 0 <= word < (1 << Layout.WORD_BITS):
        raise ValueError(f"word {word} does not fit in {Layout.WORD_BITS} bits")
    return Token(word >> Layout.FIELD_BITS, word & Layout.MAX_TOKEN_VALUE)


class StreamDecoder:
    """
    Serves bits out of a lazily consumed token stream.

    In strict mode every token followed by another one must be canonical and
    the stream must end exactly where the caller stops reading, both of which
    hold for any output of `encode_stream`.
    """

    def __init__(self, tokens: Iterable[Token], strict: bool = True, max_bits: Optional[int] = None):
        self._tokens = iter(tokens)
        self._strict = strict
        self._max_bits = max_bits
        self._buf = np.zeros(1024, dtype=np.uint8)
        self._size = 0
        self._pos = 0
        self._last: Optional[Token] = None
        self.tokens_read = 0

    @property
    def position(self) -> int:
        return self._pos

    def _pull(self):
        try:
            token = next(self._tokens)
        except StopIteration:
            raise CorruptPayloadError(f"token stream ended after {self._size} bits") from None
        if self._strict and self._last is not None and not self._last.is_canonical:
            raise CorruptPayloadError(f"token {self.tokens_read} {self._last} cannot precede another token")
        bits = token.bits()
        end = self._size + len(bits)
        if end > len(self._buf):
            grown = np.zeros(max(end, 2 * len(self._buf)), dtype=np.uint8)
            grown[:self._size] = self._buf[:self._size]
            self._buf = grown
        self._buf[self._size:end] = bits
        self._size = end
        self._last = token
        self.tokens_read += 1

    def read(self, n: int) -> np.ndarray:
        if self._max_bits is not None and self._pos + n > self._max_bits:
            raise CorruptPayloadError(f"payload needs {self._pos + n} bits, host carries at most {self._max_bits}")
        while self._size - self._pos < n:
            self._pull()
        chunk = self._buf[self._pos:self._pos + n].copy()
        self._pos += n
        return chunk

    def finish(self) -> int:
        residual = self._size - self._pos
        if self._strict and residual:
            raise CorruptPayloadError(f"final token runs {residual} bits past the payload end")
        if residual:
            logger.debug(f"ignoring {residual} residual bits")
        return residual


# codec file framing

def pack_bit_file(bits) -> bytes:
    bits = as_bit_vector(bits)
    return LENGTH_PREFIX.pack(len(bits)) + np.packbits(bits).tobytes()


def unpack_bit_file(data: bytes) -> np.ndarray:
    if len(data) < LENGTH_PREFIX.size:
        raise ValueError("bit file is shorter than its length prefix")
    (n,) = LENGTH_PREFIX.unpack_from(data)
    body = np.frombuffer(data[LENGTH_PREFIX.size:], dtype=np.uint8) if len(data) > LENGTH_PREFIX.size \
        else np.zeros(0, dtype=np.uint8)
    if len(body) * 8 < n:
        raise ValueError(f"bit file declares {n} bits but carries {len(body) * 8}")
    return np.unpackbits(body)[:n]


def words_to_bits(words: Iterable[int]) -> np.ndarray:
    words = list(words)
    if not words:
        return np.zeros(0, dtype=np.uint8)
    return np.concatenate([int_to_bits(w, Layout.WORD_BITS) for w in words])


def bits_to_words(bits) -> List[int]:
    bits = as_bit_vector(bits)
    if len(bits) % Layout.WORD_BITS:
        raise ValueError(f"{len(bits)} bits is not a whole number of {Layout.WORD_BITS}-bit words")
    return [bits_to_int(bits[i:i + Layout.WORD_BITS]) for i in range(0, len(bits), Layout.WORD_BITS)]
