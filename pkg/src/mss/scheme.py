"""Dealer and reconstruction orchestration plus the on-disk artifact formats.

A secret of any length is split into fixed-size chunks, one symbol per chunk.
Per chunk the secret symbol sits at data position 0, positions 1..k-1 are
drawn fresh from the randomness source (participant-major, so a counting
source sees exactly (k-1) * chunk_count symbols; (p-2) * chunk_count for
GRDP, whose last participant holds the derived horizontal column), and the
backend computes the parity symbols.  Shares go to participants; parities are
public.

Artifacts share a fixed 30-byte little-endian header:

    magic "MSS1" | version | backend | param (m or p) | k | r | lane_bytes |
    chunk_count | secret_len | payload_crc32

A share file is header || participant_index (2 bytes LE) || payload; the
public parity file is header || 0xFFFF || concatenated parity streams.  The
CRC covers the artifact's own payload and is an integrity check only, not an
authenticity mechanism.

Bulk processing: RS streams are vectorized with numpy lookup tables; for the
array backends all chunks are packed into wide integer lanes so one ring
operation processes the entire payload (every ring operation acts per bit
plane, which makes the packing exact, not an approximation).
"""

from __future__ import annotations

import hashlib
import os
import struct
import zlib
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import codes
from .codes import Backend, CodeParams
from .errors import (
    BadConfig,
    BadMagic,
    CrcMismatch,
    HeaderMismatch,
    NotEnoughShares,
    ParamMismatch,
    RandomnessExhausted,
    Truncated,
    UnsupportedVersion,
)
from .gf2m import DEFAULT_POLYNOMIALS, FieldTable, field_inv, field_new
from .ring_mp import RingElement, RingParams

MAGIC = b"MSS1"
VERSION = 1
PARITY_MARKER = 0xFFFF

_HEADER = struct.Struct("<4sBBHHHHIQI")
HEADER_LEN = _HEADER.size  # 30 bytes

_BACKEND_TO_BYTE = {Backend.RS: 0, Backend.EVENODD: 1, Backend.GRDP: 2}
_BYTE_TO_BACKEND = {v: k for k, v in _BACKEND_TO_BYTE.items()}


@lru_cache(maxsize=None)
def _cached_field(m: int, poly: int) -> FieldTable:
    return field_new(m, poly)


# -- header -------------------------------------------------------------------

@dataclass(frozen=True)
class SharePackage:
    """Parsed artifact header binding shares and parities of one secret."""

    backend: Backend
    param: int          # m for RS, p for the array backends
    k: int
    r: int
    lane_bytes: int     # 0 for RS
    chunk_count: int
    secret_len: int
    payload_crc32: int

    def pack(self) -> bytes:
        return _HEADER.pack(
            MAGIC, VERSION, _BACKEND_TO_BYTE[self.backend], self.param,
            self.k, self.r, self.lane_bytes, self.chunk_count,
            self.secret_len, self.payload_crc32)

    @classmethod
    def unpack(cls, data: bytes) -> "SharePackage":
        if len(data) < HEADER_LEN:
            raise Truncated(f"header needs {HEADER_LEN} bytes, got {len(data)}")
        magic, version, backend_byte, param, k, r, lane_bytes, chunk_count, \
            secret_len, crc = _HEADER.unpack(data[:HEADER_LEN])
        if magic != MAGIC:
            raise BadMagic(f"bad magic {magic!r}")
        if version != VERSION:
            raise UnsupportedVersion(f"unsupported version {version}")
        backend = _BYTE_TO_BACKEND.get(backend_byte)
        if backend is None:
            raise UnsupportedVersion(f"unknown backend byte {backend_byte:#x}")
        hdr = cls(backend, param, k, r, lane_bytes, chunk_count, secret_len, crc)
        if not 1 <= r < k:
            raise ParamMismatch(f"header has k={k} r={r}")
        if secret_len > chunk_count * hdr.symbol_bytes:
            raise ParamMismatch("secret_len exceeds the payload capacity")
        return hdr

    def identity(self) -> tuple:
        """Header fields that must agree across artifacts of one package."""
        return (self.backend, self.param, self.k, self.r, self.lane_bytes,
                self.chunk_count, self.secret_len)

    @property
    def symbol_bytes(self) -> int:
        if self.backend is Backend.RS:
            return (self.param + 7) // 8
        return (self.param - 1) * self.lane_bytes

    @property
    def payload_bytes(self) -> int:
        return self.chunk_count * self.symbol_bytes

    @property
    def parity_stream_count(self) -> int:
        # GRDP's horizontal parity travels as a share, not a public stream.
        return self.r - 1 if self.backend is Backend.GRDP else self.r

    @property
    def threshold(self) -> int:
        return self.k - self.r


@dataclass(frozen=True)
class Share:
    """One participant's artifact."""

    header: SharePackage
    index: int
    payload: bytes


@dataclass(frozen=True)
class PublicParities:
    """The publicly known parity streams of one package."""

    header: SharePackage
    streams: tuple[bytes, ...]


# -- configuration --------------------------------------------------------------

@dataclass(frozen=True)
class SchemeConfig:
    """Dealer-side parameters: n participants, threshold t, backend algebra.

    Derived geometry: k = participants + 1 data symbols (secret at position 0)
    and r = k - threshold parities.
    """

    backend: Backend
    participants: int
    threshold: int
    field_bits: int = 8
    primitive_poly: int | None = None
    prime: int = 13
    lane_bytes: int = 8

    def __post_init__(self) -> None:
        if self.participants < 1:
            raise BadConfig("need at least one participant")
        if self.participants > 0xFFFE:
            raise BadConfig("participant count does not fit the wire format")
        if not 1 <= self.threshold <= self.participants:
            raise BadConfig(
                f"threshold {self.threshold} outside 1..{self.participants}")
        try:
            self.code_params()
        except (ParamMismatch, ValueError) as exc:
            raise BadConfig(str(exc)) from exc

    @property
    def k(self) -> int:
        return self.participants + 1

    @property
    def r(self) -> int:
        return self.k - self.threshold

    def field_table(self) -> FieldTable:
        poly = self.primitive_poly
        if poly is None:
            poly = DEFAULT_POLYNOMIALS.get(self.field_bits)
            if poly is None:
                raise BadConfig(f"no default polynomial for m={self.field_bits}")
        return _cached_field(self.field_bits, poly)

    def code_params(self) -> CodeParams:
        if self.backend is Backend.RS:
            return CodeParams(self.backend, self.k, self.r, self.field_table())
        return CodeParams(self.backend, self.k, self.r,
                          RingParams(self.prime, self.lane_bytes))

    @property
    def symbol_bytes(self) -> int:
        if self.backend is Backend.RS:
            return (self.field_bits + 7) // 8
        return (self.prime - 1) * self.lane_bytes

    def chunk_count(self, secret_len: int) -> int:
        if self.backend is Backend.RS:
            return -(-8 * secret_len // self.field_bits)
        return -(-secret_len // self.symbol_bytes)


# -- randomness ------------------------------------------------------------------

class RandomnessSource:
    """Supplier of the dealer's random symbols.

    read_symbols(n, symbol_bytes) must return exactly n * symbol_bytes bytes
    of independent uniform randomness.  Production callers must use a
    cryptographically secure source; deterministic sources exist for tests
    and explicitly insecure reproducible runs.
    """

    def read_symbols(self, n: int, symbol_bytes: int) -> bytes:
        raise NotImplementedError


class SystemRandomness(RandomnessSource):
    def read_symbols(self, n: int, symbol_bytes: int) -> bytes:
        return os.urandom(n * symbol_bytes)


class SeededRandomness(RandomnessSource):
    """Deterministic blake2b counter stream expanded from a seed."""

    def __init__(self, seed: bytes):
        self._seed = bytes(seed)
        self._counter = 0
        self._buf = b""

    def read_symbols(self, n: int, symbol_bytes: int) -> bytes:
        need = n * symbol_bytes
        parts = [self._buf]
        have = len(self._buf)
        while have < need:
            block = hashlib.blake2b(
                self._seed + self._counter.to_bytes(8, "little")).digest()
            self._counter += 1
            parts.append(block)
            have += len(block)
        buf = b"".join(parts)
        self._buf = buf[need:]
        return buf[:need]


def _draw(source: RandomnessSource, n: int, symbol_bytes: int) -> bytes:
    buf = source.read_symbols(n, symbol_bytes)
    if len(buf) != n * symbol_bytes:
        raise RandomnessExhausted(
            f"asked for {n}x{symbol_bytes} bytes, got {len(buf)}")
    return buf


# -- RS symbol/byte plumbing ------------------------------------------------------

def _np_dtype(m: int):
    return np.uint8 if m <= 8 else np.dtype("<u2")


def _bytes_to_symbols(data: bytes, m: int) -> np.ndarray:
    """Secret bytes as a stream of m-bit symbols (LSB-first bit order)."""
    if m == 8:
        return np.frombuffer(data, np.uint8).copy()
    if m == 16:
        if len(data) % 2:
            data = data + b"\0"
        return np.frombuffer(data, "<u2").copy()
    out = []
    acc = nbits = 0
    mask = (1 << m) - 1
    for byte in data:
        acc |= byte << nbits
        nbits += 8
        while nbits >= m:
            out.append(acc & mask)
            acc >>= m
            nbits -= m
    if nbits:
        out.append(acc & mask)
    return np.array(out, dtype=_np_dtype(m))


def _symbols_to_bytes(symbols: np.ndarray, m: int, out_len: int) -> bytes:
    if m == 8:
        return symbols.astype(np.uint8).tobytes()[:out_len]
    if m == 16:
        return symbols.astype("<u2").tobytes()[:out_len]
    acc = nbits = 0
    out = bytearray()
    for s in symbols:
        acc |= int(s) << nbits
        nbits += m
        while nbits >= 8:
            out.append(acc & 0xFF)
            acc >>= 8
            nbits -= 8
    if nbits:
        out.append(acc & 0xFF)
    return bytes(out[:out_len])


def _symbols_to_wire(arr: np.ndarray, m: int) -> bytes:
    return arr.astype(_np_dtype(m)).tobytes()


def _wire_to_symbols(data: bytes, m: int, count: int) -> np.ndarray:
    sb = (m + 7) // 8
    if len(data) != count * sb:
        raise Truncated(f"expected {count * sb} payload bytes, got {len(data)}")
    arr = np.frombuffer(data, _np_dtype(m))
    if m % 8 and arr.size and int(arr.max()) >= (1 << m):
        raise ParamMismatch("payload symbol exceeds the field size")
    return arr


class _RsTables:
    """numpy views of the field tables plus per-constant multiply LUTs."""

    def __init__(self, table: FieldTable):
        self.table = table
        self.q = table.q
        self.dtype = _np_dtype(table.m)
        self._log = np.array(table.log, dtype=np.int64)
        self._alog = np.array(table.antilog, dtype=np.int64)
        self._luts: dict[int, np.ndarray] = {}

    def mul(self, arr: np.ndarray, c: int) -> np.ndarray:
        lut = self._luts.get(c)
        if lut is None:
            if c == 0:
                lut = np.zeros(self.q, dtype=self.dtype)
            else:
                idx = (self._log[1:] + self.table.log[c]) % (self.q - 1)
                lut = np.concatenate(
                    ([0], self._alog[idx])).astype(self.dtype)
            self._luts[c] = lut
        return lut[arr]


# -- wide-lane packing for the array backends --------------------------------------

def _pack_wide(data: bytes, p: int, lane_bytes: int, chunks: int) -> RingElement:
    """Columns of every chunk stacked into one p-lane element with wide lanes."""
    total = chunks * (p - 1) * lane_bytes
    if len(data) < total:
        data = data + b"\0" * (total - len(data))
    arr = np.frombuffer(data[:total], np.uint8).reshape(chunks, p - 1, lane_bytes)
    lanes = [
        int.from_bytes(arr[:, i, :].tobytes(), "little") for i in range(p - 1)]
    return tuple(lanes) + (0,)


def _unpack_wide(elem: RingElement, p: int, lane_bytes: int, chunks: int) -> bytes:
    out = np.empty((chunks, p - 1, lane_bytes), np.uint8)
    width = chunks * lane_bytes
    for i in range(p - 1):
        out[:, i, :] = np.frombuffer(
            elem[i].to_bytes(width, "little"), np.uint8).reshape(chunks, lane_bytes)
    return out.tobytes()


# -- deal ---------------------------------------------------------------------------

def deal(cfg: SchemeConfig, secret: bytes,
         randomness: RandomnessSource | None = None
         ) -> tuple[list[Share], PublicParities]:
    """Split ``secret`` into participant shares plus the public parities."""
    source = randomness if randomness is not None else SystemRandomness()
    if cfg.backend is Backend.RS:
        payloads, streams, chunk_count = _deal_rs(cfg, secret, source)
        param, lane_bytes = cfg.field_bits, 0
    else:
        payloads, streams, chunk_count = _deal_ring(cfg, secret, source)
        param, lane_bytes = cfg.prime, cfg.lane_bytes
    base = SharePackage(cfg.backend, param, cfg.k, cfg.r, lane_bytes,
                        chunk_count, len(secret), 0)
    shares = [
        Share(replace(base, payload_crc32=zlib.crc32(payload)), index, payload)
        for index, payload in payloads
    ]
    public = PublicParities(
        replace(base, payload_crc32=zlib.crc32(b"".join(streams))),
        tuple(streams))
    return shares, public


def _deal_rs(cfg: SchemeConfig, secret: bytes, source: RandomnessSource):
    table = cfg.field_table()
    m = cfg.field_bits
    sb = cfg.symbol_bytes
    mask = (1 << m) - 1
    data = [_bytes_to_symbols(secret, m)]
    chunks = len(data[0])
    for _ in range(1, cfg.k):
        raw = _draw(source, chunks, sb)
        arr = np.frombuffer(raw, _np_dtype(m)).copy()
        arr &= mask
        data.append(arr)
    tabs = _RsTables(table)
    streams = []
    for u in range(cfg.r):
        acc = np.zeros(chunks, dtype=tabs.dtype)
        for j in range(cfg.k):
            acc ^= tabs.mul(data[j], table.alpha_pow(u * j))
        streams.append(_symbols_to_wire(acc, m))
    payloads = [(j, _symbols_to_wire(data[j], m)) for j in range(1, cfg.k)]
    return payloads, streams, chunks


def _deal_ring(cfg: SchemeConfig, secret: bytes, source: RandomnessSource):
    p, w = cfg.prime, cfg.lane_bytes
    sb = cfg.symbol_bytes
    chunks = cfg.chunk_count(len(secret))
    n_random = cfg.k - 1 if cfg.backend is Backend.EVENODD else p - 2
    if chunks == 0:
        empty = [(j, b"") for j in range(1, cfg.k)]
        return empty, [b""] * (cfg.r if cfg.backend is Backend.EVENODD else cfg.r - 1), 0
    cols = [_pack_wide(secret, p, w, chunks)]
    for _ in range(n_random):
        cols.append(_pack_wide(_draw(source, chunks, sb), p, w, chunks))
    wide = CodeParams(cfg.backend, cfg.k, cfg.r, RingParams(p, w * chunks))
    if cfg.backend is Backend.EVENODD:
        parities = codes.encode_parities_evenodd(wide, cols)
        share_cols = {j: cols[j] for j in range(1, cfg.k)}
        streams = [_unpack_wide(e, p, w, chunks) for e in parities]
    else:
        horizontal, slopes = codes.encode_grdp(wide, cols)
        share_cols = {j: cols[j] for j in range(1, p - 1)}
        share_cols[p - 1] = horizontal
        streams = [_unpack_wide(e, p, w, chunks) for e in slopes]
    payloads = [
        (j, _unpack_wide(share_cols[j], p, w, chunks)) for j in sorted(share_cols)]
    return payloads, streams, chunks


# -- reconstruct ---------------------------------------------------------------------

def reconstruct(header: SharePackage, shares: Sequence[Share],
                public: PublicParities,
                primitive_poly: int | None = None) -> bytes:
    """Recover the secret from at least threshold-many shares plus the parities.

    When more shares than the threshold are supplied, the lowest participant
    indices are used.  ``primitive_poly`` overrides the default RS polynomial
    for packages dealt with a custom field (the header does not record it).
    """
    want = header.identity()
    if public.header.identity() != want:
        raise HeaderMismatch("public parities belong to a different package")
    for share in shares:
        if share.header.identity() != want:
            raise HeaderMismatch(
                f"share {share.index} belongs to a different package")
    indices = [s.index for s in shares]
    if len(set(indices)) != len(indices):
        raise HeaderMismatch("duplicate participant index in the share set")
    for share in shares:
        if not 1 <= share.index <= header.k - 1:
            raise ParamMismatch(f"participant index {share.index} out of range")
        if len(share.payload) != header.payload_bytes:
            raise Truncated(f"share {share.index} payload has the wrong length")
        if zlib.crc32(share.payload) != share.header.payload_crc32:
            raise CrcMismatch(f"share {share.index} payload checksum mismatch")
    if len(public.streams) != header.parity_stream_count:
        raise ParamMismatch("wrong number of public parity streams")
    for stream in public.streams:
        if len(stream) != header.payload_bytes:
            raise Truncated("parity stream has the wrong length")
    if zlib.crc32(b"".join(public.streams)) != public.header.payload_crc32:
        raise CrcMismatch("public parity checksum mismatch")
    t = header.threshold
    if len(shares) < t:
        raise NotEnoughShares(
            f"got {len(shares)} shares, threshold is {t}")
    by_index = {s.index: s for s in shares}
    selected = sorted(by_index)[:t]
    if header.chunk_count == 0:
        return b""
    if header.backend is Backend.RS:
        return _reconstruct_rs(header, by_index, selected, public, primitive_poly)
    return _reconstruct_ring(header, by_index, selected, public)


def _reconstruct_rs(header: SharePackage, by_index, selected, public,
                    primitive_poly):
    m = header.param
    poly = primitive_poly if primitive_poly is not None else DEFAULT_POLYNOMIALS[m]
    table = _cached_field(m, poly)
    k, r = header.k, header.r
    cp = CodeParams(Backend.RS, k, r, table)
    present = {
        j: _wire_to_symbols(by_index[j].payload, m, header.chunk_count)
        for j in selected}
    parities = [
        _wire_to_symbols(s, m, header.chunk_count) for s in public.streams]
    erased = [j for j in range(1, k) if j not in selected]
    loc = codes.erasure_locator(cp, erased)
    tabs = _RsTables(table)
    syndromes = []
    for u in range(r):
        acc = parities[u].copy()
        for j in selected:
            acc ^= tabs.mul(present[j], table.alpha_pow(u * j))
        syndromes.append(acc)
    num = np.zeros(header.chunk_count, dtype=tabs.dtype)
    for u in range(r):
        num ^= tabs.mul(syndromes[u], loc.g[r - 1 - u])
    den = 0
    for g in loc.g:
        den ^= g
    secret_syms = tabs.mul(num, field_inv(table, den))
    return _symbols_to_bytes(secret_syms, m, header.secret_len)


def _reconstruct_ring(header: SharePackage, by_index, selected, public):
    p, w = header.param, header.lane_bytes
    chunks = header.chunk_count
    wide = CodeParams(header.backend, header.k, header.r,
                      RingParams(p, w * chunks))
    present = {
        j: _pack_wide(by_index[j].payload, p, w, chunks) for j in selected}
    streams = [_pack_wide(s, p, w, chunks) for s in public.streams]
    if header.backend is Backend.EVENODD:
        erased = [j for j in range(1, header.k) if j not in present]
        syndromes = codes.compute_syndromes(wide, present, streams)
        loc = codes.erasure_locator(wide, erased)
        secret_col = codes.recover_secret_ring(wide, syndromes, loc)
    else:
        secret_col = codes.grdp_recover(wide, present, streams)[0]
    return _unpack_wide(secret_col, p, w, chunks)[:header.secret_len]


# -- serialization --------------------------------------------------------------------

def serialize_share(share: Share) -> bytes:
    return share.header.pack() + struct.pack("<H", share.index) + share.payload


def parse_share(data: bytes) -> Share:
    header = SharePackage.unpack(data)
    if len(data) < HEADER_LEN + 2:
        raise Truncated("share file ends before the participant index")
    (index,) = struct.unpack_from("<H", data, HEADER_LEN)
    if index == PARITY_MARKER:
        raise ParamMismatch("artifact is a parity file, not a share")
    if not 1 <= index <= header.k - 1:
        raise ParamMismatch(f"participant index {index} out of range")
    payload = data[HEADER_LEN + 2:]
    if len(payload) != header.payload_bytes:
        raise Truncated(
            f"payload is {len(payload)} bytes, header promises {header.payload_bytes}")
    if zlib.crc32(payload) != header.payload_crc32:
        raise CrcMismatch("share payload checksum mismatch")
    if header.backend is Backend.RS and header.param % 8:
        _wire_to_symbols(payload, header.param, header.chunk_count)
    return Share(header, index, payload)


def serialize_parities(public: PublicParities) -> bytes:
    return (public.header.pack() + struct.pack("<H", PARITY_MARKER)
            + b"".join(public.streams))


def parse_parities(data: bytes) -> PublicParities:
    header = SharePackage.unpack(data)
    if len(data) < HEADER_LEN + 2:
        raise Truncated("parity file ends before the stream marker")
    (marker,) = struct.unpack_from("<H", data, HEADER_LEN)
    if marker != PARITY_MARKER:
        raise ParamMismatch("artifact is a share, not a parity file")
    payload = data[HEADER_LEN + 2:]
    n = header.parity_stream_count
    expected = n * header.payload_bytes
    if len(payload) != expected:
        raise Truncated(
            f"parity payload is {len(payload)} bytes, header promises {expected}")
    if zlib.crc32(payload) != header.payload_crc32:
        raise CrcMismatch("parity payload checksum mismatch")
    size = header.payload_bytes
    streams = tuple(payload[i * size:(i + 1) * size] for i in range(n))
    return PublicParities(header, streams)
