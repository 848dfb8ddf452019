"""Binary snapshots of static, dynamic and jumbled structures.

Layout (little-endian, integers are u64 unless noted)::

    "DBGF"  version:u16  mode:u8  flags:u8
    length  head_crc    total file size; CRC-64/XZ of the 16 bytes before it
    k  sigma  n  e  m  p  r  seed
    alphabet            sigma bytes (latin-1)
    index section       mode-tagged, see _write_index
    bit payload         IN then OUT (m*sigma bits each), or SWAP (m*sigma^2 bits)
    parent specs        m records of 1/2/3 bytes
    root samples        count, then (slot, packed key) records
    crc64               CRC-64/XZ of every preceding byte

Loading checks the magic and the version, then the self-checked length
field: a file shorter than it says is Truncated, any other damage is a
ChecksumMismatch. Only then is the structure parsed.
"""
from __future__ import annotations

import io
import os
import struct
from dataclasses import dataclass
from typing import BinaryIO, Union

import numpy as np

from . import kernels
from .adjacency import AdjacencyMatrices, pack_bit_rows, payload_bytes, unpack_bit_rows
from .errors import BadMagic, ChecksumMismatch, SnapshotError, Truncated, VersionMismatch
from .fingerprint import KrParams
from .forest import Forest, ForestParams
from .graph import DeBruijnGraph
from .jumbled import JumbledIndex
from .kmer import Alphabet
from .node_index import DynamicIndex, StaticIndex

MAGIC = b"DBGF"
VERSION = 1
MODE_STATIC, MODE_DYNAMIC, MODE_JUMBLED = 0, 1, 2
FLAG_FP_CHECK = 1
_ENVELOPE = 24  # magic, version, mode, flags, length, head_crc

PathOrFile = Union[str, os.PathLike, BinaryIO]


@dataclass
class Layout:
    """Byte sizes of the snapshot sections (for space accounting)."""
    header: int = 0
    alphabet: int = 0
    index: int = 0
    bits: int = 0
    specs: int = 0
    samples: int = 0
    sample_count: int = 0
    crc: int = 8
    total: int = 0


def spec_width(sigma: int, jumbled: bool) -> int:
    if jumbled:
        return 2 if sigma <= 64 else 3
    return 1 if sigma <= 64 else 2


def key_width(k: int, sigma: int, jumbled: bool) -> int:
    if jumbled:
        per = 1 if k < 256 else 2 if k < 65536 else 4
        return per * sigma
    lam = max(1, (sigma - 1).bit_length())
    return -(-(k * lam) // 8)


def _u64s(*xs) -> bytes:
    return struct.pack(f"<{len(xs)}Q", *[int(x) & 0xFFFFFFFFFFFFFFFF for x in xs])


def _arr(a) -> bytes:
    return np.ascontiguousarray(a, dtype="<u8").tobytes()


def _pack_specs(forest: Forest, sigma: int) -> bytes:
    tags = forest.tags.astype(np.uint32)
    syms = forest.syms.astype(np.uint32)
    if forest.jumbled:
        s2 = forest.syms2.astype(np.uint32)
        if sigma <= 64:
            return ((tags << 12) | (syms << 6) | s2).astype("<u2").tobytes()
        v = (tags << 16) | (syms << 8) | s2
        return np.stack([v & 0xFF, (v >> 8) & 0xFF, v >> 16], axis=1).astype(np.uint8).tobytes()
    if sigma <= 64:
        return ((tags << 6) | syms).astype(np.uint8).tobytes()
    return ((tags << 14) | syms).astype("<u2").tobytes()


def _unpack_specs(raw: bytes, m: int, sigma: int, forest: Forest) -> None:
    if forest.jumbled:
        if sigma <= 64:
            v = np.frombuffer(raw, dtype="<u2").astype(np.uint32)
            forest.tags[:], forest.syms[:], forest.syms2[:] = v >> 12, (v >> 6) & 63, v & 63
        else:
            b = np.frombuffer(raw, dtype=np.uint8).reshape(m, 3).astype(np.uint32)
            forest.tags[:], forest.syms[:], forest.syms2[:] = b[:, 2], b[:, 1], b[:, 0]
    elif sigma <= 64:
        v = np.frombuffer(raw, dtype=np.uint8)
        forest.tags[:], forest.syms[:] = v >> 6, v & 63
    else:
        v = np.frombuffer(raw, dtype="<u2")
        forest.tags[:], forest.syms[:] = v >> 14, v & 0x3FFF


def _pack_key(key, k: int, sigma: int, jumbled: bool) -> bytes:
    if jumbled:
        per = key_width(k, sigma, True) // sigma
        return b"".join(int(c).to_bytes(per, "little") for c in key)
    return int(key).to_bytes(key_width(k, sigma, False), "little")


def _unpack_key(raw: bytes, k: int, sigma: int, jumbled: bool):
    if jumbled:
        per = len(raw) // sigma
        return tuple(int.from_bytes(raw[i * per : (i + 1) * per], "little") for i in range(sigma))
    return int.from_bytes(raw, "little")


def _write_index(index) -> bytes:
    if isinstance(index, DynamicIndex):
        items = index.items_by_slot()
        flat = [x for f, s in items for x in (f, s)]
        return _u64s(index.m, len(items)) + _u64s(*flat)
    parts = [_u64s(index.seeds.size, index.bits.size, index.fb_keys.size, index.seed0),
             _arr(index.seeds), _arr(index.nbits), _arr(index.word_off), _arr(index.bits),
             _arr(index.fb_keys), _arr(index.fb_slots)]
    if index.fingerprint_check is not None:
        parts.append(_arr(index.fingerprint_check))
    return b"".join(parts)


def serialize(obj, with_layout: bool = False):
    """Snapshot bytes of a DeBruijnGraph or JumbledIndex."""
    jumbled = isinstance(obj, JumbledIndex)
    if jumbled:
        mode = MODE_JUMBLED
    else:
        mode = MODE_DYNAMIC if obj.dynamic else MODE_STATIC
    sigma = obj.alphabet.sigma
    flags = FLAG_FP_CHECK if getattr(obj.index, "fingerprint_check", None) is not None else 0
    lay = Layout()
    out = io.BytesIO()
    out.write(MAGIC + struct.pack("<HBB", VERSION, mode, flags))
    out.write(_u64s(0, 0))  # length and head_crc, patched below
    out.write(_u64s(obj.k, sigma, obj.n, obj.e, obj.m, obj.params.p, obj.params.r, obj.seed))
    lay.header = out.tell()
    out.write(obj.alphabet.symbols.encode("latin-1"))
    lay.alphabet = sigma
    blob = _write_index(obj.index)
    out.write(blob)
    lay.index = len(blob)
    if jumbled:
        blob = pack_bit_rows([obj.swap_bits], sigma * sigma)
    else:
        blob = obj.adj.pack()
    out.write(blob)
    lay.bits = len(blob)
    blob = _pack_specs(obj.forest, sigma)
    out.write(blob)
    lay.specs = len(blob)
    samples = sorted(obj.forest.samples.items())
    start = out.tell()
    out.write(_u64s(len(samples)))
    for slot, key in samples:
        out.write(_u64s(slot) + _pack_key(key, obj.k, sigma, jumbled))
    lay.samples = out.tell() - start
    lay.sample_count = len(samples)
    body = bytearray(out.getvalue())
    body[8:16] = _u64s(len(body) + 8)
    body[16:24] = _u64s(kernels.crc64(bytes(body[:16])))
    data = bytes(body)
    data += _u64s(kernels.crc64(data))
    lay.total = len(data)
    return (data, lay) if with_layout else data


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if n < 0 or self.pos + n > len(self.data) - 8:
            raise Truncated(f"snapshot ends early (need {n} bytes at offset {self.pos})")
        b = self.data[self.pos : self.pos + n]
        self.pos += n
        return b

    def u64(self, count: int = 1):
        vals = struct.unpack(f"<{count}Q", self.take(8 * count))
        return vals[0] if count == 1 else vals

    def arr(self, count: int) -> np.ndarray:
        if count > len(self.data):
            raise Truncated("array length exceeds file size")
        return np.frombuffer(self.take(8 * count), dtype="<u8").astype(np.uint64)


def _crc_ok(data: bytes) -> bool:
    return len(data) >= 8 and kernels.crc64(data[:-8]) == struct.unpack("<Q", data[-8:])[0]


def _check_envelope(data: bytes) -> None:
    """Decide Truncated vs. corrupted before trusting any length inside the file."""
    if len(data) < 4 or data[:4] != MAGIC:
        if len(data) < 4 and MAGIC.startswith(data):
            raise Truncated("snapshot shorter than its magic")
        raise BadMagic("not a DBGF snapshot")
    if len(data) < 8:
        raise Truncated("snapshot shorter than its version field")
    (version,) = struct.unpack("<H", data[4:6])
    if version != VERSION:
        raise VersionMismatch(f"snapshot version {version}, expected {VERSION}")
    if len(data) < _ENVELOPE:
        raise Truncated("snapshot shorter than its length field")
    length, head_crc = struct.unpack("<2Q", data[8:24])
    if kernels.crc64(data[:16]) != head_crc:
        raise ChecksumMismatch("header checksum does not match")
    if len(data) < length:
        raise Truncated(f"snapshot has {len(data)} of {length} bytes")
    if len(data) > length:
        raise ChecksumMismatch(f"{len(data) - length} unexpected trailing bytes")
    if not _crc_ok(data):
        raise ChecksumMismatch("CRC-64 does not match snapshot contents")


def deserialize(data: bytes):
    """Parse snapshot bytes back into a graph or jumbled index."""
    _check_envelope(data)
    try:
        return _deserialize(data)
    except SnapshotError:
        raise
    except (ValueError, KeyError, IndexError, OverflowError, struct.error) as exc:
        # checksums held, so the writer produced something inconsistent
        raise SnapshotError(f"malformed snapshot: {exc}") from exc


def _deserialize(data: bytes):
    _, mode, flags = struct.unpack("<HBB", data[4:8])
    if mode not in (MODE_STATIC, MODE_DYNAMIC, MODE_JUMBLED):
        raise SnapshotError(f"unknown mode {mode}")
    if len(data) < _ENVELOPE + 64 + 8:
        raise Truncated("snapshot shorter than its header")
    rd = _Reader(data)
    rd.pos = _ENVELOPE
    k, sigma, n, e, m, p, r, seed = rd.u64(8)
    if not (1 <= sigma <= 256 and 1 <= k and m < len(data) * 8 + 2):
        raise ValueError("header fields out of range")
    alphabet = Alphabet(rd.take(sigma).decode("latin-1"))
    jumbled = mode == MODE_JUMBLED
    if mode == MODE_DYNAMIC:
        cap, count = rd.u64(2)
        pairs = rd.arr(2 * count).reshape(-1, 2) if count else np.zeros((0, 2), np.uint64)
        index = DynamicIndex(cap)
        index.table = {int(f): int(s) for f, s in pairs.tolist()}
        used = set(index.table.values())
        index._free = [s for s in range(cap) if s not in used]
    else:
        nlev, nwords, nfb, seed0 = rd.u64(4)
        seeds, nbits, woff = rd.arr(nlev), rd.arr(nlev), rd.arr(nlev)
        bits, fb_keys, fb_slots = rd.arr(nwords), rd.arr(nfb), rd.arr(nfb)
        fc = rd.arr(n) if flags & FLAG_FP_CHECK else None
        pc = kernels._np.popcount64(bits).astype(np.int64)
        rank = np.concatenate(([0], np.cumsum(pc)[:-1])) if bits.size else np.zeros(0, np.int64)
        index = StaticIndex(n, bits, woff.astype(np.int64), nbits, seeds, rank, fb_keys,
                            fb_slots.astype(np.int64), seed0, fingerprint_check=fc)
    if jumbled:
        raw_bits = rd.take(payload_bytes(1, m, sigma * sigma))
    else:
        raw_bits = rd.take(payload_bytes(2, m, sigma))
    raw_specs = rd.take(m * spec_width(sigma, jumbled))
    n_samples = rd.u64()
    kw = key_width(k, sigma, jumbled)
    if n_samples > len(data):
        raise Truncated("sample count exceeds file size")
    samples = {}
    for _ in range(n_samples):
        slot = rd.u64()
        samples[int(slot)] = _unpack_key(rd.take(kw), k, sigma, jumbled)
    if rd.pos != len(data) - 8:
        raise SnapshotError(f"{len(data) - 8 - rd.pos} unparsed bytes before the checksum")

    params = KrParams(k=k, sigma=sigma, r=r, p=p, seed=seed)
    fparams = ForestParams(k, alphabet.lam)
    forest = Forest(m, fparams, jumbled=jumbled)
    _unpack_specs(raw_specs, m, sigma, forest)
    forest.samples = samples
    if jumbled:
        (swap,) = unpack_bit_rows(raw_bits, 1, m, sigma * sigma)
        return JumbledIndex(alphabet, k, params, index, forest, swap, n, e, seed=seed)
    adj = AdjacencyMatrices.unpack(raw_bits, m, sigma)
    return DeBruijnGraph(alphabet, k, params, index, adj, forest, n, e, seed=seed)


def save_snapshot(obj, sink: PathOrFile) -> int:
    data = serialize(obj)
    if hasattr(sink, "write"):
        sink.write(data)
    else:
        with open(sink, "wb") as fh:
            fh.write(data)
    return len(data)


def load_snapshot(source: PathOrFile):
    if hasattr(source, "read"):
        data = source.read()
    else:
        with open(source, "rb") as fh:
            data = fh.read()
    return deserialize(bytes(data))
