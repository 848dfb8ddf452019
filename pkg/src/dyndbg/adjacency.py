"""IN/OUT bit matrices: one row of sigma bits per slot and direction.

For an edge ``bX -> Xa`` with ``i = slot(bX)`` and ``j = slot(Xa)`` the edge
is recorded as ``OUT[i][a]`` and ``IN[j][b]``; it is *confirmed* only when both
bits are set. Rows are packed into 64-bit words.
"""
from __future__ import annotations

import numpy as np

from .errors import DbgError


class IndexOutOfRange(DbgError, IndexError):
    pass


class AdjacencyMatrices:
    def __init__(self, m: int, sigma: int):
        self.m = m
        self.sigma = sigma
        self.row_words = -(-sigma // 64)
        self.in_bits = np.zeros((m, self.row_words), dtype=np.uint64)
        self.out_bits = np.zeros((m, self.row_words), dtype=np.uint64)

    def _check(self, slot: int, sym: int) -> None:
        if not (0 <= slot < self.m and 0 <= sym < self.sigma):
            raise IndexOutOfRange(f"(slot={slot}, symbol={sym}) outside {self.m}x{self.sigma}")

    @staticmethod
    def _get(mat, slot, sym) -> bool:
        return bool((int(mat[slot, sym >> 6]) >> (sym & 63)) & 1)

    @staticmethod
    def _put(mat, slot, sym, on: bool) -> None:
        bit = np.uint64(1 << (sym & 63))
        if on:
            mat[slot, sym >> 6] |= bit
        else:
            mat[slot, sym >> 6] &= ~bit

    def out_bit(self, slot: int, sym: int) -> bool:
        return self._get(self.out_bits, slot, sym)

    def in_bit(self, slot: int, sym: int) -> bool:
        return self._get(self.in_bits, slot, sym)

    def set_edge_bits(self, i: int, a: int, j: int, b: int) -> None:
        self._check(i, a)
        self._check(j, b)
        self._put(self.out_bits, i, a, True)
        self._put(self.in_bits, j, b, True)

    def clear_edge_bits(self, i: int, a: int, j: int, b: int) -> None:
        self._check(i, a)
        self._check(j, b)
        self._put(self.out_bits, i, a, False)
        self._put(self.in_bits, j, b, False)

    def confirmed(self, i: int, a: int, j: int, b: int) -> bool:
        if not (0 <= i < self.m and 0 <= j < self.m):
            return False
        return self.out_bit(i, a) and self.in_bit(j, b)

    def row_symbols(self, slot: int, side: str) -> list[int]:
        if side not in ("in", "out"):
            raise ValueError("side must be 'in' or 'out'")
        mat = self.out_bits if side == "out" else self.in_bits
        if not 0 <= slot < self.m:
            raise IndexOutOfRange(f"slot {slot} outside 0..{self.m - 1}")
        syms = []
        for w in range(self.row_words):
            word = int(mat[slot, w])
            while word:
                low = word & -word
                syms.append(64 * w + low.bit_length() - 1)
                word ^= low
        return syms

    def clear_row(self, slot: int) -> None:
        self.in_bits[slot] = 0
        self.out_bits[slot] = 0

    def edge_count(self) -> int:
        from .kernels._np import popcount64

        return int(popcount64(self.out_bits).sum())

    def remap(self, old_to_new: np.ndarray, new_m: int) -> None:
        keep = old_to_new >= 0
        new_in = np.zeros((new_m, self.row_words), dtype=np.uint64)
        new_out = np.zeros((new_m, self.row_words), dtype=np.uint64)
        new_in[old_to_new[keep]] = self.in_bits[keep]
        new_out[old_to_new[keep]] = self.out_bits[keep]
        self.in_bits, self.out_bits, self.m = new_in, new_out, new_m

    # dense bit-exact payload: m*sigma bits per matrix, IN then OUT, one
    # contiguous little-endian bit stream padded once at the end
    def pack(self) -> bytes:
        return pack_bit_rows([self.in_bits, self.out_bits], self.sigma)

    @classmethod
    def unpack(cls, data: bytes, m: int, sigma: int) -> "AdjacencyMatrices":
        adj = cls(m, sigma)
        adj.in_bits, adj.out_bits = unpack_bit_rows(data, 2, m, sigma)
        return adj


def payload_bytes(n_matrices: int, m: int, cols: int) -> int:
    return -(-(n_matrices * m * cols) // 8)


def pack_bit_rows(mats: list[np.ndarray], cols: int) -> bytes:
    parts = []
    for mat in mats:
        as_bytes = mat.astype("<u8").view(np.uint8).reshape(mat.shape[0], -1)
        bits = np.unpackbits(as_bytes, axis=1, bitorder="little")[:, :cols]
        parts.append(bits.reshape(-1))
    flat = np.concatenate(parts) if parts else np.zeros(0, np.uint8)
    return np.packbits(flat, bitorder="little").tobytes()


def unpack_bit_rows(data: bytes, n_matrices: int, m: int, cols: int) -> list[np.ndarray]:
    words = -(-cols // 64)
    flat = np.unpackbits(np.frombuffer(data, dtype=np.uint8), bitorder="little")
    flat = flat[: n_matrices * m * cols].reshape(n_matrices, m, cols)
    out = []
    for mat_bits in flat:
        padded = np.zeros((m, words * 64), dtype=np.uint8)
        padded[:, :cols] = mat_bits
        packed = np.packbits(padded, axis=1, bitorder="little")
        out.append(np.ascontiguousarray(packed).view("<u8").astype(np.uint64).reshape(m, words))
    return out


def set_edge_bits(adj: AdjacencyMatrices, i: int, a: int, j: int, b: int) -> None:
    adj.set_edge_bits(i, a, j, b)


def clear_edge_bits(adj: AdjacencyMatrices, i: int, a: int, j: int, b: int) -> None:
    adj.clear_edge_bits(i, a, j, b)


def confirmed(adj: AdjacencyMatrices, i: int, a: int, j: int, b: int) -> bool:
    return adj.confirmed(i, a, j, b)


def row_symbols(adj: AdjacencyMatrices, i: int, side: str) -> list[int]:
    return adj.row_symbols(i, side)
