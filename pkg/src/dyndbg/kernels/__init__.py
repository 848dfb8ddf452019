"""Hot numeric kernels with a numba backend and a pure-numpy fallback.

The backend is chosen once at import: numba when it is importable, unless
the environment variable ``DYNDBG_DISABLE_NUMBA`` is set to a non-empty value
other than ``0``. :func:`set_backend` switches at runtime (tests, benchmarks).
"""
from __future__ import annotations

import contextlib
import os

import numpy as np

from . import _np

_DISABLED = os.environ.get("DYNDBG_DISABLE_NUMBA", "") not in ("", "0")

try:
    if _DISABLED:
        raise ImportError("disabled by DYNDBG_DISABLE_NUMBA")
    from . import _jit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on the environment
    _jit = None
    HAVE_NUMBA = False

_CRC_TABLE = np.array(_np.CRC_TABLE, dtype=np.uint64)
_backend = "numba" if HAVE_NUMBA else "numpy"


def backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend is not available")
    _backend = name


@contextlib.contextmanager
def using(name: str):
    prev = _backend
    set_backend(name)
    try:
        yield
    finally:
        set_backend(prev)


def _jitted() -> bool:
    return _backend == "numba"


def window_fingerprints(codes: np.ndarray, k: int, r: int, r_pow_k1: int, p: int) -> np.ndarray:
    """Fingerprints of every length-k window of ``codes``."""
    codes = np.ascontiguousarray(codes, dtype=np.uint8)
    if _jitted():
        return _jit.window_fingerprints(codes, k, r, r_pow_k1, p)
    return _np.window_fingerprints(codes, k, r, r_pow_k1, p)


def window_hist_fingerprints(codes: np.ndarray, k: int, rpows, p: int) -> np.ndarray:
    """Histogram fingerprints of every length-k window of ``codes``."""
    codes = np.ascontiguousarray(codes, dtype=np.uint8)
    rpows = np.asarray(rpows, dtype=np.uint64)
    if _jitted():
        return _jit.window_hist_fingerprints(codes, k, rpows, p)
    return _np.window_hist_fingerprints(codes, k, rpows, p)


def window_words(codes: np.ndarray, k: int, lam: int) -> np.ndarray:
    """Bit-packed words of every length-k window (requires k*lam <= 64)."""
    nw = codes.shape[0] - k + 1
    if nw <= 0:
        return np.empty(0, dtype=np.uint64)
    c = codes.astype(np.uint64)
    w = np.zeros(nw, dtype=np.uint64)
    sh = np.uint64(lam)
    for j in range(k):
        w = (w << sh) | c[j : j + nw]
    return w


def mphf_lookup(keys: np.ndarray, tables: tuple) -> np.ndarray:
    keys = np.ascontiguousarray(keys, dtype=np.uint64)
    if _jitted():
        return _jit.mphf_lookup(keys, *tables)
    return _np.mphf_lookup(keys, *tables)


def bfs_forest(indptr: np.ndarray, indices: np.ndarray, n: int):
    """Return (order, parent, tree_source) of a BFS spanning forest."""
    indptr = np.ascontiguousarray(indptr, dtype=np.int64)
    indices = np.ascontiguousarray(indices, dtype=np.int64)
    if _jitted():
        return _jit.bfs_forest(indptr, indices, n)
    return _np.bfs_forest(indptr, indices, n)


def cut_pass(order, parent, tree, s_min: int) -> np.ndarray:
    if _jitted():
        return _jit.cut_pass(order, parent, tree, s_min)
    return _np.cut_pass(order, parent, tree, s_min)


def crc64(data: bytes) -> int:
    if _jitted():
        return int(_jit.crc64(np.frombuffer(data, dtype=np.uint8), _CRC_TABLE))
    return _np.crc64(data)


def batch_ascend(words, fps, k, lam, r, r_pow_k1, r_inv, p, word_mask,
                 tags, syms, out_bits, in_bits, sample_words, h_max, mphf_tables):
    words = np.ascontiguousarray(words, dtype=np.uint64)
    fps = np.ascontiguousarray(fps, dtype=np.uint64)
    if _jitted():
        return _jit.batch_ascend(words, fps, k, lam, r, r_pow_k1, r_inv, p, word_mask,
                                 tags, syms, out_bits, in_bits, sample_words, h_max,
                                 *mphf_tables)
    return _np.batch_ascend(words, fps, k, lam, r, r_pow_k1, r_inv, p, word_mask,
                            tags, syms, out_bits, in_bits, sample_words, h_max, mphf_tables)
