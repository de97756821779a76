"""Hot kernels with backend dispatch.

closure_images and parity_many dominate the runtime of the exhaustive
verification at n = 4 (half a million permutations of 32 points).  Each has
a numba kernel (see _kernels_numba) and a pure-numpy fallback implemented
here; _backend decides which one runs.  benchmarks/closure_bench.py compares
the two.
"""

import numpy as np

from . import _backend

_CHUNK = 4096


def _void_view(rows):
    rows = np.ascontiguousarray(rows)
    return rows.view(np.dtype((np.void, rows.shape[1]))).ravel()


def closure_images_numpy(gens, cap):
    """Level-by-level BFS closure; see the numba twin for the contract."""
    ngen, m = gens.shape
    identity = np.arange(m, dtype=np.uint8)
    seen = {identity.tobytes()}
    chunks = [identity[None, :]]
    frontier = identity[None, :]
    count = 1
    while frontier.shape[0]:
        fresh = []
        for lo in range(0, frontier.shape[0], _CHUNK):
            part = frontier[lo : lo + _CHUNK]
            cand = part[:, gens].reshape(-1, m)
            uniq = _void_view(cand)
            uniq = np.unique(uniq).view(np.uint8).reshape(-1, m)
            for row in uniq:
                key = row.tobytes()
                if key not in seen:
                    seen.add(key)
                    fresh.append(row)
                    if count + len(fresh) >= cap:
                        chunks.append(np.array(fresh, dtype=np.uint8))
                        return np.concatenate(chunks), True
        if not fresh:
            break
        frontier = np.array(fresh, dtype=np.uint8)
        chunks.append(frontier)
        count += frontier.shape[0]
    return np.concatenate(chunks), False


def parity_many_numpy(perms):
    """Parity per row by counting inversions (chunked broadcasting)."""
    perms = np.asarray(perms)
    npv, m = perms.shape
    out = np.empty(npv, np.uint8)
    for lo in range(0, npv, _CHUNK):
        part = perms[lo : lo + _CHUNK].astype(np.int16)
        inv = (part[:, :, None] > part[:, None, :]) & (
            np.arange(m)[:, None] < np.arange(m)[None, :]
        )
        out[lo : lo + _CHUNK] = inv.sum(axis=(1, 2)) & 1
    return out


if _backend.USING_NUMBA:
    from ._kernels_numba import closure_images, parity_many  # noqa: F401
else:
    closure_images = closure_images_numpy
    parity_many = parity_many_numpy
