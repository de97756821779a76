"""Numba implementations of the hot kernels.

Only imported when the numba backend is active (or by the benchmark).  Both
kernels mirror the numpy fallbacks in _kernels.py exactly; closure output
order differs between backends, which is why callers canonicalize.
"""

import numpy as np
from numba import njit, uint64

_FNV_OFFSET = uint64(0xCBF29CE484222325)
_FNV_PRIME = uint64(0x100000001B3)


@njit(cache=True)
def _hash_row(row, m):
    h = _FNV_OFFSET
    for k in range(m):
        h = (h ^ uint64(row[k])) * _FNV_PRIME
    return h


@njit(cache=True)
def closure_images(gens, cap):
    """BFS closure of permutation rows under right-composition by gens.

    gens: (ngen, m) uint8, each row a permutation of range(m).
    Returns (elements, truncated): elements in discovery order starting with
    the identity; truncated=True when the cap was hit.
    """
    ngen, m = gens.shape

    nelem = 1024 if cap > 1024 else cap
    elems = np.empty((nelem, m), np.uint8)
    for z in range(m):
        elems[0, z] = z

    tsize = 4096
    table = np.full(tsize, -1, np.int64)
    mask = tsize - 1
    h = _hash_row(elems[0], m)
    table[np.int64(h & uint64(mask))] = 0

    count = 1
    head = 0
    base = np.empty(m, np.uint8)
    scratch = np.empty(m, np.uint8)

    while head < count:
        for z in range(m):
            base[z] = elems[head, z]
        for gi in range(ngen):
            for z in range(m):
                scratch[z] = base[gens[gi, z]]
            h = _hash_row(scratch, m)
            idx = np.int64(h & uint64(mask))
            slot = table[idx]
            while slot != -1:
                same = True
                for z in range(m):
                    if elems[slot, z] != scratch[z]:
                        same = False
                        break
                if same:
                    break
                idx = (idx + 1) & mask
                slot = table[idx]
            if slot != -1:
                continue
            if count >= cap:
                return elems[:count], True
            if count >= nelem:
                newn = nelem * 2
                if newn > cap:
                    newn = cap
                grown = np.empty((newn, m), np.uint8)
                grown[:count] = elems[:count]
                elems = grown
                nelem = newn
            if (count + 1) * 2 > tsize:
                tsize = tsize * 2
                table = np.full(tsize, -1, np.int64)
                mask = tsize - 1
                for j in range(count):
                    hj = _hash_row(elems[j], m)
                    ij = np.int64(hj & uint64(mask))
                    while table[ij] != -1:
                        ij = (ij + 1) & mask
                    table[ij] = j
                idx = np.int64(h & uint64(mask))
                while table[idx] != -1:
                    idx = (idx + 1) & mask
            elems[count] = scratch
            table[idx] = count
            count += 1
        head += 1
    return elems[:count], False


@njit(cache=True)
def parity_many(perms):
    """Parity of each permutation row: 0 even, 1 odd (via cycle counting)."""
    npv, m = perms.shape
    out = np.empty(npv, np.uint8)
    seen = np.zeros(m, np.uint8)
    for i in range(npv):
        for z in range(m):
            seen[z] = 0
        ncyc = 0
        for z in range(m):
            if seen[z] == 0:
                ncyc += 1
                w = z
                while seen[w] == 0:
                    seen[w] = 1
                    w = perms[i, w]
        out[i] = (m - ncyc) & 1
    return out
