# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for fingerprint path enumeration and Tanimoto sweeps.

Must produce bit-identical results to the pure-Python fallbacks in
``fingerprint.py``; the equivalence test enforces that.
"""

from libcpp.vector cimport vector

import numpy as np

ctypedef unsigned long long u64

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil

cdef u64 FNV_OFFSET = 0xCBF29CE484222325ULL
cdef u64 FNV_PRIME = 0x100000001B3ULL


cdef inline u64 path_hash(long long* codes, int n) nogil:
    """FNV-1a over the lexicographically smaller read direction."""
    cdef int i, direction = 0
    cdef u64 h = FNV_OFFSET
    for i in range(n):
        if codes[i] != codes[n - 1 - i]:
            direction = 1 if codes[i] > codes[n - 1 - i] else 0
            break
    if direction == 0:
        for i in range(n):
            h ^= <u64> codes[i]
            h *= FNV_PRIME
    else:
        for i in range(n - 1, -1, -1):
            h ^= <u64> codes[i]
            h *= FNV_PRIME
    return h


def path_hashes(atom_codes, flat_nbrs, offsets, bond_codes, int max_path_len):
    """Hashes of every simple path up to max_path_len bonds (both-direction
    canonical), as a Python set. Mirrors _path_hashes_pure exactly."""
    cdef long long[::1] ac = np.asarray(atom_codes, dtype=np.int64)
    cdef long long[::1] nbrs = np.asarray(flat_nbrs, dtype=np.int64)
    cdef long long[::1] offs = np.asarray(offsets, dtype=np.int64)
    cdef long long[::1] bc = np.asarray(bond_codes, dtype=np.int64)
    cdef int n = ac.shape[0]
    cdef int max_codes = 2 * max_path_len + 1
    cdef vector[u64] out
    cdef vector[long long] codes
    cdef vector[long long] path_atoms
    cdef vector[long long] frame_iter
    cdef unsigned char* on_path = NULL
    cdef int start, depth, tail, nbr
    cdef long long pos

    on_path_arr = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] on_view = on_path_arr
    codes.resize(max_codes)
    path_atoms.resize(max_path_len + 2)
    frame_iter.resize(max_path_len + 2)

    with nogil:
        for start in range(n):
            depth = 0
            path_atoms[0] = start
            codes[0] = ac[start]
            on_view[start] = 1
            frame_iter[0] = offs[start]
            out.push_back(path_hash(&codes[0], 1))
            while depth >= 0:
                tail = <int> path_atoms[depth]
                pos = frame_iter[depth]
                if 2 * depth + 1 >= max_codes or pos >= offs[tail + 1]:
                    on_view[tail] = 0
                    depth -= 1
                    continue
                frame_iter[depth] = pos + 1
                nbr = <int> nbrs[pos]
                if on_view[nbr]:
                    continue
                depth += 1
                path_atoms[depth] = nbr
                codes[2 * depth - 1] = bc[pos]
                codes[2 * depth] = ac[nbr]
                on_view[nbr] = 1
                frame_iter[depth] = offs[nbr]
                out.push_back(path_hash(&codes[0], 2 * depth + 1))

    result = set()
    cdef size_t k
    for k in range(out.size()):
        result.add(out[k])
    return result


def mean_pairwise_tanimoto(fingerprints):
    """Mean Tanimoto distance over all unordered pairs of equal-length
    fingerprint byte strings."""
    cdef int m = len(fingerprints)
    if m < 2:
        return 0.0
    cdef int nbytes = len(fingerprints[0])
    cdef int words = (nbytes + 7) // 8
    packed = np.zeros((m, words), dtype=np.uint64)
    cdef int i, j, w
    for i in range(m):
        if len(fingerprints[i]) != nbytes:
            raise ValueError("fingerprint lengths differ")
        row = np.frombuffer(fingerprints[i].ljust(words * 8, b"\0"),
                            dtype="<u8")
        packed[i] = row
    cdef u64[:, ::1] bits = packed
    cdef double total = 0.0
    cdef long long inter, union_
    with nogil:
        for i in range(m):
            for j in range(i + 1, m):
                inter = 0
                union_ = 0
                for w in range(words):
                    inter += __builtin_popcountll(bits[i, w] & bits[j, w])
                    union_ += __builtin_popcountll(bits[i, w] | bits[j, w])
                if union_ > 0:
                    total += 1.0 - (<double> inter) / (<double> union_)
    return total / (m * (m - 1) / 2.0)
