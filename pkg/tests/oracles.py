"""Independent reference computations used by the tests."""

from __future__ import annotations

import itertools

import numpy as np


def dense_graph_state(n, edges):
    """|+>^n followed by a CZ matrix per edge, all in plain floating point."""
    psi = np.full(1 << n, 2 ** (-n / 2), dtype=np.complex128)
    idx = np.arange(1 << n)
    for u, v in edges:
        bu = (idx >> (n - 1 - u)) & 1
        bv = (idx >> (n - 1 - v)) & 1
        psi = psi * np.where(bu & bv, -1, 1)
    return psi


def brute_gf2_rank(M):
    """Rank over GF(2) as log2 of the number of distinct row combinations."""
    M = np.asarray(M, dtype=np.int64) % 2
    if M.size == 0:
        return 0
    span = set()
    for coeffs in itertools.product((0, 1), repeat=M.shape[0]):
        span.add(tuple(np.asarray(coeffs) @ M % 2))
    return int(np.log2(len(span)))


def kron_list(vectors):
    out = np.array([1.0 + 0j])
    for v in vectors:
        out = np.kron(out, v)
    return out


def pauli_matrix(letters):
    mats = {
        "I": np.eye(2),
        "X": np.array([[0, 1], [1, 0]]),
        "Y": np.array([[0, -1j], [1j, 0]]),
        "Z": np.diag([1, -1]),
    }
    out = np.array([[1.0 + 0j]])
    for ch in letters:
        out = np.kron(out, mats[ch])
    return out
