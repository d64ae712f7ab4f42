"""Exact dense state vectors for graph states and their bipartite spectra.

Basis index ``j`` encodes qubit ``q`` in bit ``n-1-q`` (qubit 0 is the most
significant bit).  Amplitudes are exact (:mod:`graphrank.exact`); floating
point appears only in density matrices and spectra.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError, ResourceError
from .exact import INV_SQRT2, ONE, ExactAmplitude, ExactVector, kron_all
from .graph import MAX_VERTICES, Bipartition, Graph, cut_rank

RANK_TOL = 1e-10
SPECTRUM_TOL = 1e-12
MAX_REDUCED_QUBITS = 14
ORDERING = "big-endian: qubit 0 is the most significant bit of the basis index"


@dataclass(frozen=True, eq=False)
class StateVector:
    n: int
    amps: ExactVector

    def __post_init__(self):
        if len(self.amps) != 1 << self.n:
            raise InputError(f"expected {1 << self.n} amplitudes, got {len(self.amps)}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, StateVector):
            return NotImplemented
        return self.n == other.n and self.amps == other.amps

    __hash__ = None

    def __getitem__(self, idx) -> ExactAmplitude:
        return self.amps[idx]

    def __add__(self, other: StateVector) -> StateVector:
        _check_same(self, other)
        return StateVector(self.n, self.amps + other.amps)

    def __sub__(self, other: StateVector) -> StateVector:
        _check_same(self, other)
        return StateVector(self.n, self.amps - other.amps)

    def __neg__(self) -> StateVector:
        return StateVector(self.n, -self.amps)

    def scale(self, s) -> StateVector:
        return StateVector(self.n, self.amps * ExactAmplitude.coerce(s))

    def conj(self) -> StateVector:
        return StateVector(self.n, self.amps.conj())

    def inner(self, other: StateVector) -> ExactAmplitude:
        """Exact <self|other>."""
        _check_same(self, other)
        return self.amps.vdot(other.amps)

    def norm2(self) -> ExactAmplitude:
        return self.amps.norm2()

    def to_numpy(self) -> np.ndarray:
        return self.amps.to_complex()

    def is_real(self) -> bool:
        return self.amps.is_real()

    def __repr__(self) -> str:
        return f"StateVector(n={self.n})"


def _check_same(x: StateVector, y: StateVector) -> None:
    if x.n != y.n:
        raise InputError(f"qubit count mismatch: {x.n} vs {y.n}")


def _check_n(n: int) -> None:
    if n > MAX_VERTICES:
        raise ResourceError(f"{n} qubits exceeds the ceiling of {MAX_VERTICES}")


def qubit_bits(n: int, q: int) -> np.ndarray:
    """Value of qubit ``q`` in every basis index, as uint8."""
    idx = np.arange(1 << n, dtype=np.uint32)
    return ((idx >> np.uint32(n - 1 - q)) & np.uint32(1)).astype(np.uint8)


def _parse_bits(s, n: int) -> list[int]:
    if isinstance(s, str):
        if any(ch not in "01" for ch in s):
            raise InputError(f"bitstring {s!r} must contain only 0 and 1")
        bits = [int(ch) for ch in s]
    else:
        bits = [int(x) for x in s]
        if any(x not in (0, 1) for x in bits):
            raise InputError("bits must be 0 or 1")
    if len(bits) != n:
        raise InputError(f"expected {n} bits, got {len(bits)}")
    return bits


def graph_basis_state(G: Graph, s=None) -> StateVector:
    """``Z^s`` applied to ``|+>^n`` followed by a CZ on every edge.  ``s`` of all
    zeros (or None) gives the graph state itself."""
    _check_n(G.n)
    n = G.n
    bits = [qubit_bits(n, q) for q in range(n)]
    parity = np.zeros(1 << n, dtype=np.uint8)
    for a, b in G.edges():
        parity ^= bits[a] & bits[b]
    if s is not None:
        for q, sq in enumerate(_parse_bits(s, n)):
            if sq:
                parity ^= bits[q]
    return StateVector(n, ExactVector.signs(parity, n))


def build_graph_state(G: Graph) -> StateVector:
    return graph_basis_state(G)


# single-qubit vectors used throughout
KET0 = ExactVector([1, 0])
KET1 = ExactVector([0, 1])
PLUS = ExactVector([1, 1]) * INV_SQRT2
MINUS = ExactVector([1, -1]) * INV_SQRT2
# (|0> +- i|1>)/sqrt2
PLUS_I = ExactVector([1, 0], None, [0, 1]) * INV_SQRT2
MINUS_I = ExactVector([1, 0], None, [0, -1]) * INV_SQRT2

NAMED_KETS = {"0": KET0, "1": KET1, "+": PLUS, "-": MINUS, "r": PLUS_I, "l": MINUS_I}


def product_state(factors: Sequence[ExactVector | str]) -> StateVector:
    """Tensor product of single-qubit vectors; strings name kets ('0', '1', '+',
    '-', 'r' for (|0>+i|1>)/sqrt2, 'l' for (|0>-i|1>)/sqrt2)."""
    vecs = []
    for f in factors:
        if isinstance(f, str):
            if f not in NAMED_KETS:
                raise InputError(f"unknown ket label {f!r}")
            f = NAMED_KETS[f]
        if len(f) != 2:
            raise InputError("single-qubit factors must have length 2")
        vecs.append(f)
    return StateVector(len(vecs), kron_all(vecs))


def ket(labels: str) -> StateVector:
    return product_state(list(labels))


def apply_pauli(psi: StateVector, pauli: str) -> StateVector:
    """Apply a tensor product of Paulis given as one letter per qubit."""
    pauli = pauli.upper()
    if len(pauli) != psi.n:
        raise InputError(f"Pauli string length {len(pauli)} does not match {psi.n} qubits")
    if any(ch not in "IXYZ" for ch in pauli):
        raise InputError(f"invalid Pauli letter in {pauli!r}")
    n = psi.n
    idx = np.arange(1 << n, dtype=np.int64)
    flip = 0
    zmask = np.zeros(1 << n, dtype=np.uint8)
    n_y = 0
    for q, ch in enumerate(pauli):
        bit = n - 1 - q
        if ch in "XY":
            flip |= 1 << bit
        if ch in "ZY":
            zmask ^= ((idx >> bit) & 1).astype(np.uint8)
        n_y += ch == "Y"
    # Y = i X Z: apply Z's, then X's, then the global i**n_y
    out = psi.amps.flip_signs(zmask)
    if flip:
        out = out.take(idx ^ flip)
    for _ in range(n_y % 4):
        out = out.times_i()
    return StateVector(n, out)


def apply_z_mask(psi: StateVector, qubits: Iterable[int]) -> StateVector:
    letters = ["I"] * psi.n
    for q in qubits:
        letters[q] = "Z" if letters[q] == "I" else "I"
    return apply_pauli(psi, "".join(letters))


def project(psi: StateVector, qubit: int, value: int) -> StateVector:
    """Apply ``|value><value|`` on ``qubit`` (unnormalized)."""
    keep = qubit_bits(psi.n, qubit) == value
    a = [np.where(keep, p, 0) for p in psi.amps.parts]
    return StateVector(psi.n, ExactVector(*a, k=psi.amps.k))


def permute_qubits(psi: StateVector, order: Sequence[int]) -> StateVector:
    """Return the state whose qubit ``i`` is qubit ``order[i]`` of ``psi``."""
    n = psi.n
    if sorted(order) != list(range(n)):
        raise InputError("order must be a permutation of the qubits")
    idx = np.arange(1 << n, dtype=np.int64)
    src = np.zeros_like(idx)
    for i, q in enumerate(order):
        src |= ((idx >> (n - 1 - i)) & 1) << (n - 1 - q)
    return StateVector(n, psi.amps.take(src))


# -- bipartite quantities -------------------------------------------------

@dataclass(frozen=True)
class DensityMatrix:
    matrix: np.ndarray
    vertices: tuple[int, ...]

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        """Ascending eigenvalues."""
        return np.linalg.eigvalsh(self.matrix)

    def rank(self, tol: float = RANK_TOL) -> int:
        return int(np.sum(self.eigenvalues() > tol))


def _as_array(psi) -> tuple[int, np.ndarray]:
    if isinstance(psi, StateVector):
        return psi.n, psi.to_numpy()
    arr = np.asarray(psi, dtype=np.complex128).ravel()
    n = arr.size.bit_length() - 1
    if arr.size != 1 << n:
        raise InputError("state length must be a power of two")
    return n, arr


def unfolding(psi, rows: Sequence[int]) -> np.ndarray:
    """Matrix with row index over the qubits in ``rows`` (in the given order) and
    column index over the rest (increasing order)."""
    n, arr = _as_array(psi)
    rows = list(rows)
    cols = [q for q in range(n) if q not in rows]
    t = arr.reshape((2,) * n).transpose(rows + cols)
    return t.reshape(1 << len(rows), 1 << len(cols))


def _check_cut(n: int, A: Bipartition) -> None:
    if A.n != n:
        raise InputError("bipartition size does not match the state")
    A.require_proper()


def reduced_density(psi, A: Bipartition) -> DensityMatrix:
    """Density matrix of the complement of A after tracing out A."""
    n, _ = _as_array(psi)
    _check_cut(n, A)
    keep = A.complement_vertices
    if len(keep) > MAX_REDUCED_QUBITS:
        raise ResourceError(f"reduced state on {len(keep)} qubits exceeds {MAX_REDUCED_QUBITS}")
    M = unfolding(psi, keep)
    return DensityMatrix(M @ M.conj().T, tuple(keep))


def schmidt_spectrum(psi, A: Bipartition) -> np.ndarray:
    """Schmidt coefficients (eigenvalues of either reduced state) above 1e-12,
    descending."""
    n, _ = _as_array(psi)
    _check_cut(n, A)
    if min(len(A), n - len(A)) > MAX_REDUCED_QUBITS:
        raise ResourceError("cut too large for a dense spectrum")
    s = np.linalg.svd(unfolding(psi, A.vertices), compute_uv=False)
    mu = s * s
    return np.sort(mu[mu > SPECTRUM_TOL])[::-1]


def flattening_rank(psi, A: Bipartition, tol: float = RANK_TOL) -> int:
    return int(np.sum(schmidt_spectrum(psi, A) > tol))


def flattening_bounds(G: Graph, A: Bipartition) -> dict:
    """Both readings of the cut-rank bound next to the measured flattening rank.

    The bound quoted as ``2**(rank/2)`` is weaker than what the Schmidt rank
    gives; the measured flattening rank always equals ``2**rank``.
    """
    d = cut_rank(G, A)
    return {
        "cut_rank": d,
        "bound_full_exponent": 2 ** d,
        "bound_half_exponent": 2 ** (d / 2),
        "flattening_rank": flattening_rank(build_graph_state(G), A),
    }


def batch_graph_states(rows: np.ndarray) -> np.ndarray:
    """Floating amplitudes of many graph states at once.

    ``rows`` holds adjacency bitsets with shape (B, n) as produced by
    :func:`graphrank.graph.all_adjacency_rows`; the result has shape (B, 2**n).
    """
    rows = np.asarray(rows, dtype=np.int64)
    B, n = rows.shape
    if n > MAX_REDUCED_QUBITS:
        raise ResourceError(f"batched dense states limited to {MAX_REDUCED_QUBITS} qubits")
    bits = [qubit_bits(n, q).astype(np.int64) for q in range(n)]
    parity = np.zeros((B, 1 << n), dtype=np.int64)
    for u in range(n):
        for v in range(u + 1, n):
            has = (rows[:, u] >> v) & 1
            if has.any():
                parity ^= has[:, None] * (bits[u] & bits[v])[None, :]
    return (1 - 2 * parity) * 2.0 ** (-n / 2)


# -- expansion over a vertex subset ------------------------------------

MAX_EXPANSION = 20


def z_pattern(G: Graph, A: Bipartition, z: Sequence[int]) -> list[int]:
    """Complement vertices hit an odd number of times by ``prod_{a: z_a=1} Z_{N_a}``."""
    hit = 0
    for a, za in zip(A.vertices, z):
        if za:
            hit ^= G.rows[a]
    comp = A.complement_vertices
    return [j for j, b in enumerate(comp) if (hit >> b) & 1]


def expand_over_subset(G: Graph, A: Bipartition) -> list[tuple[tuple[int, ...], int, StateVector]]:
    """Terms ``(z, sign, U(z)|G-A>)`` with

        |G> = 2**(-|A|/2) * sum_z sign(z) |z>_A (x) U(z)|G-A>

    where ``U(z)`` applies Z to every complement neighbor of the A-vertices with
    ``z_a = 1`` and ``sign(z) = (-1)**(number of edges inside A with both ends set)``.
    The states live on the complement, in increasing vertex order.
    """
    _check_cut(G.n, A)
    if len(A) > MAX_EXPANSION:
        raise ResourceError(f"|A| = {len(A)} exceeds {MAX_EXPANSION}")
    rest, _ = G.remove_vertices(A.vertices)
    base = build_graph_state(rest)
    avs = A.vertices
    inner_edges = [(i, j) for i in range(len(avs)) for j in range(i + 1, len(avs)) if G.has_edge(avs[i], avs[j])]
    terms = []
    for code in range(1 << len(avs)):
        z = tuple((code >> (len(avs) - 1 - i)) & 1 for i in range(len(avs)))
        sign = (-1) ** sum(z[i] & z[j] for i, j in inner_edges)
        terms.append((z, sign, apply_z_mask(base, z_pattern(G, A, z))))
    return terms


def reassemble_expansion(A: Bipartition, terms, signs: Sequence[int] | None = None) -> StateVector:
    """Rebuild the full state from :func:`expand_over_subset` output in the
    original qubit order.  ``signs`` overrides the per-term signs."""
    n = A.n
    avs, comp = A.vertices, A.complement_vertices
    total = None
    for t, (z, sign, state) in enumerate(terms):
        s = sign if signs is None else signs[t]
        zvec = kron_all([KET1 if b else KET0 for b in z])
        piece = StateVector(n, zvec.kron(state.amps))
        if s < 0:
            piece = -piece
        total = piece if total is None else total + piece
    scale = ONE
    for _ in avs:
        scale = scale * INV_SQRT2
    order = [0] * n
    # piece qubits are A-vertices then complement vertices
    layout = avs + comp
    for pos, v in enumerate(layout):
        order[v] = pos
    return permute_qubits(total.scale(scale), order)


# -- serialization -------------------------------------------------------

def state_to_json(psi: StateVector, **meta) -> dict:
    return {
        "format": "graphrank.state",
        "version": 1,
        "ordering": ORDERING,
        "n": psi.n,
        "amplitudes": [x.to_json() for x in psi.amps],
        **meta,
    }


def state_from_json(data: dict | str) -> StateVector:
    if isinstance(data, str):
        data = json.loads(data)
    try:
        n = int(data["n"])
        amps = data["amplitudes"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed state JSON: {exc}") from None
    if len(amps) != 1 << n:
        raise InputError(f"expected {1 << n} amplitudes, got {len(amps)}")
    try:
        vec = ExactVector.from_amplitudes(tuple(x) for x in amps)
    except (TypeError, ValueError) as exc:
        raise InputError(f"malformed amplitude: {exc}") from None
    return StateVector(n, vec)
