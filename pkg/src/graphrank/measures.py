"""Genuine multipartite entanglement and n-tangle for graph states.

The GME quantities here are bipartite measures minimized over every cut.  The
geometric measure is that minimization form, which differs from the usual
definition as a distance to the closest biseparable state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, ResourceError
from .graph import (
    Bipartition,
    Graph,
    all_cuts,
    batch_cut_ranks,
    cut_rank,
    degree_parity_all_odd,
)
from .statevec import (
    MAX_REDUCED_QUBITS,
    SPECTRUM_TOL,
    StateVector,
    apply_pauli,
    build_graph_state,
    unfolding,
)

DENSE_GME_MAX = 12
CENSUS_MAX = 8
AGREEMENT_TOL = 1e-9


@dataclass(frozen=True)
class GmeReport:
    concurrence: float
    negativity: float
    geometric: float
    d_min: int | None
    witness: tuple[int, ...]
    method: str

    def values(self) -> tuple[float, float, float]:
        return (self.concurrence, self.negativity, self.geometric)

    def to_json(self) -> dict:
        return {
            "concurrence": self.concurrence,
            "negativity": self.negativity,
            "geometric": self.geometric,
            "d_min": self.d_min,
            "witness_cut": list(self.witness),
            "method": self.method,
            "tolerance": 0.0 if self.method == "closed-form" else AGREEMENT_TOL,
        }


def values_from_cut_rank(d: int) -> tuple[float, float, float]:
    """Concurrence, negativity and geometric measure of a flat spectrum of rank 2**d."""
    return (math.sqrt(2 * (1 - 2.0 ** -d)), (2 ** d - 1) / 2, 1 - 2.0 ** -d)


def gme_closed_form(G: Graph) -> GmeReport:
    if G.n < 2:
        raise InputError("GME needs at least two qubits")
    best, witness = None, None
    for A in all_cuts(G.n):
        d = cut_rank(G, A)
        if best is None or d < best:
            best, witness = d, A
            if d == 0:
                break
    c, neg, g = values_from_cut_rank(best)
    return GmeReport(c, neg, g, best, tuple(witness.vertices), "closed-form")


def batch_min_cut_rank(rows: np.ndarray) -> np.ndarray:
    """Minimum cut rank of every graph in an adjacency batch."""
    rows = np.asarray(rows, dtype=np.int64)
    n = rows.shape[1]
    best = np.full(rows.shape[0], n, dtype=np.int64)
    for A in all_cuts(n):
        np.minimum(best, batch_cut_ranks(rows, A), out=best)
    return best


def batch_dense_gme(states: np.ndarray) -> np.ndarray:
    """Dense GME values for a batch of states of shape (B, 2**n); returns (B, 3)."""
    states = np.asarray(states)
    B, size = states.shape
    n = size.bit_length() - 1
    out = np.full((B, 3), np.inf)
    for A in all_cuts(n):
        rows = list(A.vertices)
        cols = A.complement_vertices
        t = states.reshape((B,) + (2,) * n).transpose([0] + [1 + q for q in rows + cols])
        M = t.reshape(B, 1 << len(rows), 1 << len(cols))
        s = np.linalg.svd(M, compute_uv=False)
        mu = s * s
        mu = np.where(mu > SPECTRUM_TOL, mu, 0.0)
        conc = np.sqrt(np.maximum(2 * (1 - np.sum(mu * mu, axis=1)), 0.0))
        neg = (np.sum(np.sqrt(mu), axis=1) ** 2 - 1) / 2
        geo = 1 - np.max(mu, axis=1)
        np.minimum(out, np.stack([conc, neg, geo], axis=1), out=out)
    return np.maximum(out, 0.0)


def gme_dense(psi) -> GmeReport:
    """Minimize concurrence, negativity and geometric measure over all cuts
    using the Schmidt spectrum of each cut."""
    arr = psi.to_numpy() if isinstance(psi, StateVector) else np.asarray(psi, dtype=np.complex128).ravel()
    n = arr.size.bit_length() - 1
    if arr.size != 1 << n:
        raise InputError("state length must be a power of two")
    if n < 2:
        raise InputError("GME needs at least two qubits")
    if n > DENSE_GME_MAX:
        raise ResourceError(f"dense GME limited to {DENSE_GME_MAX} qubits")
    arr = arr / np.linalg.norm(arr)
    best_d, witness, best_c = None, (), np.inf
    for A in all_cuts(n):
        s = np.linalg.svd(unfolding(arr, A.vertices), compute_uv=False)
        mu = s * s
        mu = mu[mu > SPECTRUM_TOL]
        c = math.sqrt(max(2 * (1 - float(np.sum(mu * mu))), 0.0))
        if c < best_c:
            best_c, witness = c, tuple(A.vertices)
            best_d = int(round(math.log2(len(mu)))) if len(mu) & (len(mu) - 1) == 0 else None
    c, neg, g = batch_dense_gme(arr[None, :])[0]
    return GmeReport(float(c), float(neg), float(g), best_d, witness, "dense")


def partial_transpose_spectrum(psi, A: Bipartition) -> np.ndarray:
    """Ascending eigenvalues of the partial transpose of |psi><psi| on A."""
    arr = psi.to_numpy() if isinstance(psi, StateVector) else np.asarray(psi, dtype=np.complex128).ravel()
    n = arr.size.bit_length() - 1
    if n > 10:
        raise ResourceError("dense partial transpose limited to 10 qubits")
    A.require_proper()
    M = unfolding(arr, A.vertices)
    a, b = M.shape
    rho = np.einsum("ij,kl->ijkl", M, M.conj())  # rho[(i,j),(k,l)]
    pt = rho.transpose(2, 1, 0, 3).reshape(a * b, a * b)
    return np.linalg.eigvalsh(pt)


# -- n-tangle ----------------------------------------------------------------

def n_tangle_dense(psi) -> float:
    """|<psi| Y^n |psi*>|**2, exact for exact input."""
    if isinstance(psi, StateVector):
        flipped = apply_pauli(psi.conj(), "Y" * psi.n)
        amp = psi.inner(flipped)
        nrm = psi.norm2()
        return float(amp.abs2()) / float(nrm) ** 2
    arr = np.asarray(psi, dtype=np.complex128).ravel()
    n = arr.size.bit_length() - 1
    y = np.array([[0, -1j], [1j, 0]])
    t = arr.conj().reshape((2,) * n)
    for q in range(n):
        t = np.moveaxis(np.tensordot(y, t, axes=([1], [q])), 0, q)
    return float(abs(np.vdot(arr, t.ravel())) ** 2 / np.vdot(arr, arr).real ** 2)


def n_tangle_graph_rule(G: Graph) -> int:
    return int(G.n % 2 == 0 and degree_parity_all_odd(G))


@dataclass(frozen=True, eq=False)
class StabilizerTableau:
    """Signed Pauli generators ``sign * P_1 (x) ... (x) P_n`` with letters
    encoded by x and z bits (Y has both)."""

    x: np.ndarray
    z: np.ndarray
    signs: np.ndarray

    def __post_init__(self):
        for name in ("x", "z"):
            arr = np.asarray(getattr(self, name), dtype=np.uint8) & 1
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "signs", np.asarray(self.signs, dtype=np.int64))
        if self.x.shape != self.z.shape or self.x.ndim != 2 or self.x.shape[0] != self.signs.size:
            raise InputError("tableau arrays have inconsistent shapes")
        if not np.all(np.isin(self.signs, (1, -1))):
            raise InputError("signs must be +1 or -1")

    @property
    def n(self) -> int:
        return self.x.shape[1]

    @classmethod
    def from_strings(cls, paulis: list[str]) -> StabilizerTableau:
        xs, zs, signs = [], [], []
        for p in paulis:
            sign = 1
            if p.startswith(("+", "-")):
                sign = -1 if p[0] == "-" else 1
                p = p[1:]
            if any(ch not in "IXYZ" for ch in p.upper()):
                raise InputError(f"invalid Pauli {p!r}")
            p = p.upper()
            xs.append([ch in "XY" for ch in p])
            zs.append([ch in "ZY" for ch in p])
            signs.append(sign)
        if len({len(r) for r in xs}) > 1:
            raise InputError("Pauli strings have different lengths")
        return cls(np.array(xs), np.array(zs), np.array(signs))

    def to_strings(self) -> list[str]:
        letters = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}
        out = []
        for x, z, s in zip(self.x, self.z, self.signs):
            body = "".join(letters[(int(a), int(b))] for a, b in zip(x, z))
            out.append(("-" if s < 0 else "+") + body)
        return out

    def phases(self) -> np.ndarray:
        """Exponent p with generator = i**p X^x Z^z."""
        y = np.sum(self.x & self.z, axis=1)
        return (np.where(self.signs < 0, 2, 0) + y) % 4

    def validate(self) -> None:
        n = self.n
        if self.x.shape[0] != n:
            raise InputError(f"expected {n} generators, got {self.x.shape[0]}")
        sym = (self.x.astype(int) @ self.z.T.astype(int) + self.z.astype(int) @ self.x.T.astype(int)) % 2
        if np.any(sym):
            raise InputError("generators do not commute")
        if _gf2_rank(_pack(self.x, self.z)) != n:
            raise InputError("generators are not independent")


def _pack(x: np.ndarray, z: np.ndarray) -> list[int]:
    n = x.shape[1]
    out = []
    for xr, zr in zip(x, z):
        v = 0
        for q in range(n):
            v |= int(xr[q]) << q
            v |= int(zr[q]) << (n + q)
        out.append(v)
    return out


def _gf2_rank(rows: list[int]) -> int:
    return len(_gf2_nullspace(rows)[0])


def _gf2_nullspace(rows: list[int]) -> tuple[list[int], list[int]]:
    """Pivot rows and the null combinations (bitmasks over input rows)."""
    pivots: dict[int, tuple[int, int]] = {}
    null = []
    for i, r in enumerate(rows):
        combo = 1 << i
        while r:
            top = r.bit_length() - 1
            if top not in pivots:
                pivots[top] = (r, combo)
                break
            pr, pc = pivots[top]
            r ^= pr
            combo ^= pc
        else:
            null.append(combo)
    return [p[0] for p in pivots.values()], null


def graph_to_tableau(G: Graph) -> StabilizerTableau:
    """Generators ``X_a prod_{b in N(a)} Z_b``, all with sign +1."""
    x = np.eye(G.n, dtype=np.uint8)
    z = G.adjacency().astype(np.uint8)
    return StabilizerTableau(x, z, np.ones(G.n, dtype=np.int64))


def tableau_fixes(T: StabilizerTableau, psi: StateVector) -> list[bool]:
    out = []
    for s in T.to_strings():
        img = apply_pauli(psi, s[1:])
        out.append(img == (psi if s[0] == "+" else -psi))
    return out


def tilde_tableau(T: StabilizerTableau) -> StabilizerTableau:
    """Generators of Y^n |s*>: the conjugate flips the sign of every Y letter and
    conjugation by Y^n flips the sign of every X and Z letter."""
    y = np.sum(T.x & T.z, axis=1)
    xz_only = np.sum(T.x ^ T.z, axis=1)
    flips = (y + xz_only) % 2
    return StabilizerTableau(T.x.copy(), T.z.copy(), T.signs * np.where(flips == 1, -1, 1))


def _product_phase(x, z, p, combo: int) -> tuple[int, int, int]:
    """Phase exponent and bits of the product of the selected generators in order."""
    n = x.shape[1]
    cx = np.zeros(n, dtype=np.uint8)
    cz = np.zeros(n, dtype=np.uint8)
    cp = 0
    i = 0
    while combo:
        if combo & 1:
            cp = (cp + int(p[i]) + 2 * int(np.dot(cz.astype(int), x[i].astype(int)))) % 4
            cx ^= x[i]
            cz ^= z[i]
        combo >>= 1
        i += 1
    return cp, cx, cz


def stabilizer_overlap(S: StabilizerTableau, T: StabilizerTableau) -> float:
    """|<s|t>|**2 for the stabilizer states of two tableaus."""
    S.validate()
    T.validate()
    if S.n != T.n:
        raise InputError("tableau sizes differ")
    n = S.n
    rows = _pack(S.x, S.z) + _pack(T.x, T.z)
    pivots, null = _gf2_nullspace(rows)
    shared = 2 * n - len(pivots)
    ps, pt = S.phases(), T.phases()
    mask = (1 << n) - 1
    for combo in null:
        a, b = combo & mask, combo >> n
        pa, xa, za = _product_phase(S.x, S.z, ps, a)
        pb, xb, zb = _product_phase(T.x, T.z, pt, b)
        if not (np.array_equal(xa, xb) and np.array_equal(za, zb)):
            raise InputError("inconsistent tableau bookkeeping")
        if pa != pb:
            return 0.0
    return 2.0 ** -(n - shared)


def n_tangle_stabilizer(T: StabilizerTableau) -> float:
    """n-tangle of a stabilizer state from its tableau.

    Equals 1 exactly when the state and its spin flip have the same signed
    stabilizer group and 0 when some element appears with opposite signs.  For
    graph states no other value occurs.
    """
    return stabilizer_overlap(T, tilde_tableau(T))


def count_odd_degree_graphs(n: int) -> int:
    """Number of labeled graphs on n vertices with every degree odd.

    Every edge set is accounted for: the edges are split in two halves and the
    degree-parity vectors of both halves are tabulated in full.
    """
    if n < 0:
        raise InputError("n must be >= 0")
    if n % 2 == 1 or n == 0:
        return 0
    if n > CENSUS_MAX:
        raise ResourceError(f"exhaustive census limited to n <= {CENSUS_MAX}")
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    masks = np.array([(1 << u) | (1 << v) for u, v in pairs], dtype=np.int64)
    half = len(pairs) // 2

    def parities(sub: np.ndarray) -> np.ndarray:
        codes = np.arange(1 << sub.size, dtype=np.int64)
        par = np.zeros(codes.size, dtype=np.int64)
        for e, m in enumerate(sub):
            par ^= ((codes >> e) & 1) * m
        return par

    low = np.bincount(parities(masks[:half]), minlength=1 << n)
    high = parities(masks[half:])
    target = (1 << n) - 1
    return int(low[target ^ high].sum())


def graph_measures(G: Graph, method: str = "closed") -> dict:
    """GME report(s) keyed by method name."""
    out = {}
    if method in ("closed", "all"):
        out["closed-form"] = gme_closed_form(G)
    if method in ("dense", "all"):
        if G.n > MAX_REDUCED_QUBITS:
            raise ResourceError("dense GME needs a smaller graph")
        out["dense"] = gme_dense(build_graph_state(G))
    if not out:
        raise InputError(f"unknown method {method!r}")
    return out
