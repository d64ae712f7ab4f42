"""Canonical polyadic decompositions of qubit states.

A decomposition is a list of rank-one terms ``weight * f_0 (x) ... (x) f_{n-1}``
with exact weights and exact single-qubit factors.  The generators here build
minimal-size decompositions of line and odd-ring graph states and every one of
them is checked against the dense state in exact arithmetic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InputError, ResourceError
from .exact import INV_SQRT2, OMEGA, ONE, ExactAmplitude, ExactVector, _mul4, kron_all
from .graph import (
    MAX_VERTICES,
    Bipartition,
    Graph,
    all_cuts,
    cut_rank,
    is_odd_ring,
    is_ring,
    lc_orbit,
    min_vertex_cover,
    ring,
)
from .statevec import (
    NAMED_KETS,
    RANK_TOL,
    StateVector,
    build_graph_state,
    expand_over_subset,
    flattening_rank,
    product_state,
    reduced_density,
)

MEMBERSHIP_TOL = 1e-10
EXHAUSTIVE_CUT_LIMIT = 16
SAMPLED_CUTS = 4096
DEFAULT_ORBIT_CAP = 10000


@dataclass(frozen=True, eq=False)
class Term:
    weight: ExactAmplitude
    factors: tuple[ExactVector, ...]

    def vector(self) -> ExactVector:
        return kron_all(self.factors) * self.weight

    def labels(self) -> str | None:
        """Ket labels when every factor is one of the named kets, else None."""
        out = []
        for f in self.factors:
            for name, v in NAMED_KETS.items():
                if f == v:
                    out.append(name)
                    break
            else:
                return None
        return "".join(out)


def term(weight, labels: str) -> Term:
    """Rank-one term from ket labels such as ``"+0-1"``."""
    try:
        factors = tuple(NAMED_KETS[ch] for ch in labels)
    except KeyError as exc:
        raise InputError(f"unknown ket label {exc.args[0]!r}") from None
    return Term(ExactAmplitude.coerce(weight), factors)


@dataclass(frozen=True, eq=False)
class CPDecomposition:
    n: int
    terms: tuple[Term, ...]

    def __post_init__(self):
        for t in self.terms:
            if len(t.factors) != self.n:
                raise InputError(f"term has {len(t.factors)} factors, expected {self.n}")
            for f in t.factors:
                if len(f) != 2:
                    raise InputError("factors must be single-qubit 2-vectors")
                if f.is_zero():
                    raise InputError("zero factor in decomposition")

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: CPDecomposition) -> CPDecomposition:
        if other.n != self.n:
            raise InputError("qubit counts differ")
        return CPDecomposition(self.n, self.terms + other.terms)

    def scale(self, s) -> CPDecomposition:
        s = ExactAmplitude.coerce(s)
        return CPDecomposition(self.n, tuple(Term(t.weight * s, t.factors) for t in self.terms))

    def map_factor(self, q: int, fn) -> CPDecomposition:
        """Apply ``fn`` to the factor on qubit ``q`` of every term."""
        terms = []
        for t in self.terms:
            fs = list(t.factors)
            fs[q] = fn(fs[q])
            terms.append(Term(t.weight, tuple(fs)))
        return CPDecomposition(self.n, tuple(terms))

    def append_qubit(self, factor: ExactVector) -> CPDecomposition:
        return CPDecomposition(self.n + 1, tuple(Term(t.weight, t.factors + (factor,)) for t in self.terms))


def from_labels(pairs: Sequence[tuple[object, str]]) -> CPDecomposition:
    terms = tuple(term(w, lab) for w, lab in pairs)
    if not terms:
        raise InputError("empty decomposition")
    return CPDecomposition(len(terms[0].factors), terms)


def _z(f: ExactVector) -> ExactVector:
    return f.flip_signs(np.array([0, 1], dtype=np.uint8))


_INT64_ROOM = 1 << 61


def _stacked(items, width: int):
    """Component arrays of shape (len(items), width) over a shared power of
    two, or None when the rescaling leaves the int64 range."""
    k = max(x.k for x in items)
    if k - min(x.k for x in items) >= 30:
        return None
    parts = []
    for name in "abcd":
        rows = [np.broadcast_to(np.asarray(getattr(x, name)), (width,)) * (1 << (k - x.k)) for x in items]
        block = np.stack(rows)
        if block.dtype == object:
            return None
        parts.append(block)
    return parts, k


def _fits(parts) -> int:
    return max(int(np.abs(p).max()) for p in parts)


def _reconstruct_batched(D: CPDecomposition) -> ExactVector | None:
    """All terms at once in int64; None when the magnitudes could overflow."""
    R = len(D.terms)
    stacked = _stacked([t.weight for t in D.terms], 1)
    if stacked is None or _fits(stacked[0]) >= _INT64_ROOM:
        return None
    cur, k = stacked
    for q in range(D.n):
        stacked = _stacked([t.factors[q] for t in D.terms], 2)
        if stacked is None:
            return None
        fac, kq = stacked
        if 6 * _fits(cur) * _fits(fac) >= _INT64_ROOM:
            return None
        x = [p[:, :, None] for p in cur]
        y = [p[:, None, :] for p in fac]
        cur = [p.reshape(R, -1) for p in _mul4(x, y)]
        k += kq
    if _fits(cur) * R >= _INT64_ROOM:
        return None
    return ExactVector(*(p.sum(axis=0) for p in cur), k=k)


def reconstruct(D: CPDecomposition) -> StateVector:
    total = _reconstruct_batched(D) if D.terms else None
    if total is None:
        total = ExactVector.zeros(1 << D.n)
        for t in D.terms:
            total = total + t.vector()
    return StateVector(D.n, total)


@dataclass(frozen=True)
class VerifyResult:
    exact: bool
    residual: float

    def __bool__(self) -> bool:
        return self.exact

    def to_json(self) -> dict:
        return {"exact_match": self.exact, "residual": self.residual}


def verify(D: CPDecomposition, target: StateVector) -> VerifyResult:
    if D.n != target.n:
        raise InputError(f"decomposition has {D.n} qubits, target has {target.n}")
    rec = reconstruct(D)
    if rec == target:
        return VerifyResult(True, 0.0)
    return VerifyResult(False, float(np.linalg.norm(rec.to_numpy() - target.to_numpy())))


# -- generators ----------------------------------------------------------

def _check_size(n: int) -> None:
    if n > MAX_VERTICES:
        raise ResourceError(f"{n} qubits exceeds the limit of {MAX_VERTICES}")


def line_cpd(n: int) -> CPDecomposition:
    """2**floor(n/2) terms for the n-qubit line state.

    Qubits with the parity of ``n`` are expanded in the computational basis;
    every other qubit is then |+> or |-> depending on the parity of its set
    neighbors, which reproduces the sign ``prod (-1)**(x_i x_{i+1})``.
    """
    if n < 2:
        raise InputError("line_cpd needs n >= 2")
    _check_size(n)
    comp = [q for q in range(n) if q % 2 == n % 2]
    weight = ONE
    for _ in comp:
        weight = weight * INV_SQRT2
    terms = []
    for code in range(1 << len(comp)):
        x = {q: (code >> (len(comp) - 1 - i)) & 1 for i, q in enumerate(comp)}
        labels = []
        for q in range(n):
            if q in x:
                labels.append(str(x[q]))
            else:
                parity = x.get(q - 1, 0) ^ x.get(q + 1, 0)
                labels.append("-" if parity else "+")
        terms.append(term(weight, "".join(labels)))
    return CPDecomposition(n, tuple(terms))


def phi_split(n: int) -> tuple[CPDecomposition, CPDecomposition]:
    """The two halves of ``P0(first)|L_{2n+1}>`` split by the value of the last qubit.

    Each half has 2**(n-1) terms.  The recursion appends two qubits at a time:
    the previous last qubit becomes |+>/|-> and the new last qubit is fixed.
    """
    if n < 2:
        raise InputError("phi_split needs n >= 2")
    _check_size(2 * n + 1)
    c = ONE * INV_SQRT2 * INV_SQRT2 * INV_SQRT2
    p0 = from_labels([(c, "0+0+0"), (c, "0-1-0")])
    p1 = from_labels([(c, "0+0-1"), (c, "0-1+1")])
    plus, minus = NAMED_KETS["+"], NAMED_KETS["-"]
    zero, one = NAMED_KETS["0"], NAMED_KETS["1"]
    for _ in range(n - 2):
        new0 = (p0.append_qubit(plus) + p1.append_qubit(minus)).append_qubit(zero).scale(INV_SQRT2)
        new1 = (p0.append_qubit(minus) + p1.append_qubit(plus)).append_qubit(one).scale(INV_SQRT2)
        p0, p1 = new0, new1
    return p0, p1


def r3_three_term_cpd() -> CPDecomposition:
    """|R3> = |++-> + (1/sqrt2)|001> - (1/sqrt2)|110>."""
    return from_labels([(ONE, "++-"), (INV_SQRT2, "001"), (-INV_SQRT2, "110")])


def r3_two_term_cpd() -> CPDecomposition:
    """A two-term decomposition of the triangle state.

    With r = (|0>+i|1>)/sqrt2 and l = (|0>-i|1>)/sqrt2,
    |R3> = ((1-i)/2)|rrr> + ((1+i)/2)|lll>.
    """
    return from_labels([
        (ExactAmplitude.from_triple(1, -1, 2), "rrr"),
        (ExactAmplitude.from_triple(1, 1, 2), "lll"),
    ])


def ring_cpd(m: int) -> CPDecomposition:
    """3 * 2**(n-1) terms for the odd ring with m = 2n+1 vertices (3 for m=3).

    Closing the ring adds one CZ between the first and last qubit, which acts
    as ``Z(last) + 2 P0(first) P1(last)`` on the line state.  The first part
    reuses :func:`line_cpd`; the second is the P1 half of :func:`phi_split`.
    """
    if m < 3 or m % 2 == 0:
        raise InputError(f"ring_cpd needs an odd m >= 3, got {m}")
    _check_size(m)
    if m == 3:
        return r3_three_term_cpd()
    n = (m - 1) // 2
    head = line_cpd(m).map_factor(m - 1, _z)
    _, p1 = phi_split(n)
    return head + p1.scale(2)


def r7_explicit_cpd(corrected: bool = True) -> CPDecomposition:
    """The explicit 12-term expression for the 7-qubit ring.

    As printed, the first eight terms are the plain line state.  Closing the
    ring requires a Z on the last qubit of those terms; ``corrected=False``
    returns the transcription without it.
    """
    line_terms = [
        "+0+0+0+", "+0+0-1-", "+0-1-0+", "+0-1+1-",
        "-1-0+0+", "-1-0-1-", "-1+1-0+", "-1+1+1-",
    ]
    if corrected:
        line_terms = [s[:-1] + {"+": "-", "-": "+"}[s[-1]] for s in line_terms]
    c = ONE * INV_SQRT2 * INV_SQRT2 * INV_SQRT2
    half = ONE * INV_SQRT2 * INV_SQRT2
    tail = ["0+0+0-1", "0-1-0-1", "0+0-1+1", "0-1+1+1"]
    return from_labels([(c, s) for s in line_terms] + [(half, s) for s in tail])


def canonical_terms(D: CPDecomposition) -> list[tuple]:
    """Order-insensitive fingerprint: sorted exact term vectors."""
    return sorted(t.vector().key() for t in D.terms)


def same_terms(D1: CPDecomposition, D2: CPDecomposition) -> bool:
    return D1.n == D2.n and canonical_terms(D1) == canonical_terms(D2)


# -- serialization -------------------------------------------------------

def cpd_to_json(D: CPDecomposition) -> dict:
    return {
        "n": D.n,
        "terms": [
            {"weight": t.weight.to_json(), "factors": [[x.to_json() for x in f] for f in t.factors]}
            for t in D.terms
        ],
    }


def cpd_from_json(data: dict | str) -> CPDecomposition:
    if isinstance(data, str):
        data = json.loads(data)
    try:
        n = int(data["n"])
        terms = []
        for t in data["terms"]:
            w = ExactAmplitude.coerce(tuple(t["weight"]))
            fs = tuple(ExactVector.from_amplitudes(tuple(x) for x in f) for f in t["factors"])
            terms.append(Term(w, fs))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed decomposition JSON: {exc}") from None
    return CPDecomposition(n, tuple(terms))


def cpd_to_factors(D: CPDecomposition) -> list[np.ndarray]:
    """Floating factor matrices of shape (2, R), weights folded into qubit 0."""
    mats = []
    for q in range(D.n):
        cols = [t.factors[q].to_complex() for t in D.terms]
        mats.append(np.stack(cols, axis=1))
    mats[0] = mats[0] * np.array([complex(t.weight) for t in D.terms])
    return mats


# -- rank bounds ---------------------------------------------------------

@dataclass
class RankBounds:
    lower: int
    upper: int
    lower_witness: object
    upper_witness: object
    exhaustive_cuts: bool = True
    orbit_size: int = 1
    orbit_closed: bool = True
    notes: list[str] = field(default_factory=list)

    @property
    def exact(self) -> bool:
        return self.lower == self.upper

    def to_json(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "exact": self.exact,
            "lower_witness": self.lower_witness,
            "upper_witness": self.upper_witness,
            "exhaustive_cuts": self.exhaustive_cuts,
            "orbit_size": self.orbit_size,
            "orbit_closed": self.orbit_closed,
            "notes": list(self.notes),
        }


def _cuts_for(G: Graph, seed: int):
    if G.n <= EXHAUSTIVE_CUT_LIMIT:
        return all_cuts(G.n), True
    rng = np.random.default_rng(seed)
    masks = set()
    full = (1 << G.n) - 1
    while len(masks) < SAMPLED_CUTS:
        m = int(rng.integers(1, full)) | 1
        if m != full:
            masks.add(m)
    return [Bipartition(G.n, m) for m in sorted(masks)], False


def rank_bounds(G: Graph, orbit_cap: int = DEFAULT_ORBIT_CAP, seed: int = 0) -> RankBounds:
    """Flattening lower bound and vertex-cover upper bound on the CP rank.

    The lower bound is the largest Schmidt rank over cuts; the upper bound the
    smallest ``2**tau`` over the local-complementation orbit.  Odd rings of
    length at least five get the sharper ring bounds.  The triangle is
    locally equivalent to a star, so its rank is 2 and it is left to the
    generic bounds.
    """
    if G.n < 1:
        raise InputError("empty graph")
    notes = []
    cuts, exhaustive = _cuts_for(G, seed)
    lower, lower_cut = 1, None
    for A in cuts:
        r = 1 << cut_rank(G, A)
        if r > lower:
            lower, lower_cut = r, A
    if not exhaustive:
        notes.append(f"lower bound from {len(cuts)} sampled cuts")
    lower_witness = {"kind": "cut", "cut": list(lower_cut.vertices)} if lower_cut else {"kind": "trivial"}

    orbit = lc_orbit(G, cap=orbit_cap)
    best = None
    for H in orbit.graphs:
        size, cover = min_vertex_cover(H)
        if best is None or size < best[0]:
            best = (size, cover, H)
    upper = 1 << best[0]
    upper_witness = {
        "kind": "vertex_cover",
        "cover": sorted(best[1]),
        "orbit_member_edges": [list(e) for e in best[2].edges()],
    }
    if not orbit.closed:
        notes.append(f"orbit truncated at {len(orbit)} graphs")

    if is_odd_ring(G) and G.n >= 5:
        h = (G.n - 1) // 2
        if (1 << h) + 1 > lower:
            lower = (1 << h) + 1
            lower_witness = {"kind": "odd_ring_bound"}
        if 3 << (h - 1) < upper:
            upper = 3 << (h - 1)
            upper_witness = {"kind": "odd_ring_construction", "terms": upper}
    elif is_odd_ring(G):
        notes.append("triangle is locally equivalent to a star; odd-ring refinement not applied")
    if not is_ring(G):
        notes.append("ring refinements apply to cycle graphs only, not to their orbit members")
    return RankBounds(lower, upper, lower_witness, upper_witness, exhaustive, len(orbit), orbit.closed, notes)


# -- support structure ---------------------------------------------------

def _support_basis(psi: StateVector, A: Bipartition) -> np.ndarray:
    rho = reduced_density(psi, A)
    w, v = np.linalg.eigh(rho.matrix)
    return v[:, w > RANK_TOL]


def _residual(Q: np.ndarray, v: np.ndarray) -> float:
    v = v / np.linalg.norm(v)
    return float(np.linalg.norm(v - Q @ (Q.conj().T @ v)))


def support_residuals(D: CPDecomposition, A: Bipartition, psi: StateVector) -> list[float]:
    Q = _support_basis(psi, A)
    comp = A.complement_vertices
    out = []
    for t in D.terms:
        v = kron_all([t.factors[q] for q in comp]).to_complex()
        out.append(_residual(Q, v))
    return out


def support_membership(D: CPDecomposition, A: Bipartition, psi: StateVector) -> list[bool]:
    """Whether each term's complement-side product vector lies in the support of
    the reduced state on the complement of A."""
    if D.n != psi.n:
        raise InputError("decomposition and state sizes differ")
    return [r < MEMBERSHIP_TOL for r in support_residuals(D, A, psi)]


def span_contains_support(D: CPDecomposition, A: Bipartition, psi: StateVector,
                          tol: float = MEMBERSHIP_TOL) -> bool:
    """Whether the complement-side factors of the terms span the support of the
    reduced state on the complement of A."""
    Q = _support_basis(psi, A)
    comp = A.complement_vertices
    F = np.stack([kron_all([t.factors[q] for q in comp]).to_complex() for t in D.terms], axis=1)
    P = F @ np.linalg.pinv(F)
    return bool(np.linalg.norm(Q - P @ Q) < tol * max(1, Q.shape[1]))


@dataclass
class LowerBoundReport:
    n: int
    num_states: int
    orthonormal: bool
    product_in_support: list[bool]
    product_is_product: list[bool]
    combinations_exact: list[bool]
    random_trials: int
    random_entangled: int
    random_off_list: int
    pair_entangled: bool

    @property
    def passed(self) -> bool:
        return (
            self.orthonormal
            and all(self.product_in_support)
            and all(self.product_is_product)
            and all(self.combinations_exact)
            and self.random_entangled == self.random_trials
            and self.random_off_list == self.random_trials
            and self.pair_entangled
        )

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "num_states": self.num_states,
            "orthonormal": self.orthonormal,
            "product_states_in_support": all(self.product_in_support),
            "product_states_are_product": all(self.product_is_product),
            "combinations_exact": all(self.combinations_exact),
            "random_trials": self.random_trials,
            "random_entangled": self.random_entangled,
            "pair_entangled": self.pair_entangled,
            "passed": self.passed,
            "tolerance": MEMBERSHIP_TOL,
        }


def _is_product(vec: np.ndarray, k: int) -> bool:
    for q in range(k):
        if flattening_rank(vec, Bipartition.from_vertices(k, [q])) > 1:
            return False
    return True


def support_product_states(n: int) -> list[tuple[tuple[int, ...], int, StateVector]]:
    """The 2**n product states of the odd-ring support with their exact
    e_z combinations.

    Returns ``(z, sign, state)`` where ``state`` equals
    ``(w e_z + conj(w) e_zbar)/sqrt2`` with ``w = e^{i pi/4}`` for ``sign=+1``
    and ``w = e^{-i pi/4}`` for ``sign=-1``; ``z`` runs over patterns with
    first bit 0.
    """
    out = []
    for code in range(1 << (n - 1)):
        z = (0,) + tuple((code >> (n - 2 - i)) & 1 for i in range(n - 1))
        middle = ["-" if z[j - 1] ^ z[j] else "+" for j in range(1, n)]
        for sign in (1, -1):
            first = "r" if sign == 1 else "l"
            last = first if z[-1] == 0 else ("l" if sign == 1 else "r")
            out.append((z, sign, product_state([first] + middle + [last])))
    return out


def verify_lower_bound_structure(n: int, trials: int = 1000, seed: int = 0) -> LowerBoundReport:
    """Check the support structure of the odd ring with 2n+1 vertices across
    the cut whose A side is the odd-indexed vertices."""
    if not 2 <= n <= 4:
        raise InputError("verify_lower_bound_structure supports 2 <= n <= 4")
    m = 2 * n + 1
    G = ring(m)
    A = Bipartition.from_vertices(m, range(1, m, 2))
    psi = build_graph_state(G)
    e = {z: state for z, _, state in expand_over_subset(G, A)}
    zs = sorted(e)

    ortho = True
    for i, z1 in enumerate(zs):
        for z2 in zs[i:]:
            want = ONE if z1 == z2 else ExactAmplitude(0)
            if e[z1].inner(e[z2]) != want:
                ortho = False

    Q = _support_basis(psi, A)
    products = support_product_states(n)
    in_support, is_product, combos = [], [], []
    listed = []
    for z, sign, state in products:
        vec = state.to_numpy()
        listed.append(vec)
        in_support.append(_residual(Q, vec) < MEMBERSHIP_TOL)
        is_product.append(_is_product(vec, n + 1))
        zbar = tuple(1 - b for b in z)
        w = OMEGA if sign == 1 else OMEGA.conj()
        combo = (e[z].scale(w) + e[zbar].scale(w.conj())).scale(INV_SQRT2)
        combos.append(combo == state)

    E = np.stack([e[z].to_numpy() for z in zs], axis=1)
    L = np.stack(listed, axis=1)
    rng = np.random.default_rng(seed)
    entangled = off_list = 0
    for _ in range(trials):
        c = rng.standard_normal(len(zs)) + 1j * rng.standard_normal(len(zs))
        v = E @ c
        v /= np.linalg.norm(v)
        if np.max(np.abs(L.conj().T @ v)) < 1 - 1e-9:
            off_list += 1
        if not _is_product(v, n + 1):
            entangled += 1

    first_two = Bipartition.from_vertices(n + 1, [0, 1])
    pair_ok = True
    for z1 in zs:
        for z2 in zs:
            if z2 == z1 or z2 == tuple(1 - b for b in z1):
                continue
            v = (e[z1].to_numpy() + e[z2].to_numpy()) / np.sqrt(2)
            if flattening_rank(v, first_two) <= 1:
                pair_ok = False
    return LowerBoundReport(n, len(products), ortho, in_support, is_product, combos,
                            trials, entangled, off_list, pair_ok)
