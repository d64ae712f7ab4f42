"""Alternating least squares for complex CP models of qubit states.

Numerical evidence only: a small residual shows a rank-R approximation exists
at that precision, a large one proves nothing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, ResourceError
from .statevec import StateVector

MAX_QUBITS = 16
MONOTONE_SLACK = 1e-14


@dataclass(frozen=True)
class AlsConfig:
    rank: int
    max_iters: int = 3000
    restarts: int = 10
    seed: int = 0
    tol: float = 1e-10
    reg: float = 1e-12
    divergence: float = 1e6
    target: float = 1e-13
    stop_below: float | None = None

    def __post_init__(self):
        if self.rank < 1:
            raise InputError("rank must be >= 1")
        if self.tol <= 0:
            raise InputError("tol must be positive")
        if self.reg < 0:
            raise InputError("regularization must be >= 0")
        if self.restarts < 1 or self.max_iters < 0:
            raise InputError("restarts must be >= 1 and max_iters >= 0")


@dataclass
class AlsResult:
    rank: int
    best_residual: float
    residuals: list[float]
    iterations: list[int]
    max_term_norm: float
    converged: bool
    diverged: bool
    failed: int
    reg: float
    trajectory: list[float] = field(repr=False)
    factors: list[np.ndarray] | None = field(default=None, repr=False)

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "residual": self.best_residual,
            "restart_residuals": self.residuals,
            "iterations": self.iterations,
            "max_term_norm": self.max_term_norm,
            "converged": self.converged,
            "diverged": self.diverged,
            "failed_restarts": self.failed,
            "regularization": self.reg,
            "label": "evidence",
        }


def _target_tensor(psi) -> np.ndarray:
    arr = psi.to_numpy() if isinstance(psi, StateVector) else np.asarray(psi, dtype=np.complex128).ravel()
    n = arr.size.bit_length() - 1
    if arr.size != 1 << n or n < 1:
        raise InputError("state length must be a power of two")
    if n > MAX_QUBITS:
        raise ResourceError(f"{n} qubits exceeds the dense limit of {MAX_QUBITS}")
    if not np.any(arr):
        raise InputError("zero state")
    return arr.reshape((2,) * n)


def _khatri_rao(mats: list[np.ndarray]) -> np.ndarray:
    """Row index runs over the tensor indices of ``mats`` with the first matrix
    most significant."""
    R = mats[0].shape[1]
    out = np.ones((1, R), dtype=np.complex128)
    for A in mats:
        out = (out[:, None, :] * A[None, :, :]).reshape(-1, R)
    return out


def model(factors: list[np.ndarray]) -> np.ndarray:
    return _khatri_rao(factors).sum(axis=1)


def residual(T: np.ndarray, factors: list[np.ndarray]) -> float:
    flat = T.ravel()
    return float(np.linalg.norm(flat - model(factors)) / np.linalg.norm(flat))


def term_norms(factors: list[np.ndarray]) -> np.ndarray:
    norms = np.ones(factors[0].shape[1])
    for A in factors:
        norms = norms * np.linalg.norm(A, axis=0)
    return norms


def _balance(factors: list[np.ndarray]) -> list[np.ndarray]:
    """Give every column of a term the same norm without changing the model."""
    norms = np.stack([np.linalg.norm(A, axis=0) for A in factors])
    alive = np.all(norms > 0, axis=0)
    if not np.any(alive):
        return factors
    geo = np.ones(norms.shape[1])
    geo[alive] = np.exp(np.log(norms[:, alive]).mean(axis=0))
    out = []
    for A, nrm in zip(factors, norms):
        scale = np.ones_like(nrm)
        scale[alive] = geo[alive] / nrm[alive]
        out.append(A * scale)
    return out


def random_factors(n: int, rank: int, rng: np.random.Generator) -> list[np.ndarray]:
    mats = []
    for _ in range(n):
        A = rng.standard_normal((2, rank)) + 1j * rng.standard_normal((2, rank))
        mats.append(A / np.linalg.norm(A, axis=0))
    return mats


def _unfold(T: np.ndarray, q: int) -> np.ndarray:
    return np.moveaxis(T, q, 0).reshape(2, -1)


def _update_mode(T, factors, q, reg):
    others = [A for p, A in enumerate(factors) if p != q]
    K = _khatri_rao(others)
    M = _unfold(T, q) @ K.conj()
    V = np.ones((K.shape[1], K.shape[1]), dtype=np.complex128)
    for A in others:
        V = V * (A.T @ A.conj())
    # A_q V = M, V hermitian
    regularized = np.linalg.solve(V.T + reg * np.eye(V.shape[0]), M.T).T
    exact = M @ np.linalg.pinv(V)
    return regularized, exact


def _sweep(T, factors, reg, current):
    for q in range(len(factors)):
        regularized, exact = _update_mode(T, factors, q, reg)
        trial = factors[:q] + [regularized] + factors[q + 1:]
        r = residual(T, trial)
        if not np.isfinite(r) or r > current + MONOTONE_SLACK:
            trial = factors[:q] + [exact] + factors[q + 1:]
            r2 = residual(T, trial)
            if np.isfinite(r2) and r2 <= current + MONOTONE_SLACK:
                r = r2
            else:
                continue
        factors, current = trial, r
    return _balance(factors), current


def _run(T, factors, cfg: AlsConfig):
    r = residual(T, factors)
    traj = [r]
    iters = 0
    converged = r < cfg.target
    while not converged and iters < cfg.max_iters:
        factors, r_new = _sweep(T, factors, cfg.reg, r)
        iters += 1
        traj.append(r_new)
        if not np.isfinite(r_new):
            break
        if r_new < cfg.target or r - r_new < cfg.tol * max(r, 1e-300):
            converged = True
        r = r_new
    return factors, traj, iters, converged


def als_fit(psi, cfg: AlsConfig, init: list[np.ndarray] | None = None) -> AlsResult:
    """Fit ``cfg.rank`` rank-one terms to ``psi``.

    With ``init`` the first restart starts from the given factor matrices
    (shape (2, R) each); the remaining restarts are random.  Restart ``k``
    draws from the ``k``-th child of ``SeedSequence(cfg.seed)``.
    """
    T = _target_tensor(psi)
    n = T.ndim
    if init is not None:
        init = [np.array(A, dtype=np.complex128) for A in init]
        if len(init) != n or any(A.shape != (2, cfg.rank) for A in init):
            raise InputError(f"init must be {n} matrices of shape (2, {cfg.rank})")
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    best = None
    residuals, iterations = [], []
    failed = 0
    for k in range(cfg.restarts):
        if k == 0 and init is not None:
            start = _balance(init)
        else:
            start = random_factors(n, cfg.rank, np.random.default_rng(seeds[k]))
        with np.errstate(all="ignore"):
            try:
                factors, traj, iters, conv = _run(T, start, cfg)
            except np.linalg.LinAlgError:
                factors, traj, iters, conv = start, [float("inf")], 0, False
        r = traj[-1]
        if not np.isfinite(r):
            failed += 1
            r = float("inf")
        residuals.append(r)
        iterations.append(iters)
        if best is None or r < best[0]:
            best = (r, factors, traj, conv)
        if cfg.stop_below is not None and r < cfg.stop_below:
            break
    r, factors, traj, conv = best
    max_norm = float(np.max(term_norms(factors))) if np.isfinite(r) else float("inf")
    return AlsResult(
        rank=cfg.rank,
        best_residual=r,
        residuals=residuals,
        iterations=iterations,
        max_term_norm=max_norm,
        converged=conv,
        diverged=max_norm > cfg.divergence,
        failed=failed,
        reg=cfg.reg,
        trajectory=traj,
        factors=factors,
    )


@dataclass(frozen=True)
class SweepRow:
    rank: int
    residual: float
    iterations: int
    diverged: bool
    max_term_norm: float

    def to_json(self) -> dict:
        return {
            "R": self.rank,
            "residual": self.residual,
            "iterations": self.iterations,
            "diverged": self.diverged,
            "max_term_norm": self.max_term_norm,
        }


def rank_sweep(psi, r_min: int, r_max: int, cfg: AlsConfig) -> list[SweepRow]:
    """Best residual for each rank in ``r_min..r_max``.

    Each rank after the first also runs from the previous best fit with one
    extra term that starts at zero (zero in the first qubit's factor, random
    elsewhere), so the reported residuals never increase with R.
    """
    if r_min < 1 or r_max < r_min:
        raise InputError("need 1 <= r_min <= r_max")
    T = _target_tensor(psi)
    rows = []
    prev = None
    for R in range(r_min, r_max + 1):
        sub = AlsConfig(R, cfg.max_iters, cfg.restarts, cfg.seed + R, cfg.tol, cfg.reg,
                        cfg.divergence, cfg.target, cfg.stop_below)
        init = None
        if prev is not None and prev.factors is not None and np.isfinite(prev.best_residual):
            rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, R]))
            extra = random_factors(T.ndim, 1, rng)
            extra[0] = np.zeros((2, 1), dtype=np.complex128)
            init = [np.concatenate([A, B], axis=1) for A, B in zip(prev.factors, extra)]
        res = als_fit(T, sub, init=init)
        rows.append(SweepRow(R, res.best_residual, sum(res.iterations), res.diverged, res.max_term_norm))
        prev = res
    return rows
