"""
Dense symmetric eigensolver (cyclic Jacobi) and dominant-eigenvalue power iteration.

The Jacobi sweep visits every off-diagonal pair once per sweep in round-robin order:
each round is a set of disjoint (p, q) pairs whose rotations commute, so a round is
applied as a handful of vectorized row/column updates.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from config.settings import (
    SYMMETRY_TOL, JACOBI_TOL, JACOBI_MAX_SWEEPS, TAU_LIMIT,
    POWER_SEED, POWER_TOL, POWER_MAX_ITERS,
)
from core.errors import ConvergenceError, NonSymmetricError, InputError
from utils.logger import get_logger

Logger = get_logger()


@dataclass
class EigenResult:
    """
    eigenvalues: ascending.
    residual: max_i ||A v_i - lambda_i v_i||_inf when eigenvectors were requested,
              otherwise the final off-diagonal Frobenius norm (an eigenvalue error bound).
    """
    eigenvalues: np.ndarray
    residual: float
    sweeps: int
    eigenvectors: Optional[np.ndarray] = None


def as_symmetric(m, tol=SYMMETRY_TOL):
    """Copy m to a float matrix after checking it is square and symmetric within tol."""
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InputError(f"Expected a square matrix, got shape {a.shape}")
    if a.shape[0] == 0:
        raise InputError("Matrix order must be >= 1")
    asym = float(np.max(np.abs(a - a.T)))
    if asym > tol:
        raise NonSymmetricError(f"Matrix asymmetry {asym:.3e} exceeds {tol:.0e}")
    return a


@lru_cache(maxsize=512)
def _round_robin(n):
    """
    Round-robin schedule over index pairs: n-1 rounds (n padded to even), each a set of
    disjoint pairs, together covering every p < q exactly once.
    """
    size = n + (n % 2)
    players = list(range(size))
    rounds = []
    for _ in range(size - 1):
        pairs = []
        for i in range(size // 2):
            p, q = players[i], players[size - 1 - i]
            if p < n and q < n:
                pairs.append((min(p, q), max(p, q)))
        if pairs:
            rounds.append((
                np.array([p for p, _ in pairs], dtype=np.int64),
                np.array([q for _, q in pairs], dtype=np.int64),
            ))
        players = [players[0], players[-1]] + players[1:-1]
    return tuple(rounds)


def _off_norm(a):
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def _rotations(a, p, q):
    """Jacobi (c, s) per pair, zeroing a[p, q]."""
    app = a[p, p]
    aqq = a[q, q]
    apq = a[p, q]
    nonzero = apq != 0.0
    safe = np.where(nonzero, apq, 1.0)
    with np.errstate(over='ignore'):
        tau = (aqq - app) / (2.0 * safe)
    sign = np.where(tau >= 0.0, 1.0, -1.0)
    big = np.abs(tau) > TAU_LIMIT
    tame = np.where(big, 0.0, tau)
    # |tau| large: t = sign / (|tau| + sqrt(1 + tau^2)) ~ 1 / (2 tau)
    t = np.where(big, 0.5 / np.where(big, tau, 1.0),
                 sign / (np.abs(tame) + np.sqrt(1.0 + tame * tame)))
    t = np.where(nonzero, t, 0.0)
    c = 1.0 / np.sqrt(1.0 + t * t)
    return c, t * c


def eigs_symmetric(m, tol=JACOBI_TOL, max_sweeps=JACOBI_MAX_SWEEPS, vectors=False):
    """
    All eigenvalues (ascending) of a real symmetric matrix by cyclic Jacobi rotations.

    Converges when the off-diagonal Frobenius norm drops below tol * ||A||_F.

    Raises:
        NonSymmetricError: asymmetry beyond SYMMETRY_TOL
        ConvergenceError: sweep budget exhausted
    """
    a = as_symmetric(m)
    original = a.copy() if vectors else None
    n = a.shape[0]
    norm = float(np.linalg.norm(a))
    v = np.eye(n) if vectors else None
    rounds = _round_robin(n)

    sweeps = 0
    off = _off_norm(a)
    while not (off == 0.0 or off < tol * norm):
        if sweeps >= max_sweeps:
            raise ConvergenceError('Jacobi eigensolver', max_sweeps, f"off-diagonal norm {off:.3e}")
        for p, q in rounds:
            c, s = _rotations(a, p, q)
            col_p = a[:, p].copy()
            col_q = a[:, q].copy()
            a[:, p] = col_p * c - col_q * s
            a[:, q] = col_p * s + col_q * c
            row_p = a[p, :].copy()
            row_q = a[q, :].copy()
            a[p, :] = c[:, None] * row_p - s[:, None] * row_q
            a[q, :] = s[:, None] * row_p + c[:, None] * row_q
            a[p, q] = 0.0
            a[q, p] = 0.0
            if vectors:
                vec_p = v[:, p].copy()
                vec_q = v[:, q].copy()
                v[:, p] = vec_p * c - vec_q * s
                v[:, q] = vec_p * s + vec_q * c
        sweeps += 1
        off = _off_norm(a)

    values = np.diag(a).copy()
    order = np.argsort(values, kind='stable')
    values = values[order]
    Logger.debug(f"Jacobi n={n} converged in {sweeps} sweeps")

    if not vectors:
        return EigenResult(eigenvalues=values, residual=off, sweeps=sweeps)

    v = v[:, order]
    residual = float(np.max(np.abs(original @ v - v * values))) if n else 0.0
    return EigenResult(eigenvalues=values, residual=residual, sweeps=sweeps, eigenvectors=v)


@lru_cache(maxsize=256)
def _start_vector(n, seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n)
    x /= np.linalg.norm(x)
    x.setflags(write=False)
    return x


def power_iteration_lambda_max(m, tol=POWER_TOL, max_iters=POWER_MAX_ITERS, seed=POWER_SEED):
    """
    Dominant eigenvalue of a positive semidefinite matrix (dense ndarray or scipy sparse).

    Rayleigh quotients of the normalized iterates are compared between steps. Stops when
    |lambda_k - lambda_(k-1)| < tol and the residual ||M x - lambda_k x||_2 < tol, so the
    returned value is within tol of an eigenvalue. Only the value is returned, so a
    repeated dominant eigenvalue is fine.

    Returns:
        (lambda_max, iterations)
    Raises:
        ConvergenceError: max_iters reached
    """
    if isinstance(m, np.ndarray):
        m = as_symmetric(m)
    n = m.shape[0]
    if n == 0:
        raise InputError("Matrix order must be >= 1")

    x = _start_vector(n, seed)
    previous = None
    residual = math.inf
    for k in range(1, max_iters + 1):
        y = m @ x
        lam = float(x @ y)
        y_norm = float(np.linalg.norm(y))
        if y_norm == 0.0:
            # start vector in the null space of a PSD matrix: the matrix is zero
            return 0.0, k
        residual = float(np.linalg.norm(y - lam * x))
        x = y / y_norm
        if previous is not None and abs(lam - previous) < tol and residual < tol:
            return lam, k
        previous = lam

    raise ConvergenceError('power iteration', max_iters, f"n={n}, residual {residual:.3e}")
