"""Independent reference implementations used only to check the library.

Everything here is deliberately written from first principles (truncated
series, eigen-decompositions, exhaustive enumeration) so the production
code paths and the checks never share an algorithm.
"""
from __future__ import annotations

import numpy as np


def expm_series(M: np.ndarray, tol: float = 1e-30, max_terms: int = 300) -> np.ndarray:
    """Matrix exponential by the plain Taylor series (small-norm oracle)."""
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    acc = np.eye(n)
    term = np.eye(n)
    for k in range(1, max_terms):
        term = term @ M / k
        acc = acc + term
        if np.linalg.norm(term) < tol * max(1.0, np.linalg.norm(acc)):
            break
    return acc


def care_hamiltonian(A, B, Q, R) -> np.ndarray:
    """Stabilizing CARE solution from the stable invariant subspace of the
    Hamiltonian matrix [[A, -B R^-1 B'], [-Q, -A']]."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    Q = np.asarray(Q, dtype=float)
    R = np.atleast_2d(np.asarray(R, dtype=float))
    n = A.shape[0]
    H = np.block([
        [A, -B @ np.linalg.solve(R, B.T)],
        [-Q, -A.T],
    ])
    w, V = np.linalg.eig(H)
    stable = np.argsort(w.real)[:n]
    Vs = V[:, stable]
    X1, X2 = Vs[:n, :], Vs[n:, :]
    P = np.real(X2 @ np.linalg.inv(X1))
    return 0.5 * (P + P.T)


def care_newton(A, B, Q, R, P0=None, iters: int = 60) -> np.ndarray:
    """Newton-Kleinman iteration: repeated Lyapunov solves starting from a
    stabilizing guess (default: the Hamiltonian solution, perturbed)."""
    from scipy.linalg import solve_lyapunov

    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    Q = np.asarray(Q, dtype=float)
    R = np.atleast_2d(np.asarray(R, dtype=float))
    if P0 is None:
        P0 = care_hamiltonian(A, B, Q, R)
        P0 = P0 + 1e-3 * np.eye(A.shape[0])
    P = P0
    for _ in range(iters):
        K = np.linalg.solve(R, B.T @ P)
        Ac = A - B @ K
        rhs = -(Q + K.T @ R @ K)
        P_new = solve_lyapunov(Ac.T, rhs)
        P_new = 0.5 * (P_new + P_new.T)
        if np.linalg.norm(P_new - P) <= 1e-12 * max(1.0, np.linalg.norm(P)):
            P = P_new
            break
        P = P_new
    return P


def brute_force_fronts(objectives: np.ndarray) -> list[list[int]]:
    """Exhaustive O(n^2 * fronts) non-dominated peeling (weak dominance)."""
    F = np.asarray(objectives, dtype=float)
    remaining = list(range(F.shape[0]))
    fronts: list[list[int]] = []
    while remaining:
        front = []
        for i in remaining:
            dominated = False
            for j in remaining:
                if i == j:
                    continue
                if np.all(F[j] <= F[i]) and np.any(F[j] < F[i]):
                    dominated = True
                    break
            if not dominated:
                front.append(i)
        fronts.append(front)
        remaining = [i for i in remaining if i not in set(front)]
    return fronts


def power_step_response(K: float, L: float, T: float, t: np.ndarray) -> np.ndarray:
    """Closed-form first-order-plus-delay unit step response (alpha = 1)."""
    t = np.asarray(t, dtype=float)
    return np.where(t >= L, K * (1.0 - np.exp(-(np.maximum(t - L, 0.0)) / T)), 0.0)


def stabilizability_margin(A: np.ndarray, B: np.ndarray) -> float:
    """Smallest PBH singular value over the closed-right-half-plane modes
    (inf when A is already Hurwitz)."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    n = A.shape[0]
    worst = np.inf
    for lam in np.linalg.eigvals(A):
        if lam.real < 0:
            continue
        s = np.linalg.svd(np.hstack([A - lam * np.eye(n), B]), compute_uv=False)[-1]
        worst = min(worst, float(s))
    return worst


def random_stabilizable(rng, n: int, m: int = 1, min_margin: float = 0.1):
    """Normalized Ginibre state matrix with a comfortably stabilizable
    input map.  Unfiltered Gaussian draws occasionally carry strongly
    unstable, barely controllable modes whose Riccati solutions grow so
    large that no double-precision solver can certify an absolute residual
    bound; those tails are excluded by the margin filter."""
    while True:
        A = rng.standard_normal((n, n)) / np.sqrt(n)
        B = rng.standard_normal((n, m))
        if stabilizability_margin(A, B) >= min_margin:
            return A, B
