"""Dense-matrix control mathematics.

Matrix exponential, stabilizing solutions of the continuous algebraic
Riccati equation (CARE), and eigenvalue-based stability diagnostics.  The
heavy lifting is delegated to scipy.linalg; every result is checked against
the contracts below before it is returned, and contract violations raise
:class:`CareFailure` so optimization layers can penalize rather than crash.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

__all__ = [
    "CareFailure",
    "CareProblem",
    "CareSolution",
    "expm",
    "solve_care",
    "spectral_abscissa",
    "is_stabilizable",
]

CARE_RESIDUAL_RTOL = 1e-8
SYMMETRY_RTOL = 1e-10
PSD_ATOL_FACTOR = 1e-8


class CareFailure(Exception):
    """Raised when no stabilizing Riccati solution could be certified."""


def expm(M: np.ndarray) -> np.ndarray:
    """Matrix exponential e**M (scaling-and-squaring accuracy class).

    Exact up to roundoff for nilpotent arguments (the series terminates).
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return linalg.expm(M)


def spectral_abscissa(M: np.ndarray) -> float:
    """Largest real part over the eigenvalues of M."""
    M = np.asarray(M, dtype=float)
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return float(np.max(np.linalg.eigvals(M).real))


def is_stabilizable(A: np.ndarray, B: np.ndarray, rtol: float = 1e-10) -> bool:
    """PBH test: every eigenvalue of A with Re >= 0 must be controllable.

    The rank threshold is relative (``rtol * norm``) because the plant
    family used here has an exact zero eigenvalue that loose absolute
    thresholds would misclassify.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    n = A.shape[0]
    scale = max(np.linalg.norm(A), np.linalg.norm(B), 1.0)
    for lam in np.linalg.eigvals(A):
        if lam.real < 0:
            continue
        pencil = np.hstack([A - lam * np.eye(n), B])
        s = np.linalg.svd(pencil, compute_uv=False)
        if s[-1] <= rtol * scale:
            return False
    return True


@dataclass(frozen=True, eq=False)
class CareProblem:
    """Data of a continuous-time LQR problem: A, B, Q (PSD), R (PD)."""

    A: np.ndarray
    B: np.ndarray
    Q: np.ndarray
    R: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        B = np.asarray(self.B, dtype=float)
        if B.ndim == 1:
            B = B[:, None]
        Q = np.atleast_2d(np.asarray(self.Q, dtype=float))
        R = np.atleast_2d(np.asarray(self.R, dtype=float))
        n = A.shape[0]
        m = B.shape[1]
        if A.shape != (n, n) or B.shape != (n, m):
            raise ValueError(f"inconsistent A/B shapes: {A.shape}, {B.shape}")
        if Q.shape != (n, n) or R.shape != (m, m):
            raise ValueError(f"inconsistent Q/R shapes: {Q.shape}, {R.shape}")
        for name, M in (("A", A), ("B", B), ("Q", Q), ("R", R)):
            if not np.all(np.isfinite(M)):
                raise ValueError(f"{name} has non-finite entries")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "R", R)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]


@dataclass(frozen=True, eq=False)
class CareSolution:
    """Certified stabilizing CARE solution with its feedback gain."""

    P: np.ndarray
    gain: np.ndarray
    residual_norm: float


def solve_care(prob: CareProblem) -> CareSolution:
    """Stabilizing solution P of A'P + PA - P B R^-1 B' P + Q = 0.

    Returns P (symmetric PSD), the gain F = R^-1 B' P and the achieved
    residual norm.  Raises :class:`CareFailure` when the solver does not
    converge or the certified contracts (residual, symmetry, PSD,
    Hurwitz closed loop) do not hold, e.g. for non-stabilizable pairs or
    weight matrices losing detectability.
    """
    A, B, Q, R = prob.A, prob.B, prob.Q, prob.R
    try:
        P = linalg.solve_continuous_are(A, B, Q, R)
    except Exception as exc:  # scipy raises LinAlgError or ValueError
        raise CareFailure(f"Riccati solver failed: {exc}") from exc
    if not np.all(np.isfinite(P)):
        raise CareFailure("Riccati solver returned non-finite entries")

    sym_err = np.linalg.norm(P - P.T)
    if sym_err > SYMMETRY_RTOL * max(1.0, np.linalg.norm(P)):
        raise CareFailure(f"solution not symmetric: |P - P'| = {sym_err:.2e}")
    P = 0.5 * (P + P.T)

    def residual_of(P, gain):
        return float(np.linalg.norm(A.T @ P + P @ A - P @ B @ gain + Q))

    gain = np.linalg.solve(R, B.T @ P)
    if spectral_abscissa(A - B @ gain) >= 0.0:
        raise CareFailure("closed loop not Hurwitz: gain is not stabilizing")
    residual_norm = residual_of(P, gain)
    bound = CARE_RESIDUAL_RTOL * max(1.0, np.linalg.norm(Q))

    # Newton-Kleinman polish: for ill-conditioned problems the direct
    # solver can land above the residual contract; a stabilizing iterate
    # converges quadratically, so a handful of Lyapunov solves suffices.
    for _ in range(5):
        if residual_norm <= bound:
            break
        rhs = -(Q + gain.T @ R @ gain)
        try:
            P = linalg.solve_lyapunov((A - B @ gain).T, rhs)
        except Exception as exc:
            raise CareFailure(f"refinement failed: {exc}") from exc
        P = 0.5 * (P + P.T)
        gain = np.linalg.solve(R, B.T @ P)
        if spectral_abscissa(A - B @ gain) >= 0.0:
            raise CareFailure("refinement lost stabilizability")
        residual_norm = residual_of(P, gain)
    if residual_norm > bound:
        raise CareFailure(f"Riccati residual too large: {residual_norm:.2e}")

    eig_min = float(np.min(np.linalg.eigvalsh(P)))
    if eig_min < -PSD_ATOL_FACTOR * max(1.0, np.linalg.norm(P)):
        raise CareFailure(f"solution not PSD: min eigenvalue {eig_min:.2e}")
    return CareSolution(P=P, gain=gain, residual_norm=residual_norm)
