"""
Entanglement projected entropy (EPE) of a mixed Gaussian state.

The entropy of ``A`` is split into channels, the eigenmodes ``chi_q`` of
``C_A`` with eigenvalues ``lambda_q``. Each channel carries ``s(lambda_q)`` and a
directional weight

    w_q = |C_BA chi_q|^2 / (1 - lambda_q^2),

the fraction of its purification partner living in the physical region ``B``.
Then ``E_B(A) = sum_q w_q s(lambda_q)``, equivalently

    E_B(A) = Tr_A[K_AB s(C_A) / (1 - C_A^2)],   K_AB = C_AB C_BA,

restricted to the entangled subspace ``1 - lambda_q^2 >= tau``. Both forms are
evaluated here through the spectrum of ``C_A``; no inverse of ``1 - C_A^2`` is
ever formed.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import List, Optional, Sequence

import numpy as np

from .errors import NumericalError, RegionError, ValidationError
from .gaussian import RegionLike, _as_matrix, as_region, binary_entropy, Region

__all__ = [
    "ChannelSet",
    "DEFAULT_TAU",
    "channel_decomposition",
    "channel_weights",
    "epe",
    "epe_by_regions",
    "epe_channel_sum",
    "epe_trace",
]

# cutoff on 1 - lambda^2: below it a channel is treated as locally pure
DEFAULT_TAU = 1e-12
WEIGHT_SLACK = 1e-9
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class ChannelSet:
    """
    Eigen-channels of ``C_A``.

    Attributes
    ----------
    lambdas : ndarray (m,)
        Eigenvalues of ``C_A``, ascending.
    modes : ndarray (m, m)
        Orthonormal eigenvectors as columns.
    entropies : ndarray (m,)
        ``s(lambda_q)``; zero on masked channels.
    entangled : ndarray of bool (m,)
        ``1 - lambda_q^2 >= tau``.
    weights : ndarray (m,) or None
        Directional weights once :func:`channel_weights` has run.
    region : Region
        The subsystem ``A`` the channels live on.
    """

    lambdas: np.ndarray
    modes: np.ndarray
    entropies: np.ndarray
    entangled: np.ndarray
    region: Region
    tau: float = DEFAULT_TAU
    weights: Optional[np.ndarray] = None

    def __len__(self):
        return self.lambdas.shape[0]

    @property
    def variances(self) -> np.ndarray:
        """``1 - lambda_q^2``, computed as ``(1 - l)(1 + l)``."""
        return (1.0 - self.lambdas) * (1.0 + self.lambdas)

    def degenerate_groups(self, tol: float = 1e-9) -> List[np.ndarray]:
        """Index groups of (numerically) degenerate eigenvalues."""
        if len(self) == 0:
            return []
        breaks = np.nonzero(np.diff(self.lambdas) > tol)[0] + 1
        return np.split(np.arange(len(self)), breaks)


def channel_decomposition(C, A: RegionLike, tau: float = DEFAULT_TAU) -> ChannelSet:
    """Full eigensystem of ``C_A`` with the locally pure channels masked out."""
    if not 0 < tau <= 1e-6:
        raise ValidationError(f"tau must lie in (0, 1e-6], got {tau}")
    m = _as_matrix(C)
    A = as_region(A).check(m.shape[0])
    idx = A.array
    block = m[np.ix_(idx, idx)]
    if block.size:
        lam, vecs = np.linalg.eigh(block)
    else:
        lam, vecs = np.zeros(0), np.zeros((0, 0), dtype=m.dtype)
    if lam.size and np.max(np.abs(lam)) > 1 + 1e-10:
        raise ValidationError("eigenvalue of C_A outside [-1, 1]")
    lam = np.clip(lam, -1.0, 1.0)
    entangled = (1.0 - lam) * (1.0 + lam) >= tau
    s = np.where(entangled, binary_entropy(lam), 0.0)
    return ChannelSet(lam, vecs, s, entangled, A, tau)


def _weight_tolerance(variances: np.ndarray, scale: float) -> np.ndarray:
    # w has absolute roundoff ~ eps * scale^2 / (1 - lambda^2); tolerate that plus slack
    return WEIGHT_SLACK + 64 * _EPS * scale**2 / np.maximum(variances, _EPS)


def channel_weights(C, A: RegionLike, B: RegionLike, channels: ChannelSet) -> ChannelSet:
    """
    Directional weights of every entangled channel toward ``B``.

    Raises
    ------
    NumericalError
        If a weight leaves ``[0, 1]`` by more than roundoff; that signals a
        covariance matrix that is not a physical state.
    """
    m = _as_matrix(C)
    A = as_region(A).check(m.shape[0])
    B = as_region(B).check(m.shape[0])
    if A != channels.region:
        raise RegionError("channels were computed for a different region A")
    if not A.isdisjoint(B):
        raise RegionError("A and B must be disjoint")
    C_BA = m[np.ix_(B.array, A.array)]
    w = np.zeros(len(channels))
    ent = channels.entangled
    if np.any(ent) and len(B):
        proj = C_BA @ channels.modes[:, ent]
        num = np.sum(np.abs(proj) ** 2, axis=0)
        var = channels.variances[ent]
        wq = num / var
        tol = _weight_tolerance(var, max(1.0, float(np.max(np.abs(m)))))
        bad = (wq < -tol) | (wq > 1 + tol)
        if np.any(bad):
            raise NumericalError(
                f"directional weight {wq[bad][0]:.6g} outside [0, 1]; covariance matrix is unphysical"
            )
        w[ent] = np.clip(wq, 0.0, 1.0)
    return replace(channels, weights=w)


def epe_channel_sum(channels: ChannelSet) -> float:
    """``sum_q w_q s(lambda_q)`` over entangled channels."""
    if channels.weights is None:
        raise ValidationError("channel weights are unset; call channel_weights first")
    ent = channels.entangled
    return float(np.dot(channels.weights[ent], channels.entropies[ent]))


def epe_trace(C, A: RegionLike, B: RegionLike, tau: float = DEFAULT_TAU) -> float:
    """
    EPE from the trace formula ``Tr_A[K_AB W_A]``.

    ``W_A = s(C_A)/(1 - C_A^2)`` is assembled in the eigenbasis of ``C_A`` with
    zero on channels where ``1 - lambda^2 < tau``; the trace is then contracted
    elementwise against ``K_AB = C_AB C_AB^dag``.
    """
    if not 0 < tau <= 1e-6:
        raise ValidationError(f"tau must lie in (0, 1e-6], got {tau}")
    m = _as_matrix(C)
    A = as_region(A).check(m.shape[0])
    B = as_region(B).check(m.shape[0])
    if not A.isdisjoint(B):
        raise RegionError("A and B must be disjoint")
    if len(A) == 0 or len(B) == 0:
        return 0.0
    ia, ib = A.array, B.array
    C_A = m[np.ix_(ia, ia)]
    C_AB = m[np.ix_(ia, ib)]
    lam, X = np.linalg.eigh(C_A)
    lam = np.clip(lam, -1.0, 1.0)
    var = (1.0 - lam) * (1.0 + lam)
    keep = var >= tau
    if not np.any(keep):
        return 0.0
    f = binary_entropy(lam[keep]) / var[keep]
    Xk = X[:, keep]
    W = (Xk * f) @ Xk.conj().T
    K = C_AB @ C_AB.conj().T
    value = float(np.real(np.sum(K * W.T)))
    return max(value, 0.0) if value > -1e-12 else value


def epe(C, A: RegionLike, B: Optional[RegionLike] = None, tau: float = DEFAULT_TAU) -> float:
    """EPE of ``A`` toward ``B``; ``B`` defaults to the full complement of ``A``."""
    m = _as_matrix(C)
    A = as_region(A)
    if B is None:
        B = A.complement(m.shape[0])
    return epe_trace(m, A, B, tau)


def epe_by_regions(
    C, A: RegionLike, parts: Sequence[RegionLike], tau: float = DEFAULT_TAU
) -> List[float]:
    """
    Per-part EPE for pairwise disjoint complement regions.

    The channel decomposition of ``A`` is shared by all parts, which is what
    makes the values add up to the EPE toward their union.
    """
    m = _as_matrix(C)
    A = as_region(A).check(m.shape[0])
    parts = [as_region(p).check(m.shape[0]) for p in parts]
    seen = set(A.indices)
    for p in parts:
        if not seen.isdisjoint(p.indices):
            raise RegionError("regions overlap")
        seen |= set(p.indices)
    ch = channel_decomposition(m, A, tau)
    ent = ch.entangled
    if not np.any(ent):
        return [0.0] * len(parts)
    f = ch.entropies[ent] / ch.variances[ent]
    modes = ch.modes[:, ent]
    out = []
    for p in parts:
        if len(p) == 0:
            out.append(0.0)
            continue
        proj = m[np.ix_(p.array, A.array)] @ modes
        out.append(float(np.dot(np.sum(np.abs(proj) ** 2, axis=0), f)))
    return out
