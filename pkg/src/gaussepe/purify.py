"""
Explicit Gaussian purification, used as a brute-force check on the EPE.

A mixed state ``C = U diag(lambda) U^dag`` on ``N`` modes is embedded into a
pure state on ``S + E`` with ``N`` ancilla modes. Each eigenmode of ``C`` is
paired with one ancilla mode through

    [[lambda, sqrt(1 - lambda^2)], [sqrt(1 - lambda^2), -lambda]],

whose square is the identity. Partner modes of the channels of ``A`` are then
built directly in ``B + E`` and projected onto ``B``. Nothing in
:mod:`gaussepe.epe` depends on this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from .epe import ChannelSet, channel_decomposition
from .errors import RegionError, ValidationError
from .gaussian import (
    SPECTRUM_TOL,
    CovarianceMatrix,
    Region,
    RegionLike,
    _as_matrix,
    as_region,
)

__all__ = [
    "PurifiedState",
    "build_purification",
    "oracle_weights",
    "partner_modes",
    "rotate_ancilla",
    "verify_purity_blocks",
]


@dataclass(frozen=True)
class PurifiedState:
    """Pure covariance matrix on ``S + E``; ``S`` occupies the first ``N`` indices."""

    extended: CovarianceMatrix
    physical_region: Region
    ancilla_region: Region

    @property
    def n_physical(self) -> int:
        return len(self.physical_region)

    def physical_block(self) -> np.ndarray:
        idx = self.physical_region.array
        return self.extended.entries[np.ix_(idx, idx)]


def build_purification(C) -> PurifiedState:
    m = _as_matrix(C)
    n = m.shape[0]
    lam, U = np.linalg.eigh(m)
    if n and np.max(np.abs(lam)) > 1 + SPECTRUM_TOL:
        raise ValidationError("covariance spectrum outside [-1, 1]; cannot purify")
    lam = np.clip(lam, -1.0, 1.0)
    sig = np.sqrt((1.0 - lam) * (1.0 + lam))
    dtype = np.result_type(m.dtype, float)
    ext = np.zeros((2 * n, 2 * n), dtype=dtype)
    # keep the physical block bit-identical to the input
    ext[:n, :n] = m
    ext[:n, n:] = U * sig
    ext[n:, :n] = ext[:n, n:].conj().T
    ext[n:, n:] = -np.diag(lam)
    return PurifiedState(
        CovarianceMatrix(ext, _checked=True),
        Region(range(n)),
        Region(range(n, 2 * n)),
    )


def rotate_ancilla(P: PurifiedState, V: np.ndarray) -> PurifiedState:
    """Another valid purification: conjugate the ancilla block by unitary ``V``."""
    n = P.n_physical
    V = np.asarray(V)
    if V.shape != (n, n):
        raise ValidationError(f"ancilla rotation must be {n}x{n}")
    if np.max(np.abs(V.conj().T @ V - np.eye(n)), initial=0.0) > 1e-10:
        raise ValidationError("ancilla rotation is not unitary")
    full = np.eye(2 * n, dtype=np.result_type(V.dtype, P.extended.entries.dtype))
    full[n:, n:] = V
    ext = full @ P.extended.entries @ full.conj().T
    ext[:n, :n] = P.extended.entries[:n, :n]
    ext = 0.5 * (ext + ext.conj().T)
    return PurifiedState(CovarianceMatrix(ext, _checked=True), P.physical_region, P.ancilla_region)


def _complement_in_extended(P: PurifiedState, A: Region) -> Region:
    n = P.n_physical
    A.check(n)
    return A.complement(2 * n)


def partner_modes(P: PurifiedState, A: RegionLike, channels: ChannelSet) -> Dict[int, np.ndarray]:
    """
    Normalized partner ``eta_q = C_{Abar,A} chi_q / sqrt(1 - lambda_q^2)`` of
    every entangled channel, as vectors on ``Abar = B + E``.

    The returned dict maps channel index to a vector ordered like
    ``A.complement(2N)`` (physical complement first, then ancillas).
    """
    A = as_region(A)
    if A != channels.region:
        raise RegionError("channels were computed for a different region A")
    abar = _complement_in_extended(P, A)
    ext = P.extended.entries
    C_barA = ext[np.ix_(abar.array, A.array)]
    out = {}
    for q in np.nonzero(channels.entangled)[0]:
        eta = C_barA @ channels.modes[:, q] / np.sqrt(channels.variances[q])
        out[int(q)] = eta / np.linalg.norm(eta)
    return out


def partner_mode(P: PurifiedState, A: RegionLike, channels: ChannelSet, q: int) -> np.ndarray:
    if not channels.entangled[q]:
        raise ValidationError(f"channel {q} is locally pure and has no partner mode")
    return partner_modes(P, A, channels)[q]


def oracle_weights(
    P: PurifiedState, A: RegionLike, B: RegionLike, channels: Optional[ChannelSet] = None
) -> np.ndarray:
    """
    Weights ``w_q = eta_q^dag P_B eta_q`` from explicit partner modes.

    Masked channels get weight 0. ``channels`` defaults to the decomposition of
    the physical block of ``P`` on ``A``.
    """
    A = as_region(A)
    B = as_region(B).check(P.n_physical)
    if not A.isdisjoint(B):
        raise RegionError("A and B must be disjoint")
    if channels is None:
        channels = channel_decomposition(P.physical_block(), A)
    abar = _complement_in_extended(P, A)
    on_b = np.isin(abar.array, B.array)
    w = np.zeros(len(channels))
    for q, eta in partner_modes(P, A, channels).items():
        w[q] = float(np.sum(np.abs(eta[on_b]) ** 2))
    return w


def verify_purity_blocks(P: PurifiedState, A: RegionLike, B: Optional[RegionLike] = None) -> Dict[str, float]:
    """
    Residuals of the block identities implied by purity of ``P``.

    Keys
    ----
    global : max |C~^2 - I|
    purity_A : max |C_A^2 + C_AB C_BA + C_AE C_EA - I_A|
    pure_block1 : max |C_A^2 + C_AB C_BA - I_A|  (zero only for a pure physical state)
    pure_block3 : max |C_A C_AB + C_AB C_B|       (likewise)
    """
    n = P.n_physical
    A = as_region(A).check(n)
    B = A.complement(n) if B is None else as_region(B).check(n)
    ext = P.extended.entries
    ia, ib, ie = A.array, B.array, P.ancilla_region.array

    def blk(r, c):
        return ext[np.ix_(r, c)]

    def res(mat):
        return float(np.max(np.abs(mat), initial=0.0))

    I_A = np.eye(len(ia))
    C_A, C_B = blk(ia, ia), blk(ib, ib)
    C_AB, C_AE = blk(ia, ib), blk(ia, ie)
    K_AB = C_AB @ C_AB.conj().T
    K_AE = C_AE @ C_AE.conj().T
    return {
        "global": res(ext @ ext - np.eye(2 * n)),
        "purity_A": res(C_A @ C_A + K_AB + K_AE - I_A),
        "pure_block1": res(C_A @ C_A + K_AB - I_A),
        "pure_block3": res(C_A @ C_AB + C_AB @ C_B),
    }
