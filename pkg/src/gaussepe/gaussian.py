"""
Fermionic Gaussian covariance matrices: construction, restriction, entropy.

Convention: the centered covariance matrix is

    C_jl = 2 <a_l^dag a_j> - delta_jl,

so an occupied mode has eigenvalue +1 and an empty mode -1. A thermal state of
the single-particle Hamiltonian ``h`` therefore has

    C = -tanh(beta (h - mu) / 2),

which is the only place the sign is fixed; every model test pins it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

import numpy as np
from scipy.special import entr

from .errors import DegeneracyError, RegionError, ValidationError

__all__ = [
    "CovarianceMatrix",
    "Region",
    "SingleParticleHamiltonian",
    "as_region",
    "binary_entropy",
    "build_thermal_covariance",
    "cross_block",
    "ground_state_covariance",
    "restrict",
    "von_neumann_entropy",
]

HERMITIAN_TOL = 1e-12
SPECTRUM_TOL = 1e-10
DEGENERACY_TOL = 1e-10


def _hermiticity_error(m: np.ndarray) -> float:
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(m - m.conj().T)))


def _square(matrix, what: str) -> np.ndarray:
    m = np.asarray(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"{what} must be a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError(f"{what} has non-finite entries")
    return m


# -----------------------------------------------------------------------------
# Domain types
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class Region:
    """Strictly increasing set of mode indices naming a subsystem."""

    indices: tuple

    def __init__(self, indices: Iterable[int]):
        idx = tuple(int(i) for i in indices)
        if len(set(idx)) != len(idx):
            raise RegionError(f"region has repeated indices: {idx}")
        object.__setattr__(self, "indices", tuple(sorted(idx)))
        if any(i < 0 for i in self.indices):
            raise RegionError("region indices must be non-negative")

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=np.intp)

    def check(self, dim: int) -> "Region":
        if self.indices and self.indices[-1] >= dim:
            raise RegionError(f"region index {self.indices[-1]} out of range for dim {dim}")
        return self

    def isdisjoint(self, other: "Region") -> bool:
        return set(self.indices).isdisjoint(other.indices)

    def union(self, *others: "Region") -> "Region":
        out = set(self.indices)
        for o in others:
            out |= set(o.indices)
        return Region(out)

    def complement(self, dim: int) -> "Region":
        mine = set(self.check(dim).indices)
        return Region(i for i in range(dim) if i not in mine)


RegionLike = Union[Region, Sequence[int], np.ndarray]


def as_region(region: RegionLike) -> Region:
    return region if isinstance(region, Region) else Region(region)


@dataclass(frozen=True)
class CovarianceMatrix:
    """
    Hermitian covariance matrix of a particle-number conserving Gaussian state.

    Validation on construction: Hermitian to 1e-12 and every eigenvalue within
    ``1 + 1e-10`` of the unit interval. Purity is a query, not a requirement.
    """

    entries: np.ndarray
    basis_labels: Optional[tuple] = None
    _checked: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        m = _square(self.entries, "covariance matrix")
        if not self._checked:
            err = _hermiticity_error(m)
            if err > HERMITIAN_TOL:
                raise ValidationError(f"covariance matrix not Hermitian (max |C - C^dag| = {err:.3e})")
            if m.size:
                ev = np.linalg.eigvalsh(m)
                if ev[0] < -1 - SPECTRUM_TOL or ev[-1] > 1 + SPECTRUM_TOL:
                    raise ValidationError(
                        f"covariance spectrum [{ev[0]:.12g}, {ev[-1]:.12g}] outside [-1, 1]"
                    )
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)
        if self.basis_labels is not None:
            labels = tuple(self.basis_labels)
            if len(labels) != m.shape[0]:
                raise ValidationError("basis_labels length does not match matrix dimension")
            object.__setattr__(self, "basis_labels", labels)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)

    def is_pure(self, tol: float = 1e-10) -> bool:
        return self.purity_defect() < tol

    def purity_defect(self) -> float:
        m = self.entries
        return float(np.max(np.abs(m @ m - np.eye(self.dim)))) if m.size else 0.0


@dataclass(frozen=True)
class SingleParticleHamiltonian:
    """Hermitian hopping matrix, in units of the hopping amplitude."""

    entries: np.ndarray
    basis_labels: Optional[tuple] = None

    def __post_init__(self):
        m = _square(self.entries, "Hamiltonian")
        err = _hermiticity_error(m)
        if err > HERMITIAN_TOL:
            raise ValidationError(f"Hamiltonian not Hermitian (max |h - h^dag| = {err:.3e})")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)
        if self.basis_labels is not None:
            object.__setattr__(self, "basis_labels", tuple(self.basis_labels))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)

    def spectrum(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)


def _as_hamiltonian(h) -> SingleParticleHamiltonian:
    return h if isinstance(h, SingleParticleHamiltonian) else SingleParticleHamiltonian(np.asarray(h))


def _as_matrix(C) -> np.ndarray:
    if isinstance(C, CovarianceMatrix):
        return C.entries
    return _square(C, "covariance matrix")


# -----------------------------------------------------------------------------
# State construction
# -----------------------------------------------------------------------------


def build_thermal_covariance(h, beta: float, mu: float = 0.0) -> CovarianceMatrix:
    """
    Grand-canonical covariance ``C = -tanh(beta (h - mu) / 2)``.

    Parameters
    ----------
    h : SingleParticleHamiltonian or array_like
        Hermitian single-particle Hamiltonian.
    beta : float
        Inverse temperature, finite and >= 0. ``beta = 0`` gives ``C = 0``.
    mu : float
        Chemical potential; ``0`` is half filling for the particle-hole
        symmetric models in :mod:`gaussepe.models`.
    """
    hm = _as_hamiltonian(h)
    beta = float(beta)
    if not np.isfinite(beta) or beta < 0:
        raise ValidationError(f"beta must be finite and >= 0, got {beta}")
    energies, vecs = np.linalg.eigh(hm.entries)
    occ = -np.tanh(0.5 * beta * (energies - mu))
    C = (vecs * occ) @ vecs.conj().T
    C = 0.5 * (C + C.conj().T)
    return CovarianceMatrix(C, hm.basis_labels, _checked=True)


def ground_state_covariance(
    h, n_filled: Optional[int] = None, degeneracy_tol: float = DEGENERACY_TOL
) -> CovarianceMatrix:
    """
    Slater determinant filling the ``n_filled`` lowest orbitals of ``h``.

    ``C = V diag(+1 occupied, -1 empty) V^dag``. Half filling by default.

    Raises
    ------
    DegeneracyError
        If orbitals ``n_filled - 1`` and ``n_filled`` are degenerate within
        ``degeneracy_tol``; the filled set is then not unique.
    """
    hm = _as_hamiltonian(h)
    dim = hm.dim
    if n_filled is None:
        n_filled = dim // 2
    if not 0 <= n_filled <= dim:
        raise ValidationError(f"n_filled must lie in [0, {dim}], got {n_filled}")
    energies, vecs = np.linalg.eigh(hm.entries)
    if 0 < n_filled < dim:
        gap = energies[n_filled] - energies[n_filled - 1]
        if gap <= degeneracy_tol:
            raise DegeneracyError(
                f"Fermi level is degenerate (gap {gap:.3e} between orbitals {n_filled - 1} and "
                f"{n_filled}); change the boundary conditions or use a small finite temperature"
            )
    occ = vecs[:, :n_filled]
    C = 2.0 * (occ @ occ.conj().T) - np.eye(dim)
    C = 0.5 * (C + C.conj().T)
    return CovarianceMatrix(C, hm.basis_labels, _checked=True)


# -----------------------------------------------------------------------------
# Blocks
# -----------------------------------------------------------------------------


def restrict(C, A: RegionLike) -> CovarianceMatrix:
    """The ``|A| x |A|`` block ``C_A = P_A C P_A``."""
    m = _as_matrix(C)
    A = as_region(A).check(m.shape[0])
    idx = A.array
    labels = None
    if isinstance(C, CovarianceMatrix) and C.basis_labels is not None:
        labels = tuple(C.basis_labels[i] for i in idx)
    return CovarianceMatrix(m[np.ix_(idx, idx)], labels, _checked=True)


def cross_block(C, A: RegionLike, B: RegionLike) -> np.ndarray:
    """The ``|A| x |B|`` block ``C_AB = P_A C P_B`` for disjoint regions."""
    m = _as_matrix(C)
    A = as_region(A).check(m.shape[0])
    B = as_region(B).check(m.shape[0])
    if not A.isdisjoint(B):
        raise RegionError("cross_block requires disjoint regions")
    return m[np.ix_(A.array, B.array)]


# -----------------------------------------------------------------------------
# Entropy
# -----------------------------------------------------------------------------


def _clamp_spectrum(lam: np.ndarray) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    if lam.size and np.max(np.abs(lam)) > 1 + SPECTRUM_TOL:
        raise ValidationError(f"eigenvalue {lam[np.argmax(np.abs(lam))]:.12g} outside [-1, 1]")
    return np.clip(lam, -1.0, 1.0)


def binary_entropy(lam):
    """
    Entropy in nats of one fermionic mode with covariance eigenvalue ``lam``.

    ``s(l) = -(1+l)/2 ln((1+l)/2) - (1-l)/2 ln((1-l)/2)``. Works elementwise;
    values within 1e-10 outside ``[-1, 1]`` are clamped, others rejected.
    """
    scalar = np.ndim(lam) == 0
    lam = _clamp_spectrum(np.atleast_1d(lam))
    p = 0.5 * (1.0 + lam)
    q = 0.5 * (1.0 - lam)
    s = entr(p) + entr(q)
    return float(s[0]) if scalar else s


def von_neumann_entropy(C, A: Optional[RegionLike] = None) -> float:
    """``S(A) = Tr s(C_A)``; the whole system when ``A`` is omitted."""
    m = _as_matrix(C)
    block = m if A is None else restrict(m, A).entries
    if block.size == 0:
        return 0.0
    return float(np.sum(binary_entropy(np.linalg.eigvalsh(block))))
