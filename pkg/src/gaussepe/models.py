"""
Single-particle Hamiltonians of the lattice models and their region helpers.

* ``chain_1d``   nearest-neighbour chain, ``h_{j,j+1} = +t``.
* ``ssh_chain``  open SSH chain, intra-cell ``t1`` and inter-cell ``t2``.
* ``pi_flux``    square lattice with ``-t`` hoppings and a ``(-1)^{i_y}`` sign on
  x-bonds, i.e. flux pi per plaquette.

Site ordering for the square lattice is ``i = i_x * L_y + i_y`` so that a
vertical strip is a contiguous block of indices.

The pi-flux gauge is invariant under translation by two sites along y, so the
Hamiltonian splits into ``L_y/2`` transverse-momentum sectors of dimension
``2 L_x`` (orbital ``2 i_x + s`` with sublattice ``s = i_y mod 2``).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import integrate

from .errors import ValidationError
from .gaussian import CovarianceMatrix, Region, SingleParticleHamiltonian

__all__ = [
    "LatticeSpec",
    "Sector",
    "SectorFamily",
    "chain_1d",
    "chain_dispersion",
    "infinite_chain_covariance",
    "interval_region",
    "pi_flux",
    "pi_flux_dispersion",
    "pi_flux_sectors",
    "sector_strip_region",
    "ssh_chain",
    "strip_region",
]

BOUNDARY_CONDITIONS = ("periodic", "antiperiodic", "open")
FERMI_VELOCITY_PER_T = 2.0


def _bc_phase(bc: str) -> Optional[float]:
    if bc == "periodic":
        return 1.0
    if bc == "antiperiodic":
        return -1.0
    if bc == "open":
        return None
    raise ValidationError(f"unknown boundary condition {bc!r}; expected one of {BOUNDARY_CONDITIONS}")


@dataclass(frozen=True)
class LatticeSpec:
    """
    Model parameters. ``sizes`` is ``(L,)`` for the chain, ``(L_cells,)`` for
    SSH and ``(L_x, L_y)`` for pi-flux; ``hoppings`` is ``(t,)`` or ``(t1, t2)``.
    """

    kind: str
    sizes: Tuple[int, ...]
    hoppings: Tuple[float, ...] = (1.0,)
    bcs: Tuple[str, ...] = ("periodic",)

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        object.__setattr__(self, "hoppings", tuple(float(t) for t in self.hoppings))
        object.__setattr__(self, "bcs", tuple(self.bcs))
        nsize = {"chain": 1, "ssh": 1, "pi_flux": 2}
        if self.kind not in nsize:
            raise ValidationError(f"unknown model kind {self.kind!r}")
        if len(self.sizes) != nsize[self.kind]:
            raise ValidationError(f"{self.kind} needs {nsize[self.kind]} size(s), got {self.sizes}")
        if any(s < 2 for s in self.sizes):
            raise ValidationError(f"lattice sizes must be >= 2, got {self.sizes}")
        for bc in self.bcs:
            _bc_phase(bc)
        if self.kind == "pi_flux":
            if self.sizes[1] % 2:
                raise ValidationError("pi-flux needs even L_y for the two-site unit cell")
            if len(self.bcs) != 2:
                raise ValidationError("pi-flux needs one boundary condition per direction")
        if self.kind == "ssh" and len(self.hoppings) != 2:
            raise ValidationError("SSH needs hoppings (t1, t2)")

    @classmethod
    def pi_flux(cls, Lx, Ly, t=1.0, bc_x="periodic", bc_y="antiperiodic"):
        return cls("pi_flux", (Lx, Ly), (t,), (bc_x, bc_y))

    @property
    def fermi_velocity(self) -> float:
        if self.kind == "ssh":
            raise ValidationError("the SSH chain is gapped; no Fermi velocity")
        return FERMI_VELOCITY_PER_T * abs(self.hoppings[0])

    @property
    def n_cut(self) -> int:
        """Total length of the two entangling cuts of a vertical strip."""
        if self.kind != "pi_flux":
            raise ValidationError("n_cut is defined for the pi-flux strip geometry")
        return 2 * self.sizes[1]

    def hamiltonian(self) -> SingleParticleHamiltonian:
        if self.kind == "chain":
            return chain_1d(self.sizes[0], self.hoppings[0], self.bcs[0])
        if self.kind == "ssh":
            return ssh_chain(self.sizes[0], *self.hoppings)
        return pi_flux(*self.sizes, self.hoppings[0], *self.bcs)


# -----------------------------------------------------------------------------
# 1D chain
# -----------------------------------------------------------------------------


def chain_1d(L: int, t: float = 1.0, bc: str = "periodic") -> SingleParticleHamiltonian:
    if L < 2:
        raise ValidationError("chain needs L >= 2")
    phase = _bc_phase(bc)
    h = np.zeros((L, L))
    j = np.arange(L - 1)
    h[j, j + 1] = t
    h[j + 1, j] = t
    if phase is not None:
        # += so that L = 2 picks up both bonds
        h[L - 1, 0] += phase * t
        h[0, L - 1] += phase * t
    return SingleParticleHamiltonian(h, tuple(range(L)))


def chain_dispersion(L: int, t: float = 1.0, bc: str = "periodic") -> np.ndarray:
    """Sorted ``2 t cos k`` on the allowed momenta of a closed chain."""
    shift = {"periodic": 0.0, "antiperiodic": 0.5}[bc]
    k = 2 * np.pi * (np.arange(L) + shift) / L
    return np.sort(2 * t * np.cos(k))


def infinite_chain_covariance(
    sites: int, beta: float, t: float = 1.0, mu: float = 0.0
) -> CovarianceMatrix:
    """
    Thermal covariance of the infinite chain on a window of ``sites`` sites,

        C_{jl} = -(1/2pi) int dk tanh(beta (2t cos k - mu)/2) e^{ik(j-l)},

    evaluated by adaptive quadrature for every distance. Validation path for
    the finite antiperiodic chain.
    """
    beta = float(beta)
    if beta <= 0:
        raise ValidationError("infinite-chain kernel needs beta > 0")

    def f(k):
        return np.tanh(0.5 * beta * (2 * t * np.cos(k) - mu))

    coeff = np.empty(sites)
    for d in range(sites):
        # integrand is even in k
        val, _ = integrate.quad(f, 0.0, np.pi, weight="cos", wvar=d, limit=400, epsabs=1e-13)
        coeff[d] = -val / np.pi
    d = np.abs(np.subtract.outer(np.arange(sites), np.arange(sites)))
    return CovarianceMatrix(coeff[d], tuple(range(sites)))


def interval_region(L: int, start: int, length: int) -> Region:
    """Sites ``start .. start + length - 1`` of a chain of ``L`` sites."""
    if length < 0 or start < 0 or start + length > L:
        raise ValidationError(f"interval [{start}, {start + length}) does not fit in {L} sites")
    return Region(range(start, start + length))


# -----------------------------------------------------------------------------
# SSH chain
# -----------------------------------------------------------------------------


def ssh_chain(L_cells: int, t1: float = 1.0, t2: float = 1.0) -> SingleParticleHamiltonian:
    """Open SSH chain with ``2 L_cells`` sites ordered ``(cell, sublattice)``."""
    if L_cells < 2:
        raise ValidationError("SSH chain needs at least 2 cells")
    n = 2 * L_cells
    h = np.zeros((n, n))
    cells = np.arange(L_cells)
    h[2 * cells, 2 * cells + 1] = t1
    inter = np.arange(L_cells - 1)
    h[2 * inter + 1, 2 * inter + 2] = t2
    h = h + h.T
    labels = tuple((j, s) for j in range(L_cells) for s in (1, 2))
    return SingleParticleHamiltonian(h, labels)


# -----------------------------------------------------------------------------
# pi-flux square lattice
# -----------------------------------------------------------------------------


def _check_pi_flux(Lx, Ly):
    if Lx < 2 or Ly < 2:
        raise ValidationError("pi-flux lattice needs L_x, L_y >= 2")
    if Ly % 2:
        raise ValidationError(f"pi-flux gauge needs even L_y, got {Ly}")


def pi_flux(
    Lx: int, Ly: int, t: float = 1.0, bc_x: str = "periodic", bc_y: str = "antiperiodic"
) -> SingleParticleHamiltonian:
    _check_pi_flux(Lx, Ly)
    px, py = _bc_phase(bc_x), _bc_phase(bc_y)
    n = Lx * Ly
    h = np.zeros((n, n))

    def site(ix, iy):
        return ix * Ly + iy

    def bond(a, b, amp):
        h[a, b] += amp
        h[b, a] += amp

    for ix in range(Lx):
        for iy in range(Ly):
            sign = -1.0 if iy % 2 else 1.0
            if ix + 1 < Lx:
                bond(site(ix + 1, iy), site(ix, iy), -t * sign)
            elif px is not None:
                bond(site(0, iy), site(ix, iy), -t * sign * px)
            if iy + 1 < Ly:
                bond(site(ix, iy + 1), site(ix, iy), -t)
            elif py is not None:
                bond(site(ix, 0), site(ix, iy), -t * py)
    labels = tuple((ix, iy) for ix in range(Lx) for iy in range(Ly))
    return SingleParticleHamiltonian(h, labels)


def _momenta(L: int, bc: str) -> np.ndarray:
    shift = {"periodic": 0.0, "antiperiodic": 0.5}.get(bc)
    if shift is None:
        raise ValidationError(f"momenta undefined for {bc!r} boundaries")
    return 2 * np.pi * (np.arange(L) + shift) / L


def pi_flux_dispersion(Lx, Ly, t=1.0, bc_x="periodic", bc_y="antiperiodic") -> np.ndarray:
    """
    Sorted ``+-2t sqrt(cos^2 kx + cos^2 ky)`` over the magnetic Brillouin zone
    (``ky`` restricted to half of the site momenta).
    """
    _check_pi_flux(Lx, Ly)
    kx = _momenta(Lx, bc_x)
    ky = _momenta(Ly, bc_y)[: Ly // 2]
    e = 2 * abs(t) * np.sqrt(np.add.outer(np.cos(kx) ** 2, np.cos(ky) ** 2)).ravel()
    return np.sort(np.concatenate([-e, e]))


@dataclass(frozen=True)
class Sector:
    """One transverse-momentum block; ``momentum`` is the two-site cell momentum."""

    momentum: float
    hamiltonian: SingleParticleHamiltonian


@dataclass(frozen=True)
class SectorFamily:
    Lx: int
    Ly: int
    t: float
    bc_x: str
    bc_y: str
    sectors: Tuple[Sector, ...]
    # orbital o of every sector sits at column site_map[o, 0], sublattice site_map[o, 1]
    site_map: np.ndarray

    def __len__(self):
        return len(self.sectors)

    def __iter__(self):
        return iter(self.sectors)

    def embedding(self, k: int) -> np.ndarray:
        """
        ``(L_x L_y) x (2 L_x)`` isometry whose columns are the sector-``k``
        orbitals written in physical site coordinates.
        """
        K = self.sectors[k].momentum
        M = self.Ly // 2
        U = np.zeros((self.Lx * self.Ly, 2 * self.Lx), dtype=complex)
        cells = np.arange(M)
        amp = np.exp(1j * K * cells) / np.sqrt(M)
        for o, (ix, s) in enumerate(self.site_map):
            U[ix * self.Ly + 2 * cells + s, o] = amp
        return U

    def spectrum(self) -> np.ndarray:
        return np.sort(np.concatenate([s.hamiltonian.spectrum() for s in self.sectors]))


def pi_flux_sectors(
    Lx: int, Ly: int, t: float = 1.0, bc_x: str = "periodic", bc_y: str = "antiperiodic"
) -> SectorFamily:
    """
    Block-diagonalize :func:`pi_flux` by Fourier transform over the ``L_y/2``
    two-site cells in y. Orbital ``2 i_x + s`` of sector ``K`` is
    ``M^{-1/2} sum_m e^{iKm} |i_x, 2m + s>``.
    """
    _check_pi_flux(Lx, Ly)
    if bc_y == "open":
        raise ValidationError("sector decomposition needs periodic or antiperiodic y boundaries")
    px = _bc_phase(bc_x)
    M = Ly // 2
    Ks = _momenta(M, bc_y)
    n = 2 * Lx
    # x-bonds, identical in every sector
    hx = np.zeros((n, n))
    for ix in range(Lx):
        for s in (0, 1):
            amp = -t * (-1.0 if s else 1.0)
            if ix + 1 < Lx:
                a = 2 * (ix + 1) + s
            elif px is not None:
                a, amp = s, amp * px
            else:
                continue
            hx[a, 2 * ix + s] += amp
            hx[2 * ix + s, a] += amp
    sectors = []
    cols = np.arange(Lx)
    for K in Ks:
        h = hx.astype(complex)
        # sublattice 0 -> 1 inside the cell, 1 -> 0 of the next cell
        amp = -t * (1.0 + np.exp(1j * K))
        h[2 * cols + 1, 2 * cols] += amp
        h[2 * cols, 2 * cols + 1] += np.conj(amp)
        sectors.append(Sector(float(K), SingleParticleHamiltonian(h, tuple((ix, s) for ix in range(Lx) for s in (0, 1)))))
    site_map = np.array([(ix, s) for ix in range(Lx) for s in (0, 1)], dtype=int)
    return SectorFamily(Lx, Ly, float(t), bc_x, bc_y, tuple(sectors), site_map)


def strip_region(Lx: int, Ly: int, lx_start: int, lx_width: int) -> Region:
    """All sites with ``i_x`` in ``[lx_start, lx_start + lx_width)`` (mod ``L_x``)."""
    if not 0 <= lx_width <= Lx:
        raise ValidationError(f"strip width {lx_width} outside [0, {Lx}]")
    if not 0 <= lx_start < Lx:
        raise ValidationError(f"strip start {lx_start} outside [0, {Lx})")
    cols = (lx_start + np.arange(lx_width)) % Lx
    return Region((cols[:, None] * Ly + np.arange(Ly)[None, :]).ravel())


def sector_strip_region(Lx: int, lx_start: int, lx_width: int) -> Region:
    """The same strip in the ``2 L_x`` orbital basis of a sector."""
    if not 0 <= lx_width <= Lx:
        raise ValidationError(f"strip width {lx_width} outside [0, {Lx}]")
    if not 0 <= lx_start < Lx:
        raise ValidationError(f"strip start {lx_start} outside [0, {Lx})")
    cols = (lx_start + np.arange(lx_width)) % Lx
    return Region((2 * cols[:, None] + np.arange(2)[None, :]).ravel())
