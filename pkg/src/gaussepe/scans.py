"""
Parameter scans for the three models.

Every scan is a map over independent grid points (and, for the pi-flux
lattice, over transverse-momentum sectors). ``threads`` sets the width of the
thread pool; results are gathered in input order and reduced serially, so the
output does not depend on it.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Sequence

import numpy as np

from .analysis import (
    ScanRecord,
    area_law_coefficient,
    collapse_dataset,
    eps_window,
    l_dirac,
    l_eff,
    mutual_information,
)
from .epe import DEFAULT_TAU, epe_trace
from .errors import ValidationError
from .gaussian import (
    Region,
    build_thermal_covariance,
    ground_state_covariance,
    von_neumann_entropy,
)
from .models import (
    LatticeSpec,
    chain_1d,
    infinite_chain_covariance,
    interval_region,
    pi_flux,
    pi_flux_sectors,
    sector_strip_region,
    ssh_chain,
    strip_region,
)

__all__ = [
    "FULL_MATRIX_LIMIT",
    "chain_scan",
    "ground_strip_epe",
    "pmap",
    "piflux_scan",
    "thermal_strip_epe",
    "ssh_scan",
]

# largest mode count the dense full-lattice path accepts
FULL_MATRIX_LIMIT = 4096


def default_threads() -> int:
    return os.cpu_count() or 1


def pmap(fn: Callable, items: Iterable, threads: Optional[int] = None) -> list:
    """Ordered map; LAPACK releases the GIL so threads overlap eigensolves."""
    items = list(items)
    n = default_threads() if threads is None else int(threads)
    if n < 1:
        raise ValidationError("threads must be >= 1")
    if n == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(n, len(items))) as ex:
        return list(ex.map(fn, items))


# -----------------------------------------------------------------------------
# 1D chain
# -----------------------------------------------------------------------------


def chain_scan(
    L: int = 1024,
    betas: Sequence[float] = (8, 16, 32, 64),
    ells: Sequence[int] = tuple(range(1, 257)),
    t: float = 1.0,
    bc: str = "antiperiodic",
    tau: float = DEFAULT_TAU,
    threads: Optional[int] = None,
    kernel: str = "finite",
) -> List[ScanRecord]:
    """
    EPE and entanglement entropy of ``A = [0, ell)`` against its complement.

    ``kernel="finite"`` uses the closed chain of ``L`` sites; ``"infinite"``
    uses the quadrature kernel of the infinite line on a window that pads
    ``A`` by a multiple of the thermal length on both sides.
    """
    ells = [int(e) for e in ells]
    if any(e < 1 for e in ells):
        raise ValidationError("interval lengths must be >= 1")
    if kernel == "finite" and max(ells) >= L:
        raise ValidationError(f"interval length {max(ells)} does not leave a complement in L = {L}")
    if kernel not in ("finite", "infinite"):
        raise ValidationError(f"unknown kernel {kernel!r}")
    spec = LatticeSpec("chain", (L,), (t,), (bc,))
    v_F = spec.fermi_velocity
    h = chain_1d(L, t, bc) if kernel == "finite" else None

    def one_beta(beta):
        if kernel == "finite":
            C = build_thermal_covariance(h, beta).entries

            def region(ell):
                A = interval_region(L, 0, ell)
                return C, A, A.complement(L)

        else:
            pad = int(math.ceil(64 + 2 * v_F * beta))

            def region(ell):
                n = ell + 2 * pad
                Cw = infinite_chain_covariance(n, beta, t).entries
                A = interval_region(n, pad, ell)
                return Cw, A, A.complement(n)

        out = []
        for ell in ells:
            Cm, A, B = region(ell)
            out.append((epe_trace(Cm, A, B, tau), von_neumann_entropy(Cm, A)))
        return out

    results = pmap(one_beta, [float(b) for b in betas], threads)
    records = []
    for beta, vals in zip(betas, results):
        for ell, (e, s) in zip(ells, vals):
            le = l_eff(ell, beta, v_F)
            records.append(ScanRecord("chain", float(beta), ell, "epe", e, le, spec))
            records.append(ScanRecord("chain", float(beta), ell, "vne", s, le, spec))
    return records


# -----------------------------------------------------------------------------
# SSH chain
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class SSHPoint:
    temperature: float
    t2_over_t1: float
    epe: float
    half_mi: float


def ssh_scan(
    L_cells: int = 60,
    ratios: Sequence[float] = (0.5, 1.2, 1.5, 2.0, 2.5, 3.0),
    temperatures: Sequence[float] = (0.05, 0.1, 0.2, 0.3, 0.5),
    t1: float = 1.0,
    tau: float = DEFAULT_TAU,
    threads: Optional[int] = None,
) -> List[SSHPoint]:
    """Half-chain EPE and ``I/2`` over ``(T, t2/t1)``, temperatures outermost."""
    for T in temperatures:
        if not T > 0:
            raise ValidationError("temperatures must be > 0")
    n = 2 * L_cells
    A = Region(range(n // 2))
    B = A.complement(n)
    grid = [(float(T), float(r)) for T in temperatures for r in ratios]

    def one(point):
        T, r = point
        C = build_thermal_covariance(ssh_chain(L_cells, t1, r * t1), 1.0 / T).entries
        return SSHPoint(T, r, epe_trace(C, A, B, tau), 0.5 * mutual_information(C, A, B))

    return pmap(one, grid, threads)


# -----------------------------------------------------------------------------
# pi-flux lattice
# -----------------------------------------------------------------------------


def _sector_family(spec: LatticeSpec):
    Lx, Ly = spec.sizes
    return pi_flux_sectors(Lx, Ly, spec.hoppings[0], *spec.bcs)


def _strip_values(spec, widths, make_cov, threads, tau):
    Lx = spec.sizes[0]
    fam = _sector_family(spec)

    def one(sector):
        C = make_cov(sector.hamiltonian)
        return [epe_trace(C, *_sector_regions(Lx, w), tau) for w in widths]

    per_sector = pmap(one, list(fam), threads)
    # serial reduction in sector order
    return np.array([sum(vals[i] for vals in per_sector) for i in range(len(widths))])


def _sector_regions(Lx, width):
    A = sector_strip_region(Lx, 0, int(width))
    return A, A.complement(2 * Lx)


def _full_strip_values(spec, widths, make_cov, tau):
    Lx, Ly = spec.sizes
    if Lx * Ly > FULL_MATRIX_LIMIT:
        raise ValidationError(
            f"full-matrix path refused for {Lx * Ly} modes (limit {FULL_MATRIX_LIMIT}); use the sector path"
        )
    C = make_cov(pi_flux(Lx, Ly, spec.hoppings[0], *spec.bcs))
    out = []
    for w in widths:
        A = strip_region(Lx, Ly, 0, int(w))
        out.append(epe_trace(C, A, A.complement(Lx * Ly), tau))
    return np.array(out)


def ground_strip_epe(spec, widths, threads=None, tau=DEFAULT_TAU, full_matrix=False) -> np.ndarray:
    """Ground-state strip EPE (total nats) for each width, at half filling per sector."""

    def gs(h):
        return ground_state_covariance(h, h.dim // 2).entries

    if full_matrix:
        return _full_strip_values(spec, widths, gs, tau)
    return _strip_values(spec, widths, gs, threads, tau)


def thermal_strip_epe(spec, beta, widths, threads=None, tau=DEFAULT_TAU, full_matrix=False) -> np.ndarray:
    def th(h):
        return build_thermal_covariance(h, beta).entries

    if full_matrix:
        return _full_strip_values(spec, widths, th, tau)
    return _strip_values(spec, widths, th, threads, tau)


@dataclass(frozen=True)
class PiFluxScan:
    spec: LatticeSpec
    eps: float
    eps_widths: np.ndarray
    eps_densities: np.ndarray
    records: List[ScanRecord]

    def collapse(self):
        return collapse_dataset(self.records, self.eps)


def piflux_scan(
    Lx: int = 200,
    Ly: int = 100,
    betas: Sequence[float] = (4, 8, 16),
    widths: Sequence[int] = (2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64, 100),
    t: float = 1.0,
    bc_x: str = "periodic",
    bc_y: str = "antiperiodic",
    tau: float = DEFAULT_TAU,
    threads: Optional[int] = None,
    full_matrix: bool = False,
) -> PiFluxScan:
    """
    Strip EPE over ``(beta, ell_x)`` plus the ground-state calibration of the
    area-law coefficient on the same lattice.
    """
    spec = LatticeSpec.pi_flux(Lx, Ly, t, bc_x, bc_y)
    widths = [int(w) for w in widths]
    if any(w < 1 or w > Lx for w in widths):
        raise ValidationError(f"strip widths must lie in [1, {Lx}]")
    eps_w = eps_window(Lx)
    eps, _, dens = area_law_coefficient(
        spec, eps_w, threads=threads, tau=tau, full_matrix=full_matrix, return_fit=True
    )
    v_F = spec.fermi_velocity
    records = []
    for beta in betas:
        vals = thermal_strip_epe(spec, float(beta), widths, threads, tau, full_matrix)
        for w, v in zip(widths, vals):
            records.append(
                ScanRecord("pi_flux", float(beta), w, "epe", float(v), l_dirac(w, beta, v_F), spec)
            )
    return PiFluxScan(spec, float(eps), eps_w, dens, records)
