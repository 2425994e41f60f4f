import math

import numpy as np
import pytest

from gaussepe import (
    LatticeSpec,
    ValidationError,
    build_thermal_covariance,
    chain_1d,
    epe_trace,
    ground_state_covariance,
    infinite_chain_covariance,
    interval_region,
    pi_flux,
    pi_flux_sectors,
    ssh_chain,
    strip_region,
    von_neumann_entropy,
)
from gaussepe.models import chain_dispersion, pi_flux_dispersion, sector_strip_region


def hermitian_error(h):
    m = np.asarray(h)
    return np.max(np.abs(m - m.conj().T))


# ---------------------------------------------------------------- chain


def test_chain_two_sites_open():
    assert np.array_equal(np.asarray(chain_1d(2, 1.0, "open")), [[0, 1], [1, 0]])


def test_chain_periodic_spectrum():
    assert np.allclose(chain_1d(4, 1.0, "periodic").spectrum(), [-2, 0, 0, 2], atol=1e-14)


def test_chain_antiperiodic_spectrum():
    r = math.sqrt(2)
    assert np.allclose(chain_1d(4, 1.0, "antiperiodic").spectrum(), [-r, -r, r, r], atol=1e-14)


@pytest.mark.parametrize("bc", ["periodic", "antiperiodic"])
@pytest.mark.parametrize("L", [5, 16, 33])
def test_chain_dispersion(L, bc):
    h = chain_1d(L, 0.7, bc)
    assert hermitian_error(h) < 1e-14
    assert np.max(np.abs(h.spectrum() - chain_dispersion(L, 0.7, bc))) < 1e-10


def test_chain_size_guard():
    with pytest.raises(ValidationError):
        chain_1d(1)


def test_infinite_kernel_matches_long_chain():
    beta = 4.0
    Cw = infinite_chain_covariance(12, beta).entries
    C = build_thermal_covariance(chain_1d(512, 1.0, "antiperiodic"), beta).entries
    assert np.max(np.abs(Cw - C[:12, :12])) < 1e-10


# ---------------------------------------------------------------- SSH


def test_ssh_dimerized():
    e = ssh_chain(6, 1.0, 0.0).spectrum()
    assert np.allclose(e, [-1] * 6 + [1] * 6, atol=1e-14)


def test_ssh_edge_zero_modes():
    h = np.asarray(ssh_chain(6, 0.0, 1.0))
    e, v = np.linalg.eigh(h)
    zeros = np.abs(e) < 1e-12
    assert zeros.sum() == 2
    # the zero modes live on the two end sites
    weight = np.sum(np.abs(v[:, zeros]) ** 2, axis=1)
    assert weight[0] == pytest.approx(1) and weight[-1] == pytest.approx(1)


def test_ssh_metallic_point_gap_closes():
    gaps = [np.min(np.abs(ssh_chain(n, 1.0, 1.0).spectrum())) for n in (10, 20, 40, 80)]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 0.03


def test_ssh_chiral_symmetry():
    e = ssh_chain(17, 1.0, 2.3).spectrum()
    assert np.max(np.abs(e + e[::-1])) < 1e-12
    assert hermitian_error(ssh_chain(17, 1.0, 2.3)) < 1e-14


def test_ssh_labels():
    h = ssh_chain(3, 1.0, 2.0)
    assert h.basis_labels[:3] == ((0, 1), (0, 2), (1, 1))
    m = np.asarray(h)
    assert m[0, 1] == 1.0 and m[1, 2] == 2.0


# ---------------------------------------------------------------- pi-flux


def test_pi_flux_requires_even_ly():
    with pytest.raises(ValidationError):
        pi_flux(4, 3)
    with pytest.raises(ValidationError):
        LatticeSpec.pi_flux(4, 5)


def test_pi_flux_two_by_two():
    # 4x4 hand matrix, site = ix * Ly + iy, x-bonds doubled by periodic wrap
    h = np.asarray(pi_flux(2, 2, 1.0, "periodic", "periodic"))
    expect = np.array(
        [
            [0, -2, -2, 0],
            [-2, 0, 0, 2],
            [-2, 0, 0, -2],
            [0, 2, -2, 0],
        ],
        dtype=float,
    )
    assert np.array_equal(h, expect)
    assert np.allclose(np.linalg.eigvalsh(expect), [-2 * math.sqrt(2)] * 2 + [2 * math.sqrt(2)] * 2)


def test_pi_flux_plaquette_flux():
    Lx, Ly = 6, 4
    h = np.asarray(pi_flux(Lx, Ly))

    def s(ix, iy):
        return (ix % Lx) * Ly + (iy % Ly)

    for ix in range(Lx - 1):
        for iy in range(Ly - 1):
            loop = [s(ix, iy), s(ix + 1, iy), s(ix + 1, iy + 1), s(ix, iy + 1), s(ix, iy)]
            prod = np.prod([h[b, a] for a, b in zip(loop, loop[1:])])
            assert prod == pytest.approx(-1.0)


@pytest.mark.parametrize("bcs", [("periodic", "antiperiodic"), ("antiperiodic", "periodic"), ("periodic", "periodic")])
def test_pi_flux_dispersion(bcs):
    h = pi_flux(6, 4, 1.0, *bcs)
    assert hermitian_error(h) < 1e-14
    assert np.max(np.abs(h.spectrum() - pi_flux_dispersion(6, 4, 1.0, *bcs))) < 1e-10


def test_pi_flux_dirac_gap():
    # kx = pi/2 is allowed; ky misses pi/2 by pi/Ly under antiperiodic y
    Lx, Ly = 40, 20
    e = pi_flux_sectors(Lx, Ly).spectrum()
    gap = np.min(np.abs(e))
    v_F = LatticeSpec.pi_flux(Lx, Ly).fermi_velocity
    assert v_F == 2.0
    assert gap == pytest.approx(v_F * math.pi / Ly, rel=0.01)


def test_pi_flux_antiperiodic_y_is_gapped():
    # the finite lattice has no exact zero mode, so the ground state is unique
    h = pi_flux(8, 4)
    assert np.min(np.abs(h.spectrum())) > 0.1
    ground_state_covariance(h)


# ---------------------------------------------------------------- sectors


def test_sector_count_and_dimension():
    fam = pi_flux_sectors(8, 4)
    assert len(fam) == 2
    assert all(s.hamiltonian.dim == 16 for s in fam)


def test_sector_spectra_union():
    e_full = pi_flux(8, 4).spectrum()
    assert np.max(np.abs(pi_flux_sectors(8, 4).spectrum() - e_full)) < 1e-10


def test_sector_embedding_block_diagonalizes():
    fam = pi_flux_sectors(6, 4)
    h = np.asarray(pi_flux(6, 4))
    U = np.hstack([fam.embedding(k) for k in range(len(fam))])
    assert np.max(np.abs(U.conj().T @ U - np.eye(24))) < 1e-12
    for k, sector in enumerate(fam):
        Uk = fam.embedding(k)
        assert np.max(np.abs(Uk.conj().T @ h @ Uk - np.asarray(sector.hamiltonian))) < 1e-12


def test_sector_orbitals_respect_strip():
    fam = pi_flux_sectors(6, 4)
    strip = strip_region(6, 4, 1, 2).array
    orbitals = sector_strip_region(6, 1, 2).array
    U = fam.embedding(0)
    support = np.nonzero(np.any(np.abs(U[:, orbitals]) > 0, axis=1))[0]
    assert set(support) == set(strip)


def test_sector_open_y_refused():
    with pytest.raises(ValidationError):
        pi_flux_sectors(4, 4, 1.0, "periodic", "open")


@pytest.mark.parametrize("beta", [None, 2.0])
def test_sector_sums_match_full_lattice(beta):
    Lx, Ly = 8, 4
    h = pi_flux(Lx, Ly)
    fam = pi_flux_sectors(Lx, Ly)

    def cov(hm):
        return (ground_state_covariance(hm) if beta is None else build_thermal_covariance(hm, beta)).entries

    C = cov(h)
    for w in (1, 2, 3, 4):
        A = strip_region(Lx, Ly, 0, w)
        As = sector_strip_region(Lx, 0, w)
        vne = sum(von_neumann_entropy(cov(s.hamiltonian), As) for s in fam)
        e = sum(epe_trace(cov(s.hamiltonian), As, As.complement(2 * Lx)) for s in fam)
        assert abs(vne - von_neumann_entropy(C, A)) < 1e-9
        assert abs(e - epe_trace(C, A, A.complement(Lx * Ly))) < 1e-9


# ---------------------------------------------------------------- regions


def test_interval_region():
    assert interval_region(10, 0, 3).indices == (0, 1, 2)
    with pytest.raises(ValidationError):
        interval_region(10, 8, 3)


def test_strip_region():
    r = strip_region(4, 2, 1, 2)
    assert r.indices == (2, 3, 4, 5)
    assert len(strip_region(4, 2, 0, 4).complement(8)) == 0
    assert strip_region(4, 2, 3, 2).indices == (0, 1, 6, 7)
    with pytest.raises(ValidationError):
        strip_region(4, 2, 0, 5)


def test_lattice_spec_validation():
    with pytest.raises(ValidationError):
        LatticeSpec("chain", (1,))
    with pytest.raises(ValidationError):
        LatticeSpec("honeycomb", (4,))
    with pytest.raises(ValidationError):
        LatticeSpec("chain", (4,), (1.0,), ("twisted",))
    assert LatticeSpec.pi_flux(6, 4).n_cut == 8
