"""
Mutual information, scaling lengths, CFT predictions, the two-mode toy model,
line fits and the pi-flux collapse coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .epe import DEFAULT_TAU
from .errors import ValidationError
from .gaussian import RegionLike, _as_matrix, as_region, binary_entropy, von_neumann_entropy
from .models import LatticeSpec

__all__ = [
    "FitResult",
    "ScanRecord",
    "area_law_coefficient",
    "cft_epe_prediction",
    "collapse_dataset",
    "fit_line",
    "l_dirac",
    "l_eff",
    "mutual_information",
    "thermal_length",
    "toy_pair_covariance",
    "toy_pair_epe",
    "toy_pair_mi_exact",
    "toy_pair_mi_leading",
    "toy_pair_weight",
]


@dataclass(frozen=True)
class ScanRecord:
    """
    One observation. ``ell`` is the subsystem width in sites (``ell_x`` for
    strips); ``scaling`` holds ``L_eff`` or ``L_Dirac`` where it applies.
    """

    model: str
    beta: float
    ell: int
    quantity: str
    value: float
    scaling: Optional[float] = None
    spec: Optional[LatticeSpec] = field(default=None, compare=False)

    def __post_init__(self):
        if not self.beta > 0:
            raise ValidationError(f"ScanRecord needs beta > 0, got {self.beta}")
        if self.ell < 1:
            raise ValidationError(f"ScanRecord needs ell >= 1, got {self.ell}")
        if not math.isfinite(self.value):
            raise ValidationError(f"ScanRecord value is not finite: {self.value}")


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r_squared: float
    window: str
    n_points: int = 0

    def predict(self, x):
        return self.slope * np.asarray(x) + self.intercept


# -----------------------------------------------------------------------------
# Entropic quantities
# -----------------------------------------------------------------------------


def mutual_information(C, A: RegionLike, B: RegionLike) -> float:
    """``I(A:B) = S(A) + S(B) - S(A+B)``, roundoff clamped at zero."""
    m = _as_matrix(C)
    A = as_region(A).check(m.shape[0])
    B = as_region(B).check(m.shape[0])
    if not A.isdisjoint(B):
        raise ValidationError("mutual information needs disjoint regions")
    val = von_neumann_entropy(m, A) + von_neumann_entropy(m, B) - von_neumann_entropy(m, A.union(B))
    if val < -1e-9:
        raise ValidationError(f"negative mutual information {val:.3e}; covariance matrix is unphysical")
    return max(val, 0.0)


# -----------------------------------------------------------------------------
# Scaling lengths and CFT forms
# -----------------------------------------------------------------------------


def _positive(**kw):
    for name, v in kw.items():
        if not np.all(np.asarray(v) > 0):
            raise ValidationError(f"{name} must be > 0")


def thermal_length(beta, v_F):
    """Saturation value ``v_F beta / 2 pi`` of the effective length."""
    _positive(beta=beta, v_F=v_F)
    return v_F * np.asarray(beta, dtype=float) / (2 * np.pi)


def l_eff(ell, beta, v_F):
    """
    Conformal length of an interval at finite temperature,
    ``(v_F beta / 2pi) (1 - exp(-2 pi ell / v_F beta))``.
    """
    _positive(ell=ell, beta=beta, v_F=v_F)
    ell = np.asarray(ell, dtype=float)
    lt = thermal_length(beta, v_F)
    out = -lt * np.expm1(-ell / lt)
    return float(out) if out.ndim == 0 else out


# the strip infrared length is the same function of (ell_x, beta, v_F)
l_dirac = l_eff


def cft_epe_prediction(ell, beta, v_F, c=1.0, a_cut=1.0, const=0.0):
    """``(c/3) ln[(v_F beta / 2 pi a)(1 - exp(-2 pi ell / v_F beta))] + const``."""
    _positive(a_cut=a_cut)
    return (c / 3.0) * np.log(l_eff(ell, beta, v_F) / a_cut) + const


def cft_thermal_entropy(ell, beta, v_F, c=1.0, a_cut=1.0, const=0.0):
    """Finite-temperature interval entropy ``(c/3) ln[(v_F beta / pi a) sinh(pi ell / v_F beta)]``."""
    _positive(ell=ell, beta=beta, v_F=v_F, a_cut=a_cut)
    x = np.pi * np.asarray(ell, dtype=float) / (v_F * beta)
    return (c / 3.0) * np.log(v_F * beta / (np.pi * a_cut) * np.sinh(x)) + const


# -----------------------------------------------------------------------------
# Two-mode toy model [[lam, c], [c, lam]]
# -----------------------------------------------------------------------------


def _check_toy(lam, c):
    if not abs(lam) < 1:
        raise ValidationError(f"toy model needs |lambda| < 1, got {lam}")
    if abs(lam + c) > 1 or abs(lam - c) > 1:
        raise ValidationError(f"unphysical toy pair: |lambda +- c| must be <= 1 (lambda={lam}, c={c})")


def toy_pair_covariance(lam: float, c: float) -> np.ndarray:
    _check_toy(lam, c)
    return np.array([[lam, c], [c, lam]], dtype=float)


def toy_pair_weight(lam: float, c: float) -> float:
    _check_toy(lam, c)
    return c * c / ((1 - lam) * (1 + lam))


def toy_pair_epe(lam: float, c: float) -> float:
    """Exact EPE of one pair, ``c^2 / (1 - lambda^2) s(lambda)``."""
    return toy_pair_weight(lam, c) * binary_entropy(lam)


def toy_pair_mi_leading(lam: float, c: float) -> float:
    """Leading small-``c`` mutual information ``c^2 / (1 - lambda^2)``."""
    return toy_pair_weight(lam, c)


def toy_pair_mi_exact(lam: float, c: float) -> float:
    _check_toy(lam, c)
    return 2 * binary_entropy(lam) - binary_entropy(lam + c) - binary_entropy(lam - c)


# -----------------------------------------------------------------------------
# Fits
# -----------------------------------------------------------------------------


def fit_line(points, window: Optional[Tuple[float, float]] = None) -> FitResult:
    """
    Ordinary least squares ``y = slope x + intercept`` over ``window`` (closed
    x-range, default all points). Needs at least three points and two
    distinct x values.
    """
    pts = np.asarray(list(points), dtype=float).reshape(-1, 2)
    x, y = pts[:, 0], pts[:, 1]
    lo, hi = (-np.inf, np.inf) if window is None else window
    sel = (x >= lo) & (x <= hi)
    x, y = x[sel], y[sel]
    desc = "all" if window is None else f"[{lo:.6g}, {hi:.6g}]"
    if x.size < 3:
        raise ValidationError(f"fit needs >= 3 points in window {desc}, got {x.size}")
    xm = x.mean()
    sxx = np.sum((x - xm) ** 2)
    if sxx <= 1e-14 * max(1.0, float(np.sum(x**2))):
        raise ValidationError("fit x values are degenerate")
    ym = y.mean()
    slope = float(np.sum((x - xm) * (y - ym)) / sxx)
    intercept = float(ym - slope * xm)
    syy = np.sum((y - ym) ** 2)
    resid = np.sum((y - slope * x - intercept) ** 2)
    r2 = 1.0 if syy == 0 else float(min(1.0, max(0.0, 1 - resid / syy)))
    return FitResult(slope, intercept, r2, desc, int(x.size))


# -----------------------------------------------------------------------------
# pi-flux area law and collapse
# -----------------------------------------------------------------------------


def eps_window(Lx: int) -> np.ndarray:
    """
    Strip widths ``[L_x/8, L_x/3]`` used to extract the area-law coefficient,
    widened upward to three widths on lattices too narrow for that.
    """
    lo = max(1, int(math.ceil(Lx / 8)))
    hi = max(int(Lx // 3), lo + 2)
    if hi > Lx // 2:
        raise ValidationError(f"L_x = {Lx} is too small for the area-law window")
    return np.arange(lo, hi + 1)


def area_law_coefficient(
    spec: LatticeSpec,
    widths: Optional[Sequence[int]] = None,
    threads: Optional[int] = None,
    tau: float = DEFAULT_TAU,
    full_matrix: bool = False,
    return_fit: bool = False,
):
    """
    Area-law coefficient of the pi-flux ground state per unit cut length.

    The ground-state EPE density ``E/N_cut`` (here equal to the entanglement
    entropy density) is fitted linearly in ``1/ell_x`` over ``widths``
    (default :func:`eps_window`); the intercept is the coefficient.
    """
    from .scans import ground_strip_epe

    if spec.kind != "pi_flux":
        raise ValidationError("area_law_coefficient needs a pi_flux LatticeSpec")
    Lx = spec.sizes[0]
    widths = eps_window(Lx) if widths is None else np.asarray(widths)
    values = ground_strip_epe(spec, widths, threads=threads, tau=tau, full_matrix=full_matrix)
    dens = values / spec.n_cut
    fit = fit_line(np.column_stack([1.0 / widths, dens]))
    if return_fit:
        return fit.intercept, fit, dens
    return fit.intercept


def collapse_dataset(records: Iterable[ScanRecord], eps: float) -> List[Tuple[float, float]]:
    """
    ``(1/L_Dirac, [eps N_cut - E]/N_cut)`` for every pi-flux EPE record.

    All records must come from one lattice spec.
    """
    records = [r for r in records if r.quantity == "epe"]
    specs = {r.spec for r in records}
    if len(specs) != 1 or None in specs:
        raise ValidationError("collapse_dataset needs records from exactly one pi-flux spec")
    spec = specs.pop()
    if spec.kind != "pi_flux":
        raise ValidationError("collapse_dataset needs pi-flux records")
    v_F, n_cut = spec.fermi_velocity, spec.n_cut
    out = []
    for r in records:
        ld = l_dirac(r.ell, r.beta, v_F)
        out.append((1.0 / ld, (eps * n_cut - r.value) / n_cut))
    return out
