"""Spherical indicatrices of the Bertrand partner.

For a Bertrand pair ``(alpha, alpha~)`` the tangent, principal normal and
binormal indicatrices of ``alpha`` are curves on the unit sphere of the Lie
algebra. Their Frenet apparatus is evaluated here from the stated closed
forms in terms of ``kappa~``, its first two derivatives, ``H~`` and ``rho``.

Arc-length integrals are written against ``ds`` (the partner's arc length);
they are converted to the sampling variable ``s*`` through the signed
``ds/ds*`` of the arc-length map. ``s_ind`` integrates the absolute value,
``s_ind_signed`` keeps the sign of the stated integrand.

No correction is applied to any stated formula. Whether each one agrees
with the geometry is decided by :mod:`liebertrand.verify`.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import bertrand
from .bertrand import _check_epsilon, _piecewise_cumulative

KINDS = ("tangent", "normal", "binormal")


@dataclass
class IndicatrixApparatus:
    kind: str
    epsilon: int
    s: np.ndarray
    curve_samples: np.ndarray
    T: np.ndarray
    N: np.ndarray
    B: np.ndarray
    kappa_ind: np.ndarray
    tau_minus_tauG_ind: np.ndarray
    ds_ind_dsstar: np.ndarray
    s_ind: np.ndarray
    s_ind_signed: np.ndarray
    gamma_ind: Optional[np.ndarray]
    flags: np.ndarray

    @property
    def frame(self):
        return self.T, self.N, self.B


@dataclass
class _Inputs:
    """Mate quantities every closed form is written in."""

    Tm: np.ndarray
    Nm: np.ndarray
    Bm: np.ndarray
    k: np.ndarray
    k1: np.ndarray
    k2: np.ndarray
    H: np.ndarray
    rho: np.ndarray
    ds_dsstar: np.ndarray
    flags: np.ndarray
    h: float
    s: np.ndarray


def _inputs(app):
    r = bertrand.rho(app)
    H = app.H
    with np.errstate(invalid="ignore"):
        flags = np.isnan(r) | (np.abs(r - H) <= bertrand.DENOM_MIN)
    r = np.where(flags, np.nan, r)
    k1, k2 = bertrand.kappa_derivatives(app)
    return _Inputs(app.T, app.N, app.B, app.kappa, k1, k2, H, r,
                   bertrand.ds_dsstar_formula(r, H), flags, app.grid.h, app.s)


def _col(x):
    return np.asarray(x)[:, None]


# -- pointwise closed forms -------------------------------------------------

def tangent_spherical_helix_condition(kappa, dkappa, ddkappa, rho, H):
    """``k'' k (1 + H^2) - 3 k'^2 (1 + rho H)``."""
    return ddkappa * kappa * (1 + H**2) - 3 * dkappa**2 * (1 + rho * H)


def normal_planarity_condition(kappa, dkappa, ddkappa, rho, H):
    """``(3 k'^2 - k'' k)(1 + rho^2) - 3 k'^2 rho (H - rho)``."""
    return ((3 * dkappa**2 - ddkappa * kappa) * (1 + rho**2)
            - 3 * dkappa**2 * rho * (H - rho))


def kappa_t_formula(rho, H):
    return np.sqrt(1 + rho**2) * np.sqrt(1 + H**2) / (H - rho)


def torsion_t_formula(kappa, dkappa, rho, H):
    return -dkappa * np.sqrt(1 + rho**2) / (kappa**2 * (1 + H**2))


def st_integrand_formula(kappa, rho, H):
    """Stated integrand of ``s_t`` against ``ds``: ``-k (rho-H)^2 / (H (1+rho)^2)``."""
    return -kappa * (rho - H) ** 2 / (H * (1 + rho) ** 2)


def normal_Q(kappa, dkappa, H, rho):
    return dkappa**2 * (H - rho) ** 2 + kappa**4 * (1 + H**2) ** 3


def kappa_n_formula(kappa, dkappa, rho, H):
    return (np.sqrt(normal_Q(kappa, dkappa, H, rho))
            / (kappa**2 * (1 + H**2) ** 1.5))


def torsion_n_formula(kappa, dkappa, ddkappa, rho, H, epsilon):
    return (epsilon * (H - rho)
            * normal_planarity_condition(kappa, dkappa, ddkappa, rho, H)
            / normal_Q(kappa, dkappa, H, rho))


def sn_integrand_formula(kappa, rho, H):
    return kappa * (rho - H) * np.sqrt(1 + H**2) / (H * np.sqrt(1 + rho**2))


def kappa_b_formula(rho, H):
    return np.sqrt((1 + H**2) * (1 + rho**2)) / (rho - H)


def torsion_b_formula(kappa, dkappa, rho, H, epsilon):
    return epsilon * dkappa * np.sqrt(1 + rho**2) / (kappa**2 * (1 + H**2))


def sb_integrand_formula(kappa, rho, H):
    return -kappa * (rho - H) ** 2 / (H * (1 + rho**2))


def dsstar_dsind_formula(kappa, rho, H):
    """Stated ``ds*/ds_t = ds*/ds_b = sqrt(1 + rho^2) / (k (H - rho))``."""
    return np.sqrt(1 + rho**2) / (kappa * (H - rho))


def gamma_tb_formula(kappa, dkappa, ddkappa, rho, H):
    """Stated geodesic curvature shared by the tangent and binormal cases."""
    cond = tangent_spherical_helix_condition(kappa, dkappa, ddkappa, rho, H)
    num = -kappa**3 * (1 + H**2) ** 1.5 * (rho - H) ** 2 * cond
    den = (np.sqrt(1 + rho**2)
           * (kappa * (1 + H**2) ** 3 + dkappa**2 * (H - rho) ** 2) ** 1.5)
    return num / den * dsstar_dsind_formula(kappa, rho, H)


# -- field-level operations -------------------------------------------------

def _assemble(kind, epsilon, x, curve, T, N, B, kappa, torsion,
              per_s_integrand, gamma):
    ds_ind = per_s_integrand * x.ds_dsstar
    return IndicatrixApparatus(
        kind=kind, epsilon=epsilon, s=x.s, curve_samples=curve,
        T=T, N=N, B=B, kappa_ind=kappa, tau_minus_tauG_ind=torsion,
        ds_ind_dsstar=ds_ind,
        s_ind=_piecewise_cumulative(np.abs(ds_ind), x.h),
        s_ind_signed=_piecewise_cumulative(ds_ind, x.h),
        gamma_ind=gamma, flags=x.flags.copy(),
    )


def tangent_indicatrix(app, epsilon=1):
    """Tangent indicatrix ``alpha_t = -(T~ - rho B~) / sqrt(1 + rho^2)``."""
    epsilon = _check_epsilon(epsilon)
    x = _inputs(app)
    r, H = x.rho, x.H
    root_r, root_h = _col(np.sqrt(1 + r**2)), _col(np.sqrt(1 + H**2))
    curve = -(x.Tm - _col(r) * x.Bm) / root_r
    T = -x.Nm
    N = (x.Tm - _col(H) * x.Bm) / root_h
    B = (_col(H) * x.Tm + x.Bm) / root_h
    return _assemble(
        "tangent", epsilon, x, curve, T, N, B,
        kappa_t_formula(r, H), torsion_t_formula(x.k, x.k1, r, H),
        st_integrand_formula(x.k, r, H),
        gamma_tb_formula(x.k, x.k1, x.k2, r, H),
    )


def normal_indicatrix(app, epsilon=1):
    """Principal normal indicatrix ``alpha_n = eps N~``."""
    epsilon = _check_epsilon(epsilon)
    x = _inputs(app)
    r, H, k, k1 = x.rho, x.H, x.k, x.k1
    c = np.sqrt(1 + H**2)
    rootQ = np.sqrt(normal_Q(k, k1, H, r))
    curve = epsilon * x.Nm
    T = -epsilon * (x.Tm - _col(H) * x.Bm) / _col(c)
    N = (-epsilon * (_col(H * k1 * (r - H)) * x.Tm
                     - _col(k**2 * (1 + H**2) ** 2) * x.Nm
                     - _col(k1 * (H - r)) * x.Bm)
         / _col(rootQ * c))
    B = (_col(k**2 * H * (1 + H**2)) * x.Tm + _col(k1 * (r - H)) * x.Nm
         + _col(k**2 * (1 + H**2)) * x.Bm) / _col(rootQ)
    return _assemble(
        "normal", epsilon, x, curve, T, N, B,
        kappa_n_formula(k, k1, r, H),
        torsion_n_formula(k, k1, x.k2, r, H, epsilon),
        sn_integrand_formula(k, r, H), None,
    )


def binormal_indicatrix(app, epsilon=1):
    """Binormal indicatrix ``alpha_b = -eps (rho T~ + B~) / sqrt(1 + rho^2)``."""
    epsilon = _check_epsilon(epsilon)
    x = _inputs(app)
    r, H = x.rho, x.H
    root_r, root_h = _col(np.sqrt(1 + r**2)), _col(np.sqrt(1 + H**2))
    curve = -epsilon * (_col(r) * x.Tm + x.Bm) / root_r
    T = epsilon * x.Nm
    N = -epsilon * (x.Tm - _col(H) * x.Bm) / root_h
    B = (_col(H) * x.Tm + x.Bm) / root_h
    return _assemble(
        "binormal", epsilon, x, curve, T, N, B,
        kappa_b_formula(r, H), torsion_b_formula(x.k, x.k1, r, H, epsilon),
        sb_integrand_formula(x.k, r, H),
        gamma_tb_formula(x.k, x.k1, x.k2, r, H),
    )


def indicatrix(app, kind, epsilon=1):
    builders = {"tangent": tangent_indicatrix, "normal": normal_indicatrix,
                "binormal": binormal_indicatrix, "t": tangent_indicatrix,
                "n": normal_indicatrix, "b": binormal_indicatrix}
    try:
        return builders[kind](app, epsilon)
    except KeyError:
        raise ValueError(f"unknown indicatrix kind {kind!r}") from None


def tangent_spherical_helix_residual(app):
    """Per-sample tangent spherical-helix condition on the mate."""
    x = _inputs(app)
    return tangent_spherical_helix_condition(x.k, x.k1, x.k2, x.rho, x.H)


def normal_planarity_residual(app):
    """Per-sample principal-normal planarity condition on the mate."""
    x = _inputs(app)
    return normal_planarity_condition(x.k, x.k1, x.k2, x.rho, x.H)


def gamma_tangent(app):
    x = _inputs(app)
    return gamma_tb_formula(x.k, x.k1, x.k2, x.rho, x.H)


def gamma_binormal(app):
    x = _inputs(app)
    return gamma_tb_formula(x.k, x.k1, x.k2, x.rho, x.H)
