"""Bertrand pairs in a 3-dimensional Lie group.

The input curve (the "mate", written with a tilde below) is an
``ApparatusField`` ``app`` sampled on its own arc length ``s*``. The partner
curve ``alpha`` sharing its principal normal lines is described at the
frame level through

    rho = (tau~ - tau~_G)' / kappa~'

and the harmonic curvature ``H~`` of the mate. Derivatives of ``kappa~``
and ``tau~`` are always finite differences on the grid.

Two offset conventions meet here. The relation ``lam kappa + mu kappa H = 1``
uses an offset ``lam`` with ``beta = alpha + lam N``; the partner
construction ``alpha = alpha~ - lam' eps N~`` uses ``lam' = -eps lam``.
``BertrandReport.lambda_`` holds the latter (per sample),
``BertrandReport.lambda_offset`` the former.
"""

from dataclasses import dataclass, field

import numpy as np

from . import diff
from .errors import HelicalDegenerate, PlanarDegenerate, SingularOffset
from .frenet import ApparatusField, _finish

DENOM_MIN = 1e-10


def _check_epsilon(epsilon):
    if epsilon not in (1, -1):
        raise ValueError(f"epsilon must be +1 or -1, got {epsilon!r}")
    return int(epsilon)


def kappa_derivatives(app):
    """``(kappa', kappa'')`` with respect to the curve's arc length."""
    d1 = diff.derivative(app.kappa, app.grid.h) / app.speed
    d2 = diff.derivative(d1, app.grid.h) / app.speed
    return d1, d2


# -- pointwise closed forms -------------------------------------------------

def lambda_formula(rho, kappa, H, epsilon):
    """Offset ``lam = -eps rho / (kappa (rho - H))``."""
    return -epsilon * rho / (kappa * (rho - H))


def mate_kappa_formula(rho, kappa, H, epsilon):
    """Signed curvature of the partner, ``-eps k (1 + H rho)(rho - H) / (H (1 + rho^2))``."""
    return -epsilon * kappa * (1 + H * rho) * (rho - H) / (H * (1 + rho**2))


def mate_torsion_formula(rho, kappa, H):
    """``tau - tau_G`` of the partner, ``k (rho - H)^2 / (H (1 + rho^2))``."""
    return kappa * (rho - H) ** 2 / (H * (1 + rho**2))


def gamma_formula(rho, kappa, H):
    """``-k (rho - H) / (k^2 (1 + H^2)^(3/2))`` as stated."""
    return -kappa * (rho - H) / (kappa**2 * (1 + H**2) ** 1.5)


def ds_dsstar_formula(rho, H):
    """Signed ``ds/ds*`` of the arc-length map, ``H sqrt(1 + rho^2) / (rho - H)``."""
    return H * np.sqrt(1 + rho**2) / (rho - H)


def dsstar_ds_from_offset(lam, epsilon, kappa, torsion_rel):
    """``ds*/ds = 1 / sqrt((1 + lam eps k)^2 + lam^2 (tau - tau_G)^2)``."""
    return 1.0 / np.sqrt((1 + lam * epsilon * kappa) ** 2
                         + lam**2 * torsion_rel**2)


# -- field-level operations -------------------------------------------------

def rho(app):
    """``rho = (tau~ - tau~_G)' / kappa~'`` per sample; NaN where ``|kappa~'| <= 1e-10``.

    Raises ``HelicalDegenerate`` when more than half of the interior is
    singular (constant curvature, helices).
    """
    h = app.grid.h
    dk = diff.derivative(app.kappa, h)
    dw = diff.derivative(app.torsion_rel, h)
    singular = np.abs(dk / app.speed) <= DENOM_MIN
    inside = app.interior()
    if np.mean(singular[inside]) > 0.5:
        raise HelicalDegenerate(
            "kappa' vanishes on most of the domain; rho is undefined")
    out = np.full(app.grid.n, np.nan)
    out[~singular] = dw[~singular] / dk[~singular]
    return out


def lambda_from_rho(app, epsilon=1, rho_values=None):
    """Per-sample offset ``-eps rho / (kappa~ (rho - H~))``; NaN where ``rho = H~``."""
    epsilon = _check_epsilon(epsilon)
    r = rho(app) if rho_values is None else rho_values
    with np.errstate(invalid="ignore"):
        ok = np.abs(r - app.H) > DENOM_MIN
    out = np.full(app.grid.n, np.nan)
    out[ok] = lambda_formula(r[ok], app.kappa[ok], app.H[ok], epsilon)
    return out


@dataclass
class BertrandReport:
    epsilon: int
    rho: np.ndarray
    lambda_: np.ndarray
    lambda_mean: float
    lambda_maxdev: float
    lambda_offset: float
    mu_fit: float
    pair_residual: np.ndarray
    is_pair: bool
    singular_samples: list = field(default_factory=list)
    tol: float = 1e-6

    def summary(self):
        inside = ~np.isnan(self.pair_residual)
        return {
            "epsilon": self.epsilon,
            "lambda_mean": self.lambda_mean,
            "lambda_maxdev": self.lambda_maxdev,
            "lambda_offset": self.lambda_offset,
            "mu_fit": self.mu_fit,
            "rho_mean": float(np.nanmean(self.rho)),
            "pair_residual_max": float(np.max(np.abs(
                self.pair_residual[inside]))) if inside.any() else None,
            "is_pair": self.is_pair,
            "n_singular": len(self.singular_samples),
            "tol": self.tol,
        }


def check_bertrand(app, epsilon=1, tol=1e-6):
    """Test whether ``app`` admits a Bertrand partner.

    ``lam`` from the offset formula must be constant; ``mu`` is then fitted by
    least squares to ``lam kappa + mu kappa H = 1`` with ``lam`` fixed, and
    the residual of that relation must vanish within ``tol``.
    """
    epsilon = _check_epsilon(epsilon)
    r = rho(app)
    lam = lambda_from_rho(app, epsilon, r)
    inside = app.interior()
    singular = np.isnan(lam)
    use = inside & ~singular
    if np.mean(singular[inside]) > 0.5:
        # w' = H kappa' makes rho = H~ wherever H~ is constant
        raise HelicalDegenerate(
            "rho equals H~ on most of the domain (general helix); "
            "the offset is undefined")
    lam_mean = float(np.mean(lam[use]))
    lam_maxdev = float(np.max(np.abs(lam[use] - lam_mean)))

    offset = -epsilon * lam_mean
    k, w = app.kappa, app.torsion_rel
    mu = float(np.sum(w[use] * (1 - offset * k[use])) / np.sum(w[use] ** 2))
    residual = np.full(app.grid.n, np.nan)
    residual[inside] = offset * k[inside] + mu * w[inside] - 1.0
    is_pair = (lam_maxdev < tol * (1 + abs(lam_mean))
               and float(np.max(np.abs(residual[inside]))) < tol)
    return BertrandReport(
        epsilon=epsilon, rho=r, lambda_=lam, lambda_mean=lam_mean,
        lambda_maxdev=lam_maxdev, lambda_offset=offset, mu_fit=mu,
        pair_residual=residual, is_pair=bool(is_pair),
        singular_samples=[int(i) for i in np.flatnonzero(singular)],
        tol=tol,
    )


def arclength_integrand(app, rho_values=None):
    r = rho(app) if rho_values is None else rho_values
    with np.errstate(divide="ignore", invalid="ignore"):
        out = ds_dsstar_formula(r, app.H)
        out[np.abs(r - app.H) <= DENOM_MIN] = np.nan
    return out


def _piecewise_cumulative(y, h):
    """Cumulative trapezoid restarted on every sign change or NaN of ``y``."""
    out = np.full(y.shape, np.nan)
    sign = np.sign(y)
    start = None
    for i in range(len(y) + 1):
        end_run = (i == len(y) or np.isnan(y[i])
                   or (start is not None and sign[i] != sign[start]))
        if end_run and start is not None:
            out[start:i] = diff.cumulative_trapezoid(y[start:i], h)
            start = None
        if i < len(y) and not np.isnan(y[i]) and start is None:
            start = i
    return out


def arclength_map(app, strict=False, rho_values=None):
    """Arc length ``s`` of the partner as a function of ``s*``.

    Cumulative trapezoid of ``H~ sqrt(1 + rho^2) / (rho - H~)`` starting at
    0. The integrand is signed; where ``rho - H~`` vanishes or changes sign
    the map restarts at 0 on each piece (or ``SingularOffset`` is raised when
    ``strict``).
    """
    y = arclength_integrand(app, rho_values)
    broken = np.isnan(y) | (np.sign(y) != np.sign(y[0]))
    if strict and broken.any():
        i = int(np.flatnonzero(broken)[0])
        raise SingularOffset(
            f"rho - H~ vanishes or changes sign near s* = {app.s[i]:.6g}")
    return _piecewise_cumulative(y, app.grid.h)


def geodesic_curvature_gamma(app, rho_values=None):
    """Stated closed form ``-k (rho - H) / (k^2 (1 + H^2)^(3/2))`` per sample."""
    r = rho(app) if rho_values is None else rho_values
    return gamma_formula(r, app.kappa, app.H)


@dataclass
class MateApparatus:
    """Closed-form apparatus of the Bertrand partner of ``source``.

    ``derived`` is sampled on the source grid ``s*``; its ``speed`` is
    ``|ds/ds*|``. ``derived.kappa`` is ``|kappa_signed|``.
    """

    source: ApparatusField
    derived: ApparatusField
    epsilon: int
    rho: np.ndarray
    kappa_signed: np.ndarray
    s_of_sstar: np.ndarray
    s_signed: np.ndarray
    ds_dsstar: np.ndarray
    gamma: np.ndarray
    flags: np.ndarray


def mate_apparatus(app, epsilon=1):
    """Evaluate the partner's frame and curvatures from the closed forms.

    T = -(T~ - rho B~) / sqrt(1 + rho^2),  N = eps N~,
    B = -eps (rho T~ + B~) / sqrt(1 + rho^2).

    Raises ``PlanarDegenerate`` if ``H~`` vanishes anywhere; samples with
    ``rho = H~`` are flagged and left NaN.
    """
    epsilon = _check_epsilon(epsilon)
    if np.any(np.abs(app.H) < DENOM_MIN):
        raise PlanarDegenerate("H~ vanishes; the partner formulas need H~ != 0")
    r = rho(app)
    H, k = app.H, app.kappa
    with np.errstate(invalid="ignore"):
        flags = np.isnan(r) | (np.abs(r - H) <= DENOM_MIN)
    rs = np.where(flags, np.nan, r)
    root = np.sqrt(1 + rs**2)[:, None]

    T = -(app.T - rs[:, None] * app.B) / root
    N = epsilon * app.N
    B = -epsilon * (rs[:, None] * app.T + app.B) / root
    kappa_signed = mate_kappa_formula(rs, k, H, epsilon)
    torsion_rel = mate_torsion_formula(rs, k, H)

    integrand = arclength_integrand(app, rs)
    s_signed = _piecewise_cumulative(integrand, app.grid.h)
    s_abs = _piecewise_cumulative(np.abs(integrand), app.grid.h)
    tauG = np.full(app.grid.n, app.tauG[0] if np.ndim(app.tauG) else app.tauG)

    derived = _finish(app.grid, T, N, B, np.abs(kappa_signed),
                      torsion_rel + tauG, tauG, speed=np.abs(integrand),
                      flags=flags)
    return MateApparatus(
        source=app, derived=derived, epsilon=epsilon, rho=rs,
        kappa_signed=kappa_signed, s_of_sstar=s_abs, s_signed=s_signed,
        ds_dsstar=integrand, gamma=gamma_formula(rs, k, H), flags=flags,
    )
