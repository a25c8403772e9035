"""Sampled Frenet apparatus of curves in a 3-dimensional Lie group.

In left-invariant coordinates the Frenet equations of an arc-length curve
in ``G`` read::

    T' =  kappa N
    N' = -kappa T + (tau - tau_G) B
    B' = -(tau - tau_G) N

where ``'`` is the coordinate derivative. This module integrates them from
intrinsic data, recovers the apparatus from sampled tangent fields, and
evaluates the harmonic curvature ``H = (tau - tau_G) / kappa``, the slant
helix function ``sigma = kappa (1 + H^2)^(3/2) / H'`` and the helix
predicates built on them.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import diff
from .errors import (ExpressionDomainError, NonPositiveCurvature,
                     ValidationError)
from .expr import Expression
from .lie import LieStructure, frame_deviation, inner, tauG_from_frame

KAPPA_MIN = 1e-12
TANGENT_DERIVATIVE_MIN = 1e-10
SIGMA_DERIVATIVE_MIN = 1e-10
UNIT_TOL = 1e-6


@dataclass(frozen=True)
class Grid:
    """Uniform grid ``s0 = u_0 < ... < u_{n-1} = s1``."""

    s0: float
    s1: float
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 9:
            raise ValidationError(f"grid needs n >= 9 samples, got {self.n}")
        if not self.s1 > self.s0:
            raise ValidationError(
                f"degenerate domain [{self.s0}, {self.s1}]")

    @property
    def h(self):
        return (self.s1 - self.s0) / (self.n - 1)

    @property
    def values(self):
        return np.linspace(self.s0, self.s1, self.n)

    def refined(self, factor=2):
        return Grid(self.s0, self.s1, factor * (self.n - 1) + 1)


@dataclass
class ApparatusField:
    """Frenet apparatus of one curve sampled on ``grid``.

    ``speed`` is ``ds/du`` when the grid parameter ``u`` is not arc length;
    it is identically 1 for arc-length grids. ``low_confidence`` marks the
    boundary band computed with one-sided stencils.
    """

    grid: Grid
    T: np.ndarray
    N: np.ndarray
    B: np.ndarray
    kappa: np.ndarray
    tau: np.ndarray
    tauG: np.ndarray
    H: np.ndarray
    sigma: np.ndarray
    sigma_defined: np.ndarray
    speed: Optional[np.ndarray] = None
    low_confidence: Optional[np.ndarray] = None
    arclength: Optional[np.ndarray] = None
    flags: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        n = self.grid.n
        if self.speed is None:
            self.speed = np.ones(n)
        if self.low_confidence is None:
            self.low_confidence = np.zeros(n, dtype=bool)
        if self.arclength is None:
            self.arclength = diff.cumulative_trapezoid(self.speed, self.grid.h)
        if self.flags is None:
            self.flags = np.zeros(n, dtype=bool)

    @property
    def s(self):
        return self.grid.values

    @property
    def torsion_rel(self):
        """``tau - tau_G`` per sample."""
        return self.tau - self.tauG

    def interior(self, depth=1):
        return diff.interior_mask(self.grid.n, depth)


class CurveSpec:
    """Intrinsic definition of a curve: ``kappa(s)``, ``tau(s)`` on a grid."""

    def __init__(self, kappa_expr, tau_expr, domain, n=2001,
                 structure=None, initial_frame=None):
        self.kappa_expr = _as_expression(kappa_expr)
        self.tau_expr = _as_expression(tau_expr)
        self.domain = (float(domain[0]), float(domain[1]))
        self.n = int(n)
        self.grid = Grid(self.domain[0], self.domain[1], self.n)
        self.structure = structure if structure is not None else LieStructure()
        if initial_frame is None:
            initial_frame = np.eye(3)
        F = np.asarray(initial_frame, dtype=float)
        if F.shape != (3, 3):
            raise ValidationError("initial_frame must be three 3-vectors")
        if frame_deviation(F[0], F[1], F[2]) > 1e-9:
            raise ValidationError("initial_frame is not orthonormal")
        if np.dot(np.cross(F[0], F[1]), F[2]) < 0:
            raise ValidationError("initial_frame is not right-handed")
        self.initial_frame = F

    def with_samples(self, n):
        return CurveSpec(self.kappa_expr, self.tau_expr, self.domain, n,
                         self.structure, self.initial_frame)

    def __repr__(self):
        return (f"CurveSpec(kappa={self.kappa_expr.text!r}, "
                f"tau={self.tau_expr.text!r}, domain={self.domain}, "
                f"n={self.n}, tau_G={self.structure.tau_G})")


def _as_expression(e):
    return e if isinstance(e, Expression) else Expression(str(e))


def _frenet_matrix(kappa, w):
    return np.array([[0.0, kappa, 0.0],
                     [-kappa, 0.0, w],
                     [0.0, -w, 0.0]])


def _orthonormalize(F):
    T = F[0] / np.linalg.norm(F[0])
    N = F[1] - np.dot(F[1], T) * T
    N /= np.linalg.norm(N)
    return np.array([T, N, np.cross(T, N)])


def integrate_frenet(spec):
    """Integrate the Frenet equations with classical RK4 on ``spec.grid``.

    The frame is re-orthonormalized after every step (Gram-Schmidt on T, N
    and ``B = T x N``).
    """
    grid = spec.grid
    n, h = grid.n, grid.h
    fine = np.linspace(grid.s0, grid.s1, 2 * n - 1)
    try:
        kappa_f = np.broadcast_to(spec.kappa_expr(fine), fine.shape)
        tau_f = np.broadcast_to(spec.tau_expr(fine), fine.shape)
    except ExpressionDomainError as exc:
        raise ExpressionDomainError(
            f"expression not finite on the grid: {exc}",
            subexpression=exc.subexpression) from None
    bad = np.flatnonzero(kappa_f <= KAPPA_MIN)
    if bad.size:
        raise NonPositiveCurvature(
            f"kappa <= {KAPPA_MIN:g} at s = {fine[bad[0]]:.6g}")
    w_f = tau_f - spec.structure.tau_G

    frames = np.empty((n, 3, 3))
    F = spec.initial_frame.copy()
    frames[0] = F
    for i in range(n - 1):
        j = 2 * i
        A0 = _frenet_matrix(kappa_f[j], w_f[j])
        Am = _frenet_matrix(kappa_f[j + 1], w_f[j + 1])
        A1 = _frenet_matrix(kappa_f[j + 2], w_f[j + 2])
        k1 = A0 @ F
        k2 = Am @ (F + 0.5 * h * k1)
        k3 = Am @ (F + 0.5 * h * k2)
        k4 = A1 @ (F + h * k3)
        F = _orthonormalize(F + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4))
        frames[i + 1] = F

    kappa = np.array(kappa_f[::2], dtype=float)
    tau = np.array(tau_f[::2], dtype=float)
    tauG = np.full(n, spec.structure.tau_G)
    return _finish(grid, frames[:, 0], frames[:, 1], frames[:, 2],
                   kappa, tau, tauG)


def _finish(grid, T, N, B, kappa, tau, tauG, speed=None, flags=None):
    with np.errstate(divide="ignore", invalid="ignore"):
        H = (tau - tauG) / kappa
    app = ApparatusField(grid, T, N, B, kappa, tau, tauG, H,
                         sigma=np.full(grid.n, np.nan),
                         sigma_defined=np.zeros(grid.n, dtype=bool),
                         speed=speed, flags=flags,
                         low_confidence=~diff.interior_mask(grid.n))
    app.sigma, app.sigma_defined = sigma_function(app)
    return app


def apparatus_from_tangent(T, grid, L, speed=None, allow_flat=False, stride=1):
    """Recover the Frenet apparatus from sampled unit tangents.

    ``kappa = |dT/ds|``, ``N = (dT/ds) / kappa``, ``B = T x N``,
    ``tau - tau_G = <dN/ds, B>`` and ``tau_G`` from the frame. Derivatives
    are fourth-order central differences (second order on the two-sample
    boundary band, which is marked ``low_confidence``).

    ``speed`` (``ds/du``) allows grids that are not arc length. With
    ``allow_flat`` samples where ``|dT/ds|`` vanishes are flagged and left
    as NaN instead of raising ``NonPositiveCurvature``. ``stride`` is passed
    to :func:`liebertrand.diff.derivative`.
    """
    T = np.asarray(T, dtype=float)
    if T.shape != (grid.n, 3):
        raise ValidationError(
            f"tangent samples have shape {T.shape}, expected ({grid.n}, 3)")
    dev = np.max(np.abs(np.linalg.norm(T, axis=1) - 1.0))
    if dev > UNIT_TOL:
        raise ValidationError(f"tangent samples not unit length (dev {dev:.2e})")
    speed = np.ones(grid.n) if speed is None else np.asarray(speed, float)

    dT = diff.derivative(T, grid.h, stride) / speed[:, None]
    kappa = np.linalg.norm(dT, axis=1)
    flat = kappa < TANGENT_DERIVATIVE_MIN
    if flat.any() and not allow_flat:
        i = int(np.flatnonzero(flat)[0])
        raise NonPositiveCurvature(
            f"|dT/ds| < {TANGENT_DERIVATIVE_MIN:g} at u = {grid.values[i]:.6g}")
    with np.errstate(divide="ignore", invalid="ignore"):
        Np = dT - inner(dT, T)[:, None] * T
        N = Np / np.linalg.norm(Np, axis=1)[:, None]
    N[flat] = np.nan
    B = np.cross(T, N)
    dN = diff.derivative(N, grid.h, stride) / speed[:, None]
    w = inner(dN, B)
    ok = ~np.isnan(N[:, 0])
    tauG = np.full(grid.n, np.nan)
    if ok.any():
        tauG[ok] = tauG_from_frame(T[ok], N[ok], B[ok], L)
    return _finish(grid, T, N, B, kappa, w + tauG, tauG, speed=speed,
                   flags=flat)


def apparatus_from_velocity(V, grid, L, allow_flat=False, stride=1):
    """Apparatus of a curve given its (not necessarily unit) velocity samples."""
    V = np.asarray(V, dtype=float)
    speed = np.linalg.norm(V, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        T = V / speed[:, None]
    return apparatus_from_tangent(T, grid, L, speed=speed,
                                  allow_flat=allow_flat, stride=stride)


def harmonic_curvature(kappa, tau, tauG):
    """``H = (tau - tau_G) / kappa``."""
    kappa = np.asarray(kappa, dtype=float)
    if np.any(kappa <= 0):
        raise NonPositiveCurvature("harmonic curvature needs kappa > 0")
    H = (np.asarray(tau, float) - np.asarray(tauG, float)) / kappa
    return float(H) if H.ndim == 0 else H


def sigma_function(app):
    """Slant-helix function ``kappa (1 + H^2)^(3/2) / H'`` per sample.

    Returns ``(sigma, defined)``; samples with ``|H'| <= 1e-10`` (or an
    undefined ``H``) are NaN and flagged undefined.
    """
    H = np.asarray(app.H, dtype=float)
    if np.isnan(H).any():
        Hc = np.where(np.isnan(H), 0.0, H)
        dH = diff.derivative(Hc, app.grid.h) / app.speed
        bad = diff.dilate(np.isnan(H), diff.BOUNDARY_BAND)
        dH[bad] = np.nan
    else:
        dH = diff.derivative(H, app.grid.h) / app.speed
    with np.errstate(invalid="ignore"):
        defined = np.abs(dH) > SIGMA_DERIVATIVE_MIN
    sigma = np.full(app.grid.n, np.nan)
    sigma[defined] = (app.kappa[defined] * (1.0 + H[defined] ** 2) ** 1.5
                      / dH[defined])
    return sigma, defined


@dataclass(frozen=True)
class Classification:
    planar: bool
    general_helix: bool
    slant_helix: bool
    H_maxdev: float
    sigma_maxdev: float
    sigma_coverage: float
    torsion_max: float

    def as_dict(self):
        return dict(self.__dict__)


def classify(app, tol=1e-6):
    """Helix and planarity verdicts on interior samples.

    general helix: ``H`` constant within ``tol``; slant helix: ``sigma``
    defined on at least 90% of the interior and constant within
    ``tol (1 + |mean sigma|)``; planar: ``|tau - tau_G| < tol``.
    """
    inner_mask = app.interior()
    H = app.H[inner_mask]
    H_maxdev = float(np.max(np.abs(H - np.mean(H))))
    torsion_max = float(np.max(np.abs(app.torsion_rel[inner_mask])))

    defined = app.sigma_defined[inner_mask]
    coverage = float(np.mean(defined))
    if defined.any():
        sig = app.sigma[inner_mask][defined]
        mean_sig = np.mean(sig)
        sigma_maxdev = float(np.max(np.abs(sig - mean_sig)))
        slant = coverage >= 0.9 and sigma_maxdev < tol * (1 + abs(mean_sig))
    else:
        sigma_maxdev = float("nan")
        slant = False
    return Classification(
        planar=bool(torsion_max < tol),
        general_helix=bool(H_maxdev < tol),
        slant_helix=bool(slant),
        H_maxdev=H_maxdev,
        sigma_maxdev=sigma_maxdev,
        sigma_coverage=coverage,
        torsion_max=torsion_max,
    )
