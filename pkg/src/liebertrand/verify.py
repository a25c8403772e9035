"""Finite-difference verification of the Bertrand and indicatrix closed forms.

Every closed form is recomputed along an independent numerical route:

* the partner curve is rebuilt at the coordinate level from its velocity
  ``T~ + lam N~'`` (``lam`` from a least-squares fit of the Bertrand relation,
  ``N~'`` by finite differences) and its apparatus is recovered numerically;
* each indicatrix is differentiated as a sampled curve and its apparatus
  recovered the same way (:func:`oracle_apparatus`);
* geodesic curvatures of spherical images are computed from
  ``<g x g', g''> / |g'|^3``.

Oracle derivatives use a fixed physical stencil spacing (``oracle_points``
steps across the domain) so that round-off in the closed-form samples is
not amplified when the grid is refined.

The result is a :class:`VerificationBundle` with one report per display
equation of the Bertrand/indicatrix theory (``EQUATION_IDS``).
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import bertrand, diff, indicatrix
from .errors import DegenerateCurve, NotBertrandPair, ShapeMismatch
from .frenet import Grid, apparatus_from_velocity, integrate_frenet
from .lie import frame_deviation, inner

DEFAULT_PROFILE = {
    "algebraic": 1e-9,
    "first": 1e-4,
    "second": 1e-3,
    "pair": 1e-6,
    "classify": 1e-6,
    "oracle_points": 250,
    "singular_fraction": 1e-2,
}

EQUATION_IDS = (
    "Eq17", "Eq18", "Eq19", "Eq20", "Eq21", "Eq22", "Eq23", "Eq24", "Eq25",
    "Eq26", "Eq27", "Eq29", "Eq30", "Eq31", "Eq32", "Eq33", "Eq34", "Eq36",
    "Eq37", "Eq38", "Eq39", "Eq40", "Eq41",
)

PASS, FAIL, DEGENERATE = "pass", "fail", "degenerate"


def _num(x):
    return None if x is None or not np.isfinite(x) else float(x)


@dataclass
class ResidualReport:
    """Residual statistics of one closed form against its oracle.

    ``sign`` is the orientation applied to the closed form before comparing
    (+1 unless sign alignment was requested); ``signs`` lists it per
    unflagged segment. ``flipped_max_abs`` is the residual the opposite sign
    would give, which documents sign-only discrepancies.
    """

    equation_id: str
    max_abs: float
    mean_abs: float
    quantile95: float
    n_flagged: int
    verdict: str
    tolerance: float
    sign: int = 1
    signs: tuple = ()
    flipped_max_abs: Optional[float] = None
    components: list = field(default_factory=list)
    note: str = ""

    @property
    def passed(self):
        return self.verdict == PASS

    def to_dict(self):
        return {
            "equation_id": self.equation_id,
            "verdict": self.verdict,
            "max_abs": _num(self.max_abs),
            "mean_abs": _num(self.mean_abs),
            "quantile95": _num(self.quantile95),
            "n_flagged": int(self.n_flagged),
            "tolerance": float(self.tolerance),
            "sign": int(self.sign),
            "signs": [int(s) for s in self.signs],
            "flipped_max_abs": _num(self.flipped_max_abs),
            "note": self.note,
            "components": [c.to_dict() for c in self.components],
        }


def _segments(valid):
    """Maximal runs of True in ``valid`` as (start, stop) pairs."""
    edges = np.diff(np.concatenate([[0], valid.astype(int), [0]]))
    return list(zip(np.flatnonzero(edges == 1), np.flatnonzero(edges == -1)))


def compare(closed, numeric, equation_id, tol, flags=None, interior=None,
            align=None, note=""):
    """Compare a closed-form quantity against its numerical oracle.

    Vector quantities (shape ``(n, 3)``) are sign-aligned by default: on each
    maximal run of unflagged samples the closed form is multiplied by the
    sign that minimizes the squared residual. Samples that are flagged,
    outside ``interior`` or non-finite are excluded. ``pass`` means
    ``max_abs < tol``; a report with no usable samples is ``degenerate``.
    """
    a = np.asarray(closed, dtype=float)
    b = np.asarray(numeric, dtype=float)
    if a.shape != b.shape:
        raise ShapeMismatch(
            f"{equation_id}: closed {a.shape} vs numeric {b.shape}")
    vector = a.ndim == 2
    if align is None:
        align = vector
    n = a.shape[0]
    excluded = np.zeros(n, dtype=bool) if flags is None else np.asarray(flags, bool).copy()
    if interior is not None:
        excluded |= ~np.asarray(interior, bool)
    finite = np.isfinite(a) & np.isfinite(b)
    if vector:
        finite = finite.all(axis=1)
    n_flagged = int(np.sum(~finite | (np.asarray(flags, bool) if flags is not None else False)))
    valid = ~excluded & finite

    if not valid.any():
        return ResidualReport(equation_id, np.nan, np.nan, np.nan, n_flagged,
                              DEGENERATE, tol, note=note)

    def residual(x):
        d = x - b
        return np.linalg.norm(d, axis=1) if vector else np.abs(d)

    signs = []
    aligned = a.copy()
    if align:
        for start, stop in _segments(valid):
            seg = slice(start, stop)
            dot = np.sum(a[seg] * b[seg])
            s = -1 if dot < 0 else 1
            aligned[seg] = s * a[seg]
            signs.append(s)
        lengths = [stop - start for start, stop in _segments(valid)]
        sign = signs[int(np.argmax(lengths))]
    else:
        sign = 1
    r = residual(aligned)[valid]
    flipped = float(np.max(residual(-aligned)[valid]))
    max_abs = float(np.max(r))
    return ResidualReport(
        equation_id=equation_id,
        max_abs=max_abs,
        mean_abs=float(np.mean(r)),
        quantile95=float(np.quantile(r, 0.95)),
        n_flagged=n_flagged,
        verdict=PASS if max_abs < tol else FAIL,
        tolerance=tol,
        sign=sign,
        signs=tuple(signs),
        flipped_max_abs=flipped,
        note=note,
    )


def combine(equation_id, components, note=""):
    """Equation-level report from per-quantity component reports.

    The statistics and tolerance are those of the component with the largest
    ``max_abs / tolerance``, so ``pass`` holds exactly when every component
    passes.
    """
    verdicts = [c.verdict for c in components]
    if FAIL in verdicts:
        verdict = FAIL
    elif all(v == DEGENERATE for v in verdicts):
        verdict = DEGENERATE
    else:
        verdict = PASS
    finite = [c for c in components if np.isfinite(c.max_abs)]
    worst = (max(finite, key=lambda c: c.max_abs / c.tolerance) if finite
             else components[0])
    return ResidualReport(
        equation_id=equation_id,
        max_abs=worst.max_abs,
        mean_abs=worst.mean_abs,
        quantile95=worst.quantile95,
        n_flagged=max(c.n_flagged for c in components),
        verdict=verdict,
        tolerance=worst.tolerance,
        components=list(components),
        note=note,
    )


# -- numerical oracles ------------------------------------------------------

def oracle_apparatus(samples, L, grid=None, stride=1):
    """Numerical Frenet apparatus of a sampled curve.

    Without ``grid`` the sample index is the parameter. The curve is
    reparametrized by arc length through its numerical speed (the chain rule
    is applied per sample, no resampling); the returned field's
    ``arclength`` holds the cumulative length and ``flags`` marks samples
    where the curvature vanishes.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 2 or samples.shape[1] != 3 or samples.shape[0] < 9:
        raise ShapeMismatch(f"need (n >= 9, 3) samples, got {samples.shape}")
    if grid is None:
        grid = Grid(0.0, float(samples.shape[0] - 1), samples.shape[0])
    V = diff.derivative(samples, grid.h, stride)
    speed = np.linalg.norm(V, axis=1)
    length = diff.cumulative_trapezoid(speed, grid.h)[-1]
    if length < 1e-8:
        raise DegenerateCurve(f"curve length {length:.3e} is below 1e-8")
    return apparatus_from_velocity(V, grid, L, allow_flat=True, stride=stride)


def spherical_geodesic_curvature(samples, h, stride=1):
    """Geodesic curvature ``<g x g', g''> / |g'|^3`` of a curve on the unit sphere."""
    g = np.asarray(samples, dtype=float)
    d1 = diff.derivative(g, h, stride)
    d2 = diff.derivative(d1, h, stride)
    with np.errstate(divide="ignore", invalid="ignore"):
        return inner(np.cross(g, d1), d2) / np.linalg.norm(d1, axis=1) ** 3


def verify_frame_odes(app, tol=1e-5, stride=1):
    """Residuals of the three Frenet rows from finite differences of the frame.

    Returns reports ``Frenet-T``, ``Frenet-N`` and ``Frenet-B`` for
    ``T' - kappa N``, ``N' + kappa T - (tau - tau_G) B`` and
    ``B' + (tau - tau_G) N``, derivatives taken with respect to arc length.
    """
    h = app.grid.h
    v = app.speed[:, None]
    k = app.kappa[:, None]
    w = app.torsion_rel[:, None]
    dT = diff.derivative(app.T, h, stride) / v
    dN = diff.derivative(app.N, h, stride) / v
    dB = diff.derivative(app.B, h, stride) / v
    interior = diff.interior_mask(app.grid.n, 1, stride)
    rows = {
        "Frenet-T": dT - k * app.N,
        "Frenet-N": dN + k * app.T - w * app.B,
        "Frenet-B": dB + w * app.N,
    }
    zero = np.zeros((app.grid.n, 3))
    return tuple(compare(r, zero, name, tol, flags=app.flags,
                         interior=interior, align=False)
                 for name, r in rows.items())


# -- full verification ------------------------------------------------------

@dataclass
class Check:
    """One closed-form quantity paired with its oracle."""

    component_id: str
    equation_id: str
    closed: Callable[[], np.ndarray]
    numeric: Callable[[], np.ndarray]
    tol_class: str
    depth: int = 1
    align: Optional[bool] = None
    note: str = ""


@dataclass
class VerificationBundle:
    reports: list
    supplementary: list
    self_checks: dict
    meta: dict

    @property
    def report_map(self):
        return {r.equation_id: r for r in self.reports}

    @property
    def self_consistent(self):
        return all(c["ok"] for c in self.self_checks.values())

    @property
    def all_passed(self):
        return all(r.passed for r in self.reports)

    def components(self):
        out = {}
        for r in self.reports + self.supplementary:
            if r.components:
                for c in r.components:
                    out[c.equation_id] = c
            else:
                out[r.equation_id] = r
        return out

    def to_dict(self):
        return {
            "meta": self.meta,
            "equations": [r.to_dict() for r in self.reports],
            "supplementary": [r.to_dict() for r in self.supplementary],
            "self_checks": self.self_checks,
            "summary": {
                "n_equations": len(self.reports),
                "n_pass": sum(r.verdict == PASS for r in self.reports),
                "n_fail": sum(r.verdict == FAIL for r in self.reports),
                "n_degenerate": sum(r.verdict == DEGENERATE
                                    for r in self.reports),
                "self_consistent": self.self_consistent,
            },
        }


# Known disagreements between the stated closed forms and the oracle on regular
# Bertrand families; attached to the reports as notes.
NOTES = {
    "Eq21": "oracle: geodesic curvature of the principal normal image, "
            "k~'(rho-H~)/(k~^2 (1+H~^2)^(3/2)); the stated numerator has k~ in place of k~'",
    "Eq25-st": "stated integrand does not reduce to the arc length of the "
               "tangent image, k~|1+rho H~|/sqrt(1+rho^2) ds*",
    "Eq25-kappa_t": "oracle magnitude sqrt(1+rho^2)sqrt(1+H~^2)/|1+rho H~|",
    "Eq25-tau_t": "oracle carries an extra factor (rho-H~)/(1+rho H~)",
    "Eq26": "stated denominator k~(1+H~^2)^3 where the geometry gives k~^4(1+H~^2)^3",
    "Eq30": "stated N_n is opposite to dT_n/ds_n (frame left-handed)",
    "Eq33": "oracle torsion of the normal image differs from the stated form",
    "Eq34": "compared as the condition implied by the oracle torsion of the normal image",
    "Eq40-tau_b": "stated sign is opposite to the oracle",
    "Eq41": "same closed form as Eq26",
}


class _Context:
    def __init__(self, spec, epsilon, profile):
        self.spec = spec
        self.epsilon = epsilon
        self.profile = profile
        self.L = spec.structure
        app = integrate_frenet(spec)
        self.app = app
        self.report = bertrand.check_bertrand(app, epsilon, profile["pair"])
        if not self.report.is_pair:
            raise NotBertrandPair(
                f"input is not a Bertrand curve at tol {profile['pair']:g}: "
                f"lambda max deviation {self.report.lambda_maxdev:.3e}")
        self.mate = bertrand.mate_apparatus(app, epsilon)
        self.ind = {kind: indicatrix.indicatrix(app, kind, epsilon)
                    for kind in indicatrix.KINDS}
        n, h = app.grid.n, app.grid.h
        self.n, self.h = n, h
        self.stride = max(1, int(round((n - 1) / profile["oracle_points"])))
        k = self.stride

        # Bertrand relation lam k + mu (tau - tau_G) = 1 by least squares.
        use = app.interior()
        A = np.column_stack([app.kappa[use], app.torsion_rel[use]])
        (self.lam_fit, self.mu_fit), *_ = np.linalg.lstsq(
            A, np.ones(A.shape[0]), rcond=None)

        velocity = app.T + self.lam_fit * diff.derivative(app.N, h, k)
        self.partner = apparatus_from_velocity(velocity, app.grid, self.L,
                                               allow_flat=True, stride=k)
        self.ind_oracle = {kind: oracle_apparatus(ind.curve_samples, self.L,
                                                  app.grid, stride=k)
                           for kind, ind in self.ind.items()}
        self.kappa_d1, self.kappa_d2 = bertrand.kappa_derivatives(app)
        self.flags = self._singular_flags()

    def _singular_flags(self):
        frac = self.profile["singular_fraction"]
        weak = np.zeros(self.n, dtype=bool)
        weak |= self.mate.flags
        weak |= ~np.isfinite(self.partner.kappa)
        weak |= self.partner.kappa < frac * np.nanmedian(self.partner.kappa)
        for o in self.ind_oracle.values():
            weak |= o.speed < frac * np.median(o.speed)
        return diff.dilate(weak, 2 * 3 * self.stride)

    def interior(self, depth):
        return diff.interior_mask(self.n, depth, self.stride)

    def geodesic(self, samples):
        return spherical_geodesic_curvature(samples, self.h, self.stride)


def _checks(c):
    app, mate, eps, k = c.app, c.mate, c.epsilon, c.stride
    t, nrm, b = c.ind["tangent"], c.ind["normal"], c.ind["binormal"]
    ot, on, ob = c.ind_oracle["tangent"], c.ind_oracle["normal"], c.ind_oracle["binormal"]
    P = c.partner
    H, rho = app.H, mate.rho

    def torsion(o):
        return o.tau - o.tauG

    def eq27_oracle():
        # E27 = -k~' k~ (1 + H~^2) sigma~' / sigma~
        dsig = diff.derivative(app.sigma, c.h, k)
        return -c.kappa_d1 * app.kappa * (1 + H**2) * dsig / app.sigma

    def eq34_oracle():
        Q = indicatrix.normal_Q(app.kappa, c.kappa_d1, H, rho)
        return torsion(on) * Q / (eps * (H - rho))

    def const(v):
        return lambda: np.full(c.n, v)

    return [
        Check("Eq17-lambda", "Eq17", lambda: c.report.lambda_,
              const(-eps * c.lam_fit), "first", 1),
        Check("Eq18-T", "Eq18", lambda: mate.derived.T, lambda: P.T, "first", 1),
        Check("Eq19-B", "Eq19", lambda: mate.derived.B, lambda: P.B, "second", 2),
        Check("Eq20-kappa", "Eq20", lambda: np.abs(mate.kappa_signed),
              lambda: P.kappa, "second", 2),
        Check("Eq21-Gamma", "Eq21", lambda: mate.gamma,
              lambda: c.geodesic(eps * app.N), "second", 2, True),
        Check("Eq22-s", "Eq22", lambda: mate.s_of_sstar, lambda: P.arclength,
              "first", 1),
        Check("Eq23-alpha_t", "Eq23", lambda: t.curve_samples, lambda: P.T,
              "first", 1),
        Check("Eq24-Tt", "Eq24", lambda: t.T, lambda: ot.T, "first", 1),
        Check("Eq24-Nt", "Eq24", lambda: t.N, lambda: ot.N, "second", 2),
        Check("Eq24-Bt", "Eq24", lambda: t.B, lambda: ot.B, "second", 2),
        Check("Eq25-st", "Eq25", lambda: t.s_ind, lambda: ot.arclength,
              "first", 1),
        Check("Eq25-kappa_t", "Eq25", lambda: np.abs(t.kappa_ind),
              lambda: ot.kappa, "second", 2),
        Check("Eq25-tau_t", "Eq25", lambda: t.tau_minus_tauG_ind,
              lambda: torsion(ot), "second", 3),
        Check("Eq26-Gamma_t", "Eq26", lambda: t.gamma_ind,
              lambda: c.geodesic(t.N), "second", 2, True),
        Check("Eq27-condition", "Eq27",
              lambda: indicatrix.tangent_spherical_helix_residual(app),
              eq27_oracle, "second", 3),
        Check("Eq29-Tn", "Eq29", lambda: nrm.T, lambda: on.T, "first", 1),
        Check("Eq30-Nn", "Eq30", lambda: nrm.N, lambda: on.N, "second", 2),
        Check("Eq31-Bn", "Eq31", lambda: nrm.B, lambda: on.B, "second", 2),
        Check("Eq32-sn", "Eq32", lambda: nrm.s_ind, lambda: on.arclength,
              "first", 1),
        Check("Eq32-kappa_n", "Eq32", lambda: np.abs(nrm.kappa_ind),
              lambda: on.kappa, "second", 2),
        Check("Eq33-tau_n", "Eq33", lambda: nrm.tau_minus_tauG_ind,
              lambda: torsion(on), "second", 3),
        Check("Eq34-condition", "Eq34",
              lambda: indicatrix.normal_planarity_residual(app),
              eq34_oracle, "second", 3),
        Check("Eq36-alpha_b", "Eq36", lambda: b.curve_samples, lambda: P.B,
              "second", 2),
        Check("Eq37-Tb", "Eq37", lambda: b.T, lambda: ob.T, "first", 1),
        Check("Eq38-Nb", "Eq38", lambda: b.N, lambda: ob.N, "second", 2),
        Check("Eq39-Bb", "Eq39", lambda: b.B, lambda: ob.B, "second", 2),
        Check("Eq40-sb", "Eq40", lambda: b.s_ind, lambda: ob.arclength,
              "first", 1),
        Check("Eq40-kappa_b", "Eq40", lambda: np.abs(b.kappa_ind),
              lambda: ob.kappa, "second", 2),
        Check("Eq40-tau_b", "Eq40", lambda: b.tau_minus_tauG_ind,
              lambda: torsion(ob), "second", 3),
        Check("Eq41-Gamma_b", "Eq41", lambda: b.gamma_ind,
              lambda: c.geodesic(b.N), "second", 2, True),
        # unnumbered relations, reported separately
        Check("Eq10-dsstar_ds", "supplementary",
              lambda: 1.0 / np.abs(mate.ds_dsstar),
              lambda: bertrand.dsstar_ds_from_offset(
                  c.report.lambda_mean, eps, app.kappa, app.torsion_rel),
              "eq10", 1),
        Check("Thm9-N", "supplementary", lambda: mate.derived.N, lambda: P.N,
              "second", 2),
        Check("Thm9-tau", "supplementary",
              lambda: mate.derived.tau - mate.derived.tauG,
              lambda: torsion(P), "second", 3),
        Check("Gamma_t_eq_Gamma_b", "supplementary", lambda: t.gamma_ind,
              lambda: b.gamma_ind, "identity", 1, False),
    ]


def _tolerance(profile, tol_class):
    if tol_class == "eq10":
        return 1e-6
    if tol_class == "identity":
        return 1e-12
    return profile[tol_class]


def _evaluate(ctx, check, perturb=0.0, tol=None):
    closed = np.array(check.closed(), dtype=float)
    if perturb:
        closed = closed + perturb
    numeric = check.numeric()
    if tol is None:
        tol = _tolerance(ctx.profile, check.tol_class)
    interior = ctx.interior(check.depth)
    return compare(closed, numeric, check.component_id, tol,
                   flags=ctx.flags, interior=interior, align=check.align,
                   note=NOTES.get(check.component_id,
                                  NOTES.get(check.equation_id, "")))


def _self_checks(ctx):
    out = {}
    valid = ~ctx.flags & ctx.interior(3)

    def record(name, value, tol):
        out[name] = {"value": _num(value), "tol": tol,
                     "ok": bool(np.isfinite(value) and value < tol)}

    fields = {"partner": ctx.partner, **{f"{k}_oracle": o
                                          for k, o in ctx.ind_oracle.items()}}
    for name, o in fields.items():
        dev = frame_deviation(o.T[valid], o.N[valid], o.B[valid])
        record(f"{name}_orthonormal", dev, 1e-9)
        record(f"{name}_kappa_nonnegative",
               max(0.0, -float(np.min(o.kappa[valid]))), 1e-15)
        record(f"{name}_arclength_monotone",
               max(0.0, -float(np.min(np.diff(o.arclength)))), 1e-15)
    for kind, ind in ctx.ind.items():
        ok = np.isfinite(ind.curve_samples).all(axis=1)
        dev = np.max(np.abs(np.linalg.norm(ind.curve_samples[ok], axis=1) - 1))
        record(f"{kind}_on_unit_sphere", dev, 1e-9)
    return out


def _build(ctx, perturb=None):
    perturb = perturb or {}
    checks = _checks(ctx)
    by_eq = {eq: [] for eq in EQUATION_IDS}
    supplementary = []
    for chk in checks:
        rep = _evaluate(ctx, chk, perturb.get(chk.component_id, 0.0))
        if chk.equation_id == "supplementary":
            supplementary.append(rep)
        else:
            by_eq[chk.equation_id].append(rep)
    reports = []
    for eq in EQUATION_IDS:
        comps = by_eq[eq]
        if len(comps) == 1:
            rep = comps[0]
            reports.append(ResidualReport(
                eq, rep.max_abs, rep.mean_abs, rep.quantile95, rep.n_flagged,
                rep.verdict, rep.tolerance, rep.sign, rep.signs,
                rep.flipped_max_abs, [rep], rep.note))
        else:
            reports.append(combine(eq, comps, NOTES.get(eq, "")))
    return reports, supplementary


def _profile(tol_profile):
    profile = dict(DEFAULT_PROFILE)
    if tol_profile:
        unknown = set(tol_profile) - set(profile)
        if unknown:
            raise ValueError(f"unknown tolerance keys: {sorted(unknown)}")
        profile.update(tol_profile)
    return profile


def run_full_verification(spec, epsilon=1, tol_profile=None):
    """Verify every closed form of the Bertrand/indicatrix theory on ``spec``.

    ``spec`` must describe a Bertrand curve (the mate); ``NotBertrandPair``
    is raised otherwise. Returns a :class:`VerificationBundle` with one
    report per entry of ``EQUATION_IDS`` plus supplementary reports and
    oracle self-consistency checks.
    """
    profile = _profile(tol_profile)
    ctx = _Context(spec, epsilon, profile)
    reports, supplementary = _build(ctx)
    meta = {
        "spec": {
            "kappa": spec.kappa_expr.text, "tau": spec.tau_expr.text,
            "domain": list(spec.domain), "n": spec.n,
            "tau_G": spec.structure.tau_G,
        },
        "epsilon": epsilon,
        "profile": profile,
        "oracle_stride": ctx.stride,
        "bertrand": ctx.report.summary(),
        "lambda_fit": float(ctx.lam_fit),
        "mu_fit": float(ctx.mu_fit),
        "n_singular_flagged": int(np.sum(ctx.flags)),
        "equation_ids": list(EQUATION_IDS),
    }
    return VerificationBundle(reports, supplementary, _self_checks(ctx), meta)


def negative_controls(spec, epsilon=1, tol_profile=None, magnitude=1e-3,
                      tol=1e-6):
    """Perturb each closed form by ``magnitude`` and re-run its comparison.

    Returns ``{component_id: verdict}``; every verdict should be ``fail``.
    """
    ctx = _Context(spec, epsilon, _profile(tol_profile))
    return {chk.component_id: _evaluate(ctx, chk, magnitude, tol).verdict
            for chk in _checks(ctx)}
