"""Randomized property checks shared by the CLI and the test suite."""

import numpy as np

from .frenet import CurveSpec, apparatus_from_tangent, integrate_frenet
from .lie import LieStructure, bracket, inner


def algebra_residuals(rng, L, count=1000):
    """Worst antisymmetry, Jacobi and ad-invariance residuals over random triples.

    Vectors are drawn from a standard normal distribution; residuals are
    relative to ``1 + |X| |Y| |Z|``.
    """
    X, Y, Z = (rng.standard_normal((count, 3)) for _ in range(3))
    scale = 1.0 + (np.linalg.norm(X, axis=1) * np.linalg.norm(Y, axis=1)
                   * np.linalg.norm(Z, axis=1))
    anti = np.linalg.norm(bracket(X, Y, L) + bracket(Y, X, L), axis=1)
    jacobi = np.linalg.norm(
        bracket(X, bracket(Y, Z, L), L) + bracket(Y, bracket(Z, X, L), L)
        + bracket(Z, bracket(X, Y, L), L), axis=1)
    adinv = np.abs(inner(X, bracket(Y, Z, L)) - inner(bracket(X, Y, L), Z))
    return {
        "antisymmetry": float(np.max(anti / scale)),
        "jacobi": float(np.max(jacobi / scale)),
        "ad_invariance": float(np.max(adinv / scale)),
    }


def random_smooth_spec(rng, L, n=2001, domain=(0.0, 2.0)):
    """A spec with ``kappa = a + b sin(c s + d)`` (``a > |b|``) and
    ``tau = e + f cos(g s)``."""
    a = float(rng.uniform(0.8, 2.0))
    b = float(rng.uniform(-0.5, 0.5))
    c, g = (float(x) for x in rng.uniform(0.5, 3.0, size=2))
    d = float(rng.uniform(0.0, 2 * np.pi))
    e, f = (float(x) for x in rng.uniform(-1.0, 1.0, size=2))
    kappa = f"{a!r}+{b!r}*sin({c!r}*s+{d!r})"
    tau = f"{e!r}+{f!r}*cos({g!r}*s)"
    return CurveSpec(kappa, tau, domain, n, L)


def roundtrip_error(spec):
    """Max interior error of ``kappa`` and ``tau`` recovered from the integrated tangent."""
    app = integrate_frenet(spec)
    back = apparatus_from_tangent(app.T, app.grid, spec.structure)
    k_in, t_in = app.interior(1), app.interior(2)
    return {
        "kappa": float(np.max(np.abs(back.kappa - app.kappa)[k_in])),
        "tau": float(np.max(np.abs(back.tau - app.tau)[t_in])),
    }


def run_selfcheck(seed=0, trials=1000, specs=3, n=2001):
    """Algebra identities and integrator round trips for every preset."""
    rng = np.random.default_rng(seed)
    out = {"seed": seed, "presets": {}}
    ok = True
    for name in sorted(LieStructure.PRESETS):
        L = LieStructure.preset(name)
        alg = algebra_residuals(rng, L, trials)
        trips = [roundtrip_error(random_smooth_spec(rng, L, n))
                 for _ in range(specs)]
        worst = {k: max(t[k] for t in trips) for k in ("kappa", "tau")}
        passed = max(alg.values()) < 1e-12 and max(worst.values()) < 1e-4
        ok &= passed
        out["presets"][name] = {"tau_G": L.tau_G, "algebra": alg,
                                "roundtrip": worst, "ok": bool(passed)}
    out["ok"] = bool(ok)
    return out
