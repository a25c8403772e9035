"""CSV and JSON emission.

CSV floats are written with 17 significant digits; NaN is written as
``nan``. JSON uses Python's shortest round-trip float repr and writes NaN
and infinities as ``null``.
"""

import io as _io
import json
import math

import numpy as np

APPARATUS_COLUMNS = (
    "s", "T1", "T2", "T3", "N1", "N2", "N3", "B1", "B2", "B3",
    "kappa", "tau", "tauG", "H", "sigma", "sigma_defined",
)

INDICATRIX_COLUMNS = (
    "s_star", "alpha1", "alpha2", "alpha3", "T1", "T2", "T3", "N1", "N2",
    "N3", "B1", "B2", "B3", "kappa", "tau_minus_tauG", "ds_ind_dsstar",
    "s_ind", "gamma", "flagged",
)

SPHERE_COLUMNS = (
    "s_star", "t1", "t2", "t3", "n1", "n2", "n3", "b1", "b2", "b3", "flagged",
)

FLOAT_FORMAT = "%.17g"


def apparatus_table(app):
    return np.column_stack([
        app.s, app.T, app.N, app.B, app.kappa, app.tau, app.tauG, app.H,
        app.sigma, app.sigma_defined.astype(float),
    ])


def indicatrix_table(ind):
    gamma = ind.gamma_ind if ind.gamma_ind is not None else np.full(len(ind.s), np.nan)
    return np.column_stack([
        ind.s, ind.curve_samples, ind.T, ind.N, ind.B, ind.kappa_ind,
        ind.tau_minus_tauG_ind, ind.ds_ind_dsstar, ind.s_ind, gamma,
        ind.flags.astype(float),
    ])


def sphere_table(inds):
    flags = inds["tangent"].flags | inds["normal"].flags | inds["binormal"].flags
    return np.column_stack([
        inds["tangent"].s, inds["tangent"].curve_samples,
        inds["normal"].curve_samples, inds["binormal"].curve_samples,
        flags.astype(float),
    ])


_INTEGER_COLUMNS = {"sigma_defined", "flagged"}


def format_csv(columns, table):
    """Render ``table`` as CSV text with a header row."""
    table = np.asarray(table, dtype=float)
    if table.shape[1] != len(columns):
        raise ValueError(f"{len(columns)} columns but table has {table.shape[1]}")
    fmt = ["%d" if c in _INTEGER_COLUMNS else FLOAT_FORMAT for c in columns]
    buf = _io.StringIO()
    np.savetxt(buf, table, fmt=fmt, delimiter=",",
               header=",".join(columns), comments="")
    return buf.getvalue()


def read_csv(text):
    """Parse CSV text written by :func:`format_csv` into (columns, table)."""
    lines = text.strip().splitlines()
    columns = tuple(lines[0].split(","))
    table = np.loadtxt(lines[1:], delimiter=",", ndmin=2)
    return columns, table


def jsonable(obj):
    """Convert numpy containers and non-finite floats into JSON-ready values."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def format_json(obj):
    return json.dumps(jsonable(obj), indent=2, allow_nan=False) + "\n"


def apparatus_dict(app):
    table = apparatus_table(app)
    return {"columns": list(APPARATUS_COLUMNS),
            "rows": table, "n": int(app.grid.n)}
