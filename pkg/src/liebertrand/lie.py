"""Three-dimensional Lie algebra with a bi-invariant metric.

Algebra vectors are plain numpy arrays whose last axis holds the three
coordinates in an orthonormal basis ``X1, X2, X3``. Every function here
broadcasts over leading axes, so a whole sampled frame field can be passed
at once.

The bracket is modelled as ``[X, Y] = 2 tau_G (X x Y)``, which reproduces
``[T, N] = 2 tau_G B`` and ``[T, B] = -2 tau_G N`` for every right-handed
orthonormal frame.
"""

from dataclasses import dataclass

import numpy as np

from .errors import FrameNotOrthonormal

ORTHONORMAL_TOL = 1e-8


@dataclass(frozen=True)
class LieStructure:
    """Bi-invariant structure of ``G``, reduced to the constant ``tau_G``.

    Presets: ``abelian`` (0), ``so3`` (1/2) and ``su2`` (1). SU(3) is
    sometimes quoted for the value 1, but it is 8-dimensional; the
    three-dimensional group with that constant is SU(2).
    """

    tau_G: float = 0.0

    PRESETS = {"abelian": 0.0, "so3": 0.5, "su2": 1.0}

    @classmethod
    def preset(cls, name):
        try:
            return cls(cls.PRESETS[name.lower()])
        except KeyError:
            raise ValueError(
                f"unknown structure preset {name!r}; "
                f"choose from {sorted(cls.PRESETS)}"
            ) from None


def vec(x1, x2, x3):
    return np.array([x1, x2, x3], dtype=float)


def inner(X, Y):
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    return X[..., 0] * Y[..., 0] + X[..., 1] * Y[..., 1] + X[..., 2] * Y[..., 2]


def norm(X):
    return np.sqrt(inner(X, X))


def bracket(X, Y, L):
    return 2.0 * L.tau_G * np.cross(np.asarray(X, dtype=float),
                                    np.asarray(Y, dtype=float))


def covariant_derivative(W_dot, T, W, L):
    """Covariant derivative ``D_T W = W_dot + [T, W] / 2`` along a curve.

    ``W_dot`` holds the coordinate derivatives of ``W``; ``T`` is the unit
    tangent at the same parameter value.
    """
    return np.asarray(W_dot, dtype=float) + 0.5 * bracket(T, W, L)


def frame_deviation(T, N, B):
    """Largest deviation of the Gram matrix of ``(T, N, B)`` from identity."""
    F = np.stack([np.asarray(T, float), np.asarray(N, float),
                  np.asarray(B, float)], axis=-2)
    G = F @ np.swapaxes(F, -1, -2)
    return float(np.max(np.abs(G - np.eye(3))))


def tauG_from_frame(T, N, B, L, tol=ORTHONORMAL_TOL):
    """``tau_G = <[T, N], B> / 2`` for an orthonormal frame.

    Equals ``L.tau_G`` for right-handed frames and ``-L.tau_G`` for
    left-handed ones.
    """
    dev = frame_deviation(T, N, B)
    if dev > tol:
        raise FrameNotOrthonormal(
            f"frame deviates from orthonormal by {dev:.3e} (tolerance {tol:g})"
        )
    return 0.5 * inner(bracket(T, N, L), B)
