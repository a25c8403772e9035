"""Finite differences and quadrature on uniform grids."""

import numpy as np

# Samples at each end computed with one-sided, lower-order stencils.
BOUNDARY_BAND = 2


def derivative(f, h, stride=1):
    """First derivative along axis 0 of samples on a uniform grid.

    Fourth-order central differences in the interior; second-order stencils
    on the two samples at each end. Needs at least 5 samples.

    With ``stride > 1`` the central stencil spans ``f[i +- stride]`` and
    ``f[i +- 2 stride]``, which damps round-off noise in the samples; the
    ``2 stride`` samples at each end fall back to the unit stencil.
    """
    f = np.asarray(f, dtype=float)
    if stride > 1:
        d = derivative(f, h)
        k = int(stride)
        if f.shape[0] > 4 * k:
            d[2 * k:-2 * k] = (f[:-4 * k] - 8.0 * f[k:-3 * k]
                               + 8.0 * f[3 * k:-k] - f[4 * k:]) / (12.0 * k * h)
        return d
    n = f.shape[0]
    if n < 5:
        raise ValueError(f"need at least 5 samples, got {n}")
    d = np.empty_like(f)
    d[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / (12.0 * h)
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h)
    d[1] = (f[2] - f[0]) / (2.0 * h)
    d[-2] = (f[-1] - f[-3]) / (2.0 * h)
    d[-1] = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) / (2.0 * h)
    return d


def interior_mask(n, depth=1, stride=1):
    """Samples unaffected by boundary stencils after ``depth`` nested derivatives."""
    band = BOUNDARY_BAND * max(depth, 1) * max(int(stride), 1)
    mask = np.zeros(n, dtype=bool)
    mask[band:n - band] = True
    return mask


def cumulative_trapezoid(y, h):
    """Cumulative trapezoidal integral starting at 0."""
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    out[1:] = np.cumsum(0.5 * h * (y[1:] + y[:-1]), axis=0)
    return out


def dilate(mask, width):
    """Grow a boolean mask by ``width`` samples on each side."""
    mask = np.asarray(mask, dtype=bool)
    if width <= 0 or not mask.any():
        return mask.copy()
    out = mask.copy()
    for k in range(1, width + 1):
        out[k:] |= mask[:-k]
        out[:-k] |= mask[k:]
    return out
