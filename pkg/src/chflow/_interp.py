"""Shape-safeguarded cubic Hermite interpolation on monotone node sets.

Node slopes are supplied by the caller (flow-map states carry exact
derivative data), which keeps fourth-order accuracy on smooth data.  A
Hyman-style limiter clamps any slope that would let the cubic overshoot
its neighbouring secants, so steep near-breaking profiles cannot acquire
spurious wiggles.  Unlimited slopes pass through untouched.
"""

import numpy as np


def limit_slopes(x, values, slopes):
    """Clamp node slopes into the monotonicity-safe Hyman window.

    The window at an interior node is [min(0, 3*s_l, 3*s_r), max(0, 3*s_l, 3*s_r)]
    built from the adjacent secants; accurate slopes of resolved data sit
    strictly inside it and are returned unchanged.
    """
    s = np.diff(values) / np.diff(x)
    s_left = np.concatenate(([s[0]], s))
    s_right = np.concatenate((s, [s[-1]]))
    lo = np.minimum(0.0, 3.0 * np.minimum(s_left, s_right))
    hi = np.maximum(0.0, 3.0 * np.maximum(s_left, s_right))
    return np.clip(slopes, lo, hi)


def hermite_eval(x, values, slopes, xq):
    """Evaluate the piecewise cubic Hermite interpolant at query points.

    x must be strictly increasing and bracket every query point.
    """
    idx = np.searchsorted(x, xq, side="right") - 1
    idx = np.clip(idx, 0, len(x) - 2)
    h = x[idx + 1] - x[idx]
    t = (xq - x[idx]) / h
    t2 = t * t
    t3 = t2 * t
    h00 = 2.0 * t3 - 3.0 * t2 + 1.0
    h10 = t3 - 2.0 * t2 + t
    h01 = -2.0 * t3 + 3.0 * t2
    h11 = t3 - t2
    return (h00 * values[idx] + h10 * h * slopes[idx]
            + h01 * values[idx + 1] + h11 * h * slopes[idx + 1])


def periodic_hermite_eval(x, values, slopes, period, xq, value_shift=0.0,
                          limited=True):
    """Hermite evaluation with periodic extension of the node set.

    Nodes repeat with the given period; values pick up value_shift per
    period (0 for periodic data, period itself for a flow map, whose
    values advance by one period per label period).
    """
    x_ext = np.concatenate((x - period, x, x + period))
    v_ext = np.concatenate((values - value_shift, values, values + value_shift))
    m_ext = np.concatenate((slopes, slopes, slopes))
    if limited:
        m_ext = limit_slopes(x_ext, v_ext, m_ext)
    xq_wrapped = x[0] + np.mod(xq - x[0], period)
    return hermite_eval(x_ext, v_ext, m_ext, xq_wrapped)
