"""Cylinder functions of integer order and real positive argument.

Values and first derivatives of J, Y, I, K and the Hankel functions are
taken from :mod:`scipy.special`.  :func:`scaled_bessel_table` adds the
one thing scipy does not give us: Y_m(x) for large m and small x without
overflow, which the radiation-mode sums need.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special as sp

MAX_ORDER = 64

KINDS = ("J", "Y", "I", "K", "H1", "H2")

_LOG_RESCALE = 200.0 * np.log(10.0)


class SpecfunError(ValueError):
    """Argument or order outside the supported domain."""


@dataclass(frozen=True)
class CylValue:
    value: complex | float | np.ndarray
    derivative: complex | float | np.ndarray


def _check_args(order, x):
    if int(order) != order or order < 0:
        raise SpecfunError(f"order must be a non-negative integer, got {order!r}")
    if order > MAX_ORDER:
        raise SpecfunError(f"order {order} exceeds supported maximum {MAX_ORDER}")
    xa = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(xa)):
        raise SpecfunError("argument must be finite")
    if np.any(xa <= 0.0):
        raise SpecfunError("argument must be strictly positive")
    return int(order), xa


def eval_cyl(kind: str, order: int, x) -> CylValue:
    """Evaluate a cylinder function and its derivative at ``x > 0``.

    ``kind`` is one of ``J, Y, I, K, H1, H2``.  Scalars in, scalars out;
    arrays broadcast.
    """
    m, xa = _check_args(order, x)
    if kind == "J":
        v, d = sp.jv(m, xa), sp.jvp(m, xa)
    elif kind == "Y":
        v, d = sp.yv(m, xa), sp.yvp(m, xa)
    elif kind == "I":
        v, d = sp.iv(m, xa), sp.ivp(m, xa)
    elif kind == "K":
        v, d = sp.kv(m, xa), sp.kvp(m, xa)
    elif kind == "H1":
        v, d = sp.hankel1(m, xa), sp.h1vp(m, xa)
    elif kind == "H2":
        v, d = sp.hankel2(m, xa), sp.h2vp(m, xa)
    else:
        raise SpecfunError(f"unknown cylinder function kind {kind!r}")
    if xa.ndim == 0:
        return CylValue(v[()], d[()])
    return CylValue(v, d)


@dataclass(frozen=True)
class BesselTable:
    """J and Y of orders ``0..m_max`` on a grid of arguments.

    Row ``m`` holds ``J_m(x)``, ``J'_m(x)`` unscaled, and
    ``Y_m(x) * exp(-log_scale[m])``, ``Y'_m(x) * exp(-log_scale[m])``.
    ``log_scale`` is zero wherever Y_m is representable as is.
    """

    J: np.ndarray
    Jp: np.ndarray
    Y: np.ndarray
    Yp: np.ndarray
    log_scale: np.ndarray


def scaled_bessel_table(m_max: int, x) -> BesselTable:
    """Tabulate J_m, Y_m and derivatives for ``m = 0..m_max``.

    Y is generated by forward recurrence (stable for Y) with periodic
    rescaling, so orders far beyond the turning point do not overflow.
    """
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xa <= 0.0) or not np.all(np.isfinite(xa)):
        raise SpecfunError("arguments must be finite and strictly positive")
    m_max = int(m_max)
    orders = np.arange(m_max + 1)[:, None]
    J = sp.jv(orders, xa[None, :])
    Jp = sp.jvp(orders, xa[None, :])

    Y = np.empty((m_max + 1, xa.size))
    Yp = np.empty_like(Y)
    E = np.zeros_like(Y)
    y_prev = sp.y0(xa)
    y_cur = sp.y1(xa)
    scale = np.zeros_like(xa)
    Y[0] = y_prev
    Yp[0] = -y_cur
    for m in range(1, m_max + 1):
        # y_prev, y_cur = Y_{m-1}, Y_m, both at exp(scale)
        Y[m] = y_cur
        Yp[m] = y_prev - m / xa * y_cur
        E[m] = scale
        y_next = 2.0 * m / xa * y_cur - y_prev
        big = np.abs(y_next) > 1e200
        if np.any(big):
            y_next = np.where(big, y_next * 1e-200, y_next)
            y_cur = np.where(big, y_cur * 1e-200, y_cur)
            scale = scale + np.where(big, _LOG_RESCALE, 0.0)
        y_prev, y_cur = y_cur, y_next
    return BesselTable(J=J, Jp=Jp, Y=Y, Yp=Yp, log_scale=E)


def scaled_j_table(m_max: int, x):
    """J_m(x) and J'_m(x) for ``m = 0..m_max`` as ``(J, Jp, log_scale)``.

    The true values are ``J * exp(log_scale)`` and ``Jp * exp(log_scale)``.
    Above the turning point (m > x + 1) the ratios J_m / J_{m-1} come from
    downward recurrence, so deep-underflow orders keep full relative
    accuracy.  ``x = 0`` is allowed.
    """
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xa < 0.0) or not np.all(np.isfinite(xa)):
        raise SpecfunError("arguments must be finite and non-negative")
    m_max = int(m_max)
    orders = np.arange(m_max + 1)[:, None]
    J = sp.jv(orders, xa[None, :])
    Jp = sp.jvp(orders, xa[None, :])
    E = np.zeros_like(J)
    m0 = np.ceil(xa).astype(int) + 1
    use = (orders > m0[None, :]) & (xa[None, :] > 0)
    if not np.any(use):
        return J, Jp, E

    # rho[k] = J_k / J_{k-1}; the recurrence is only trusted for k > x
    top = m_max + 60 + int(np.ceil(2 * xa.max()))
    rho = np.zeros((m_max + 2, xa.size))
    r = np.zeros_like(xa)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for k in range(top, 0, -1):
            r = xa / (2.0 * k - xa * r)
            if k <= m_max + 1:
                rho[k] = r
        log_rho = np.where(use, np.log(np.where(use, rho[:-1], 1.0)), 0.0)
    j_m0 = sp.jv(np.minimum(m0, m_max), xa)
    log_j = np.log(np.where(j_m0 > 0, j_m0, 1.0))[None, :] + np.cumsum(log_rho, axis=0)
    safe_x = np.where(xa > 0, xa, 1.0)
    # J'_m / J_m = m / x - J_{m+1} / J_m
    return (np.where(use, 1.0, J), np.where(use, orders / safe_x - rho[1:], Jp),
            np.where(use, log_j, 0.0))
