"""Delay-differential special functions of the linear sieve.

The normalized sieve functions A, a solve the coupled delay system

    A(s) = 1            (1 <= s <= 3),
    a(s) = 0            (1 <= s <= 2),
    A'(s) = a(s-1)/(s-1),   a'(s) = A(s-1)/(s-1)   (beyond the seeds),

with the unnormalized pair recovered through F(u) = 2 e^gamma A(u)/u and
f(u) = 2 e^gamma a(u)/u.  Buchstab's function satisfies (u w(u))' = w(u-1)
with w(u) = 1/u on [1,2].  Both systems are continued numerically by
marching unit blocks: inside a block the right-hand side is a known grid
function of the previous block, so each block is a cumulative integral of
tabulated data (4-point interpolatory rule, O(h^4) global error).  Blocks
are aligned on the integers, where the solutions lose one derivative, so
no integration stencil ever straddles a kink.

Closed forms are kept exact where they exist: A = 1 on [1,3],
a = log(s-1) on [2,4], w = 1/u on [1,2] and (1+log(u-1))/u on [2,3].
Evaluation outside a table's range raises; it never extrapolates.

The elementary log-integrals

    sigma(a, b, c) = int_a^b log(c/(t-1)) dt/t      (oriented),
    sigma0(t) = sigma(3, t+2, t+1) / (1 - sigma(3, 5, 4)),

are evaluated through the dilogarithm, and theta_of_nu tabulates the
8-piece level-of-distribution exponent used by the twin-prime weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import spence

from .errors import (
    DomainTooSmallError,
    InvalidStepError,
    InvalidToleranceError,
    OutOfDomainError,
)

EULER_GAMMA = 0.57721566490153286060651209008240243
E_GAMMA = math.exp(EULER_GAMMA)  # 2 e^gamma / u is the classical boundary datum
E_MINUS_GAMMA = 1.0 / E_GAMMA

#: Numerical suprema of Buchstab's function on [3.5, oo) and [2, oo).
OMEGA_SUP_FROM_3_5 = 0.561522
OMEGA_SUP_FROM_2 = 0.567144

#: omega-mode names accepted throughout the package.
OMEGA_MODES = ("exact", "paper-bound-3.5", "paper-bound-2")


def _check_mode(mode: str) -> None:
    if mode not in OMEGA_MODES:
        raise ValueError(f"unknown omega mode {mode!r}; expected one of {OMEGA_MODES}")


# ---------------------------------------------------------------------------
# uniform-grid machinery
# ---------------------------------------------------------------------------

def _cumint_block(f: np.ndarray, h: float) -> np.ndarray:
    """Cumulative integral of gridded values over one block, 4th order.

    Returns I with I[k] = int_{x0}^{x0+k h} f.  Uses the 4-point
    interpolatory rule on interior intervals and one-sided cubics at the
    block ends, so accuracy does not degrade where the block abuts a kink.
    """
    n = len(f)
    if n < 4:
        raise ValueError("marching block needs at least 4 nodes")
    inc = np.empty(n - 1)
    inc[1:-1] = h * (-f[:-3] + 13.0 * f[1:-2] + 13.0 * f[2:-1] - f[3:]) / 24.0
    inc[0] = h * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]) / 24.0
    inc[-1] = h * (9.0 * f[-1] + 19.0 * f[-2] - 5.0 * f[-3] + f[-4]) / 24.0
    out = np.empty(n)
    out[0] = 0.0
    np.cumsum(inc, out=out[1:])
    return out


class UniformGridFn:
    """Function tabulated on a uniform grid, local cubic interpolation."""

    __slots__ = ("x0", "h", "values")

    def __init__(self, x0: float, h: float, values: np.ndarray):
        self.x0 = x0
        self.h = h
        self.values = np.asarray(values, dtype=float)

    @property
    def x_end(self) -> float:
        return self.x0 + (len(self.values) - 1) * self.h

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        t = (x - self.x0) / self.h
        n = len(self.values)
        i = np.clip(np.floor(t).astype(np.int64), 1, n - 3)
        s = t - i
        v = self.values
        f0, f1, f2, f3 = v[i - 1], v[i], v[i + 1], v[i + 2]
        out = (
            f1
            + s * (0.5 * (f2 - f0))
            + s * s * (f0 - 2.5 * f1 + 2.0 * f2 - 0.5 * f3)
            + s * s * s * (0.5 * (f3 - f0) + 1.5 * (f1 - f2))
        )
        return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# linear-sieve function table
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SieveFnTable:
    """Piecewise table of the normalized sieve functions A(s), a(s) on [1, u_max].

    segments lists (lo, hi, kind) per function for inspection; the closed
    forms take precedence on their ranges and the marched grids carry the
    continuation.  Immutable after build; evaluators are pure.
    """

    u_max: float
    step: float
    build_tolerance: float
    grid_A: UniformGridFn
    grid_a: UniformGridFn
    segments: tuple = field(default=())
    overlap_error_a: float = 0.0

    # -- core evaluators ----------------------------------------------------

    def _check_domain(self, s, name):
        s_arr = np.asarray(s, dtype=float)
        if np.any(s_arr < 1.0 - 1e-12) or np.any(s_arr > self.u_max + 1e-12):
            raise OutOfDomainError(
                f"{name}(s) evaluated outside [1, {self.u_max}]"
            )
        return s_arr

    def A(self, s):
        s_arr = self._check_domain(s, "A")
        out = np.where(s_arr <= 3.0, 1.0, self.grid_A(np.maximum(s_arr, 3.0)))
        return out if out.ndim else float(out)

    def a(self, s):
        s_arr = self._check_domain(s, "a")
        mid = np.log(np.maximum(s_arr, 2.0) - 1.0)
        out = np.where(
            s_arr <= 2.0,
            0.0,
            np.where(s_arr <= 4.0, mid, self.grid_a(np.maximum(s_arr, 4.0))),
        )
        return out if out.ndim else float(out)

    def F(self, u):
        u_arr = self._check_domain(u, "F")
        out = 2.0 * E_GAMMA * np.asarray(self.A(u_arr)) / u_arr
        return out if out.ndim else float(out)

    def f(self, u):
        u_arr = self._check_domain(u, "f")
        out = 2.0 * E_GAMMA * np.asarray(self.a(u_arr)) / u_arr
        return out if out.ndim else float(out)

    def a_continued(self, s):
        """Marched value of a, bypassing the closed form (overlap checks)."""
        s_arr = self._check_domain(s, "a")
        if np.any(s_arr < 2.0):
            raise OutOfDomainError("continued segment of a starts at 2")
        return self.grid_a(s_arr)

    def dump_csv(self, path, fn: str = "A", step: float = 1e-2) -> None:
        """Write (u, value) rows; versioned text format for inspection."""
        evals = {"A": self.A, "a": self.a, "F": self.F, "f": self.f}
        if fn not in evals:
            raise ValueError(f"unknown function {fn!r}")
        us = np.arange(1.0, self.u_max + step / 2, step)
        vals = evals[fn](us)
        with open(path, "w") as fh:
            fh.write(f"# doublesieve sieve-fn table v1, fn={fn}\n")
            fh.write("u,value\n")
            for u, v in zip(us, vals):
                fh.write(f"{u:.6f},{v:.12e}\n")


def build_sieve_tables(u_max: float = 8.0, tol: float = 1e-10) -> SieveFnTable:
    """Build A, a on [1, u_max] by marching the delay recursions.

    u_max >= 4; tol in (0, 1e-6].  The grid step is derived from tol; the
    4th-order march keeps the global error orders of magnitude below it.
    """
    if u_max < 4.0:
        raise DomainTooSmallError(f"u_max={u_max} < 4")
    if not (0.0 < tol <= 1e-6):
        raise InvalidToleranceError(f"tol={tol} outside (0, 1e-6]")

    h = 2.5e-4 if tol < 1e-12 else 5e-4
    m = int(round(1.0 / h))
    h = 1.0 / m
    top = int(math.ceil(u_max - 1e-12))

    n = (top - 1) * m + 1
    u = 1.0 + np.arange(n) * h
    A = np.ones(n)
    a = np.zeros(n)
    in24 = (u >= 2.0) & (u <= 4.0 + 1e-15)
    a[in24] = np.log(u[in24] - 1.0)

    def idx(k):
        return (k - 1) * m

    for k in range(2, top):
        lo, hi = idx(k), idx(k + 1)
        pv = slice(idx(k - 1), idx(k) + 1)
        if k >= 4:  # a' (u) = A(u-1)/(u-1); closed form already covers [2,4]
            a[lo:hi + 1] = a[lo] + _cumint_block(A[pv] / u[pv], h)
        if k >= 3:  # A'(u) = a(u-1)/(u-1)
            A[lo:hi + 1] = A[lo] + _cumint_block(a[pv] / u[pv], h)

    # marched copy of a from 2 upward: the stored grid carries the numeric
    # continuation even on [2,4], so the closed-form overlap is a real check
    a_marched = a.copy()
    for k in (2, 3):
        lo, hi = idx(k), idx(k + 1)
        pv = slice(idx(k - 1), idx(k) + 1)
        a_marched[lo:hi + 1] = a_marched[lo] + _cumint_block(A[pv] / u[pv], h)
    ov = slice(idx(3), idx(4) + 1)
    overlap_err = float(np.max(np.abs(a_marched[ov] - np.log(u[ov] - 1.0))))

    segments = (
        ("A", 1.0, 3.0, "closed:one"),
        ("A", 3.0, float(u_max), "grid"),
        ("a", 1.0, 2.0, "closed:zero"),
        ("a", 2.0, 4.0, "closed:log(s-1)"),
        ("a", 4.0, float(u_max), "grid"),
    )
    return SieveFnTable(
        u_max=float(u_max),
        step=h,
        build_tolerance=tol,
        grid_A=UniformGridFn(1.0, h, A),
        grid_a=UniformGridFn(1.0, h, a_marched),
        segments=segments,
        overlap_error_a=overlap_err,
    )


# spec-surface aliases: operations are plain functions over the table
def eval_A(table: SieveFnTable, s):
    return table.A(s)


def eval_a(table: SieveFnTable, s):
    return table.a(s)


def eval_F(table: SieveFnTable, u):
    return table.F(u)


def eval_f(table: SieveFnTable, u):
    return table.f(u)


# ---------------------------------------------------------------------------
# Buchstab table
# ---------------------------------------------------------------------------

class _OmegaEnvelope:
    """Fast vectorized envelope w-bar(u) for one omega mode.

    Linear interpolation on the build grid below the mode's threshold, the
    constant bound above it, 0 below u = 1.  Used on the hot path of the
    multi-dimensional integrals; the table method omega_upper gives the
    same values with full domain checking.
    """

    __slots__ = ("tab", "h", "cut", "cap", "u_top")

    def __init__(self, values: np.ndarray, h: float, cut: float, cap, u_top: float):
        self.tab = values
        self.h = h
        self.cut = cut
        self.cap = cap
        self.u_top = u_top

    def __call__(self, x: np.ndarray) -> np.ndarray:
        t = (x - 1.0) * (1.0 / self.h)
        np.clip(t, 0.0, len(self.tab) - 1.000001, out=t)
        i = t.astype(np.int64)
        s = t - i
        out = np.take(self.tab, i) * (1.0 - s) + np.take(self.tab, i + 1) * s
        if self.cap is not None:
            out[x >= self.cut] = self.cap
        out[x < 1.0] = 0.0
        return out


@dataclass(frozen=True)
class BuchstabTable:
    """Dense grid of Buchstab's function on [2, u_max] with closed-form head."""

    u_max: float
    step: float
    grid: UniformGridFn  # marched values from u = 2 (validates the closed form)
    head_error: float    # max |grid - closed form| on [2, 3]

    def _closed_head(self, u_arr):
        out = np.where(u_arr <= 2.0, 1.0 / u_arr,
                       (1.0 + np.log(np.maximum(u_arr, 2.0) - 1.0)) / u_arr)
        return out

    def omega(self, u):
        u_arr = np.asarray(u, dtype=float)
        if np.any(u_arr < 1.0 - 1e-12) or np.any(u_arr > self.u_max + 1e-12):
            raise OutOfDomainError(f"omega(u) evaluated outside [1, {self.u_max}]")
        out = np.where(
            u_arr <= 3.0,
            self._closed_head(np.minimum(u_arr, 3.0)),
            self.grid(np.maximum(u_arr, 3.0)),
        )
        return out if out.ndim else float(out)

    def omega_upper(self, u, mode: str = "exact"):
        """omega or its piecewise-constant upper bound, per mode."""
        _check_mode(mode)
        u_arr = np.asarray(u, dtype=float)
        if mode == "exact":
            return self.omega(u)
        cut, cap = (
            (3.5, OMEGA_SUP_FROM_3_5)
            if mode == "paper-bound-3.5"
            else (2.0, OMEGA_SUP_FROM_2)
        )
        below = np.minimum(u_arr, cut)
        out = np.where(u_arr >= cut, cap, np.asarray(self.omega(below)))
        return out if out.ndim else float(out)

    def envelope(self, mode: str) -> _OmegaEnvelope:
        """Fast-lerp envelope for integral kernels (checks elided)."""
        _check_mode(mode)
        g = self.grid
        dense_u = np.arange(1.0, self.u_max + g.h / 2, g.h)
        vals = np.where(
            dense_u <= 3.0,
            self._closed_head(dense_u),
            g(np.maximum(dense_u, 3.0)),
        )
        if mode == "exact":
            return _OmegaEnvelope(vals, g.h, math.inf, None, self.u_max)
        cut, cap = (
            (3.5, OMEGA_SUP_FROM_3_5)
            if mode == "paper-bound-3.5"
            else (2.0, OMEGA_SUP_FROM_2)
        )
        return _OmegaEnvelope(vals, g.h, cut, cap, self.u_max)

    def dump_csv(self, path, step: float = 1e-2) -> None:
        us = np.arange(1.0, self.u_max + step / 2, step)
        vals = self.omega(us)
        with open(path, "w") as fh:
            fh.write("# doublesieve buchstab table v1\n")
            fh.write("u,value\n")
            for u, v in zip(us, vals):
                fh.write(f"{u:.6f},{v:.12e}\n")


def build_buchstab(u_max: float = 12.0, step: float = 5e-4) -> BuchstabTable:
    """March u*w(u) forward from the closed-form head.

    u_max >= 3.5; step <= 1e-3.  The march starts at u = 2, so the grid on
    [2, 3] doubles as a validation of the closed form (two-sided at u = 3).
    """
    if u_max < 3.5:
        raise DomainTooSmallError(f"u_max={u_max} < 3.5")
    if not (0.0 < step <= 1e-3):
        raise InvalidStepError(f"step={step} outside (0, 1e-3]")

    m = int(round(1.0 / step))
    h = 1.0 / m
    top = int(math.ceil(u_max - 1e-12))
    n = (top - 1) * m + 1
    u = 1.0 + np.arange(n) * h
    w = np.zeros(n)
    head = u <= 2.0 + 1e-15
    w[head] = 1.0 / u[head]

    def idx(k):
        return (k - 1) * m

    for k in range(2, top):
        lo, hi = idx(k), idx(k + 1)
        pv = slice(idx(k - 1), idx(k) + 1)
        g = u[lo] * w[lo] + _cumint_block(w[pv], h)  # (u w)' = w(u-1)
        w[lo:hi + 1] = g / u[lo:hi + 1]

    seg23 = slice(idx(2), idx(3) + 1)
    head_err = float(np.max(np.abs(
        w[seg23] - (1.0 + np.log(u[seg23] - 1.0)) / u[seg23]
    )))
    return BuchstabTable(
        u_max=float(u_max), step=h, grid=UniformGridFn(1.0, h, w),
        head_error=head_err,
    )


def omega_upper(table: BuchstabTable, u, mode: str) -> float:
    return table.omega_upper(u, mode)


# ---------------------------------------------------------------------------
# elementary log-integrals
# ---------------------------------------------------------------------------

def _int_log_tm1_over_t(x):
    """Antiderivative of log(t-1)/t, valid for t > 1.

    d/dx [Li2(1/x) + log(x)^2/2] = log(x-1)/x; Li2 via scipy's spence
    (spence(z) = Li2(1-z)).
    """
    x = np.asarray(x, dtype=float)
    return spence(1.0 - 1.0 / x) + 0.5 * np.log(x) ** 2


def sigma(a, b, c):
    """Oriented integral of log(c/(t-1))/t from a to b."""
    a_arr = np.asarray(a, dtype=float)
    b_arr = np.asarray(b, dtype=float)
    if np.any(a_arr <= 1.0) or np.any(b_arr <= 1.0):
        raise OutOfDomainError("sigma: endpoints must exceed 1 (log singularity)")
    if np.any(np.asarray(c, dtype=float) <= 0.0):
        raise OutOfDomainError("sigma: c must be positive")
    out = np.log(c) * (np.log(b_arr) - np.log(a_arr)) - (
        _int_log_tm1_over_t(b_arr) - _int_log_tm1_over_t(a_arr)
    )
    return out if out.ndim else float(out)


_SIGMA_354 = None


def _sigma_354() -> float:
    global _SIGMA_354
    if _SIGMA_354 is None:
        _SIGMA_354 = sigma(3.0, 5.0, 4.0)
    return _SIGMA_354


def sigma0(t):
    """sigma(3, t+2, t+1) normalized by 1 - sigma(3, 5, 4); t >= 1."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 1.0 - 1e-12):
        raise OutOfDomainError("sigma0 defined for t >= 1")
    out = sigma(3.0, t_arr + 2.0, t_arr + 1.0) / (1.0 - _sigma_354())
    return out if np.ndim(out) else float(out)


# ---------------------------------------------------------------------------
# level function
# ---------------------------------------------------------------------------

_THETA_PIECES = (
    # (nu_hi, callable) evaluated on the first piece whose upper end >= nu
    (1.0 / 15.0, lambda v: (6.0 - 5.0 * v) / 10.0),
    (1.0 / 10.0, lambda v: 0.5 + v),
    (3.0 / 14.0, lambda v: (5.0 - 2.0 * v) / 8.0),
    (1.0 / 4.0, lambda v: (3.0 + 2.0 * v) / 6.0),
    (2.0 / 7.0, lambda v: (2.0 - v) / 3.0),
    (2.0 / 5.0, lambda v: (2.0 + v) / 4.0),
    (1.0 / 2.0, lambda v: 1.0 - v),
    (1.0, lambda v: 0.5),
)


def theta_of_nu(nu: float) -> float:
    """8-piece level exponent theta(nu) on (0, 1], epsilon slack ignored."""
    if not (0.0 < nu <= 1.0):
        raise OutOfDomainError(f"theta_of_nu: nu={nu} outside (0, 1]")
    for hi, fn in _THETA_PIECES:
        if nu <= hi + 1e-15:
            return fn(nu)
    raise AssertionError("unreachable")


# ---------------------------------------------------------------------------
# shared default tables (immutable; safe for concurrent readers)
# ---------------------------------------------------------------------------

_DEFAULTS: dict = {}


def default_sieve_table(u_max: float = 8.0) -> SieveFnTable:
    key = ("sieve", u_max)
    if key not in _DEFAULTS:
        _DEFAULTS[key] = build_sieve_tables(u_max=u_max, tol=1e-10)
    return _DEFAULTS[key]


def default_buchstab(u_max: float = 31.0) -> BuchstabTable:
    key = ("buchstab", u_max)
    if key not in _DEFAULTS:
        _DEFAULTS[key] = build_buchstab(u_max=u_max, step=5e-4)
    return _DEFAULTS[key]
