"""Empirical latent distributions built from response data.

Given a group's response shares and response-time CDFs and a representative
chronometric function ``c*``, the empirical latent CDF is

    H(x) = p0 * F0(c*(x))          for x <= 0
    H(x) = 1 - p1 * F1(c*(x)-)     for x > 0

which coincides with ``G o psi^{-1}`` whenever the data were generated by
``(G, c* o psi)``. The positive branch uses the left limit of ``F1`` so that
``H`` stays right-continuous for step data; for continuous ``F1`` this is the
plain value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .ecdf import INTERP, DegenerateCDF, StepCDF, TimeCDF
from .model import BoundaryTabulated, ChronometricFn, GroupData, TimeBounds


class MomentUndefined(ArithmeticError):
    """A moment or Lorenz quantity does not exist for this distribution."""


class BoundsMismatch(ValueError):
    pass


class FlatSegment(ValueError):
    pass


_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)
_TAIL_STEPS = (1e-6, 1e-12)


@dataclass(frozen=True)
class HStats:
    """Summary statistics; ``None`` marks a moment that does not exist.

    ``kurtosis`` is the excess kurtosis.
    """

    mean: float | None
    median: float
    variance: float | None
    skewness: float | None
    kurtosis: float | None

    @property
    def undefined(self) -> tuple[str, ...]:
        return tuple(k for k in ("mean", "variance", "skewness", "kurtosis") if getattr(self, k) is None)


@dataclass(frozen=True, eq=False)
class EmpiricalLatentCDF:
    """Latent CDF ``H`` reconstructed from ``group`` under ``cstar``.

    Evaluation is lazy: nothing is tabulated at construction.
    """

    group: GroupData
    cstar: ChronometricFn
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def p0(self) -> float:
        return self.group.p0

    @property
    def p1(self) -> float:
        return self.group.p1

    def __call__(self, x):
        return self.cdf(x)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        g = self.group
        t = self._times(x)
        neg = g.p0 * g.F0.cdf(t) if g.p0 > 0 else np.zeros_like(t)
        pos = 1.0 - g.p1 * g.F1.left_limit(t) if g.p1 > 0 else np.ones_like(t)
        out = np.where(x <= 0, neg, pos)
        return np.clip(out, 0.0, 1.0)

    def sf(self, x):
        """``1 - H(x)``, computed without cancellation on the positive branch."""
        x = np.asarray(x, dtype=float)
        g = self.group
        t = self._times(x)
        neg = 1.0 - g.p0 * g.F0.cdf(t) if g.p0 > 0 else np.ones_like(t)
        pos = g.p1 * g.F1.left_limit(t) if g.p1 > 0 else np.zeros_like(t)
        return np.clip(np.where(x <= 0, neg, pos), 0.0, 1.0)

    def _times(self, x):
        """``c*(x)``, snapped onto step atoms lying within rounding distance."""
        t = np.asarray(self.cstar(x), dtype=float)
        for F in (self.group.F0, self.group.F1):
            if isinstance(F, StepCDF) and F.mode != INTERP:
                t = snap_to_atoms(t, F.points)
        return t

    def quantile(self, u):
        """Left inverse ``inf{x : H(x) >= u}``; the support endpoint at ``u`` = 0 or 1."""
        u = np.asarray(u, dtype=float)
        g = self.group
        lo, hi = g.bounds.t_lo, g.bounds.t_hi
        with np.errstate(divide="ignore", invalid="ignore"):
            if g.p0 > 0:
                v0 = np.clip(u / g.p0, 0.0, 1.0)
                t0 = np.clip(g.F0.quantile(v0), lo, hi)
                x0 = self.cstar.inverse(0, t0)
            else:
                x0 = np.zeros_like(u)
            if g.p1 > 0:
                v1 = np.clip((1.0 - u) / g.p1, 0.0, 1.0)
                t1 = np.clip(g.F1.quantile_right(v1), lo, hi)
                x1 = self.cstar.inverse(1, t1)
            else:
                x1 = np.zeros_like(u)
        out = np.where(u <= g.p0, x0, x1)
        if g.p0 == 0:
            out = np.where(u <= 0, self.support[0], out)
        if g.p1 == 0:
            out = np.where(u >= 1, self.support[1], out)
        return out

    ppf = quantile

    @cached_property
    def support(self) -> tuple[float, float]:
        """Closed hull of the support of ``H`` (entries may be infinite)."""
        g = self.group
        if g.p0 > 0:
            lo = float(self.cstar.inverse(0, g.F0.support_lo()))
        else:
            lo = float(self.cstar.inverse(1, min(g.F1.support_hi(), self.cstar.bounds.t_hi)))
        if g.p1 > 0:
            hi = float(self.cstar.inverse(1, g.F1.support_lo()))
        else:
            hi = float(self.cstar.inverse(0, min(g.F0.support_hi(), self.cstar.bounds.t_hi)))
        return lo, hi

    def density(self, x, h: float | None = None):
        """Central-difference density; meaningful where ``H`` is continuous."""
        x = np.asarray(x, dtype=float)
        step = 1e-6 * np.maximum(1.0, np.abs(x)) if h is None else h
        return (self.cdf(x + step) - self.cdf(x - step)) / (2 * step)

    def knots_x(self) -> np.ndarray:
        """Latent values at which ``H`` may kink or jump."""
        g = self.group
        b = self.cstar.bounds
        xs = [np.array([0.0])]
        for branch, F, p in ((0, g.F0, g.p0), (1, g.F1, g.p1)):
            if p <= 0:
                continue
            ts = np.r_[np.asarray(F.knots, dtype=float), self.cstar.t_knots(branch)]
            ts = ts[(ts >= b.t_lo) & (ts <= b.t_hi) & np.isfinite(ts)]
            xs.append(np.asarray(self.cstar.inverse(branch, ts), dtype=float))
        out = np.unique(np.concatenate(xs))
        return out[np.isfinite(out)]

    def grid(self, n: int = 1000, eps: float = 1e-6) -> np.ndarray:
        """``n`` quantile-spaced latent values."""
        return np.asarray(self.quantile(np.linspace(eps, 1 - eps, n)), dtype=float)

    # ------------------------------------------------------------------
    # quadrature of the quantile function

    @cached_property
    def _breaks(self) -> np.ndarray:
        g = self.group
        b = self.cstar.bounds
        us = [np.array([0.0, g.p0, 1.0])]
        for branch, F, p in ((0, g.F0, g.p0), (1, g.F1, g.p1)):
            if p <= 0:
                continue
            ts = np.r_[np.asarray(F.knots, dtype=float), self.cstar.t_knots(branch)]
            ts = ts[(ts >= b.t_lo) & (ts <= b.t_hi) & np.isfinite(ts)]
            vals = p * np.asarray(F.cdf(ts), dtype=float)
            us.append(vals if branch == 0 else 1.0 - vals)
        u = np.unique(np.clip(np.concatenate(us), 0.0, 1.0))
        # breakpoints within rounding distance of the ends only create empty pieces
        return u[(u == 0.0) | (u == 1.0) | ((u > 1e-9) & (u < 1.0 - 1e-9))]

    def _q(self, u):
        # quadrature nodes may round onto 0 or 1, where the tails are infinite
        return self.quantile(np.clip(u, 1e-300, 1.0 - 2.0 ** -53))

    def _integrate(self, f, a: float = 0.0, b: float = 1.0) -> float:
        """``int_a^b f(Q(u), u) du`` split at the quantile breakpoints."""
        if b <= a:
            return 0.0
        br = self._breaks
        inner = br[(br > a) & (br < b)]
        edges = np.r_[a, inner, b]
        total = 0.0
        n = edges.size - 1
        # pieces touching an infinite tail are integrated in s = -log(distance to the end)
        lower = a == 0.0 and not np.isfinite(self.support[0])
        upper = b == 1.0 and not np.isfinite(self.support[1])
        k0, k1 = (1 if lower else 0), (n - 1 if upper else n)
        if k1 > k0:
            total += _adaptive_gl(lambda uu: f(self._q(uu), uu), edges[k0:k1], edges[k0 + 1:k1 + 1])
        if lower and edges[1] > 0:
            e = edges[1]

            def g(ss):
                uu = e * np.exp(-ss)
                return f(self._q(uu), uu) * uu

            total += _adaptive_gl(g, *_tail_pieces(np.log(e / 1e-300)))
        if upper and edges[-2] < 1:
            e = 1.0 - edges[-2]

            def g(ss):
                vv = e * np.exp(-ss)
                uu = 1.0 - vv
                return f(self._q(uu), uu) * vv

            total += _adaptive_gl(g, *_tail_pieces(np.log(e / 2.0 ** -53)))
        return total

    def _tail_ok(self, f) -> bool:
        """Reject integrands that blow up like ``u^-1`` or faster at an infinite tail."""
        checks = []
        if not np.isfinite(self.support[0]):
            checks.append(np.array(_TAIL_STEPS))
        if not np.isfinite(self.support[1]):
            checks.append(1.0 - np.array(_TAIL_STEPS))
        for us in checks:
            v = np.abs(f(self.quantile(us), us))
            if not np.all(np.isfinite(v)):
                return False
            if v[1] > 0 and v[0] > 0:
                beta = np.log(v[1] / v[0]) / np.log(_TAIL_STEPS[0] / _TAIL_STEPS[1])
                if beta >= 0.999:
                    return False
        return True

    def moment(self, k: int, center: float = 0.0) -> float:
        """``E[(X - center)^k]``; raises ``MomentUndefined`` for nonintegrable tails."""
        key = ("moment", k, center)
        if key not in self._cache:
            f = lambda q, u: (q - center) ** k  # noqa: E731
            if not self._tail_ok(f):
                self._cache[key] = None
            else:
                self._cache[key] = self._integrate(f)
        val = self._cache[key]
        if val is None:
            raise MomentUndefined(f"moment of order {k} is not finite")
        return val

    def mean(self) -> float:
        return self.moment(1)

    def median(self) -> float:
        return float(self.quantile(0.5))

    def variance(self) -> float:
        return self.moment(2, self.mean())

    def lorenz(self, q):
        """Lorenz curve ``int_0^q Q / int_0^1 Q``."""
        mu = self._lorenz_denominator()
        q = np.asarray(q, dtype=float)
        if np.any((q < 0) | (q > 1)):
            raise ValueError("q must lie in [0, 1]")
        f = lambda x, u: x  # noqa: E731
        flat = np.atleast_1d(q)
        out = np.array([self._integrate(f, 0.0, float(v)) for v in flat]) / mu
        out = np.where(flat <= 0, 0.0, np.where(flat >= 1, 1.0, out))
        return out.reshape(q.shape) if q.ndim else float(out[0])

    def gini(self) -> float:
        mu = self._lorenz_denominator()
        return 1.0 - 2.0 * self._integrate(lambda x, u: (1.0 - u) * x) / mu

    def _lorenz_denominator(self) -> float:
        lo, hi = self.support
        if lo < 0 < hi:
            raise MomentUndefined("Lorenz curve undefined: support has both signs")
        mu = self.mean()
        if mu == 0:
            raise MomentUndefined("Lorenz curve undefined: mean is zero")
        return mu


def _gl(func, left, right):
    half = 0.5 * (right - left)
    mid = 0.5 * (right + left)
    ss = mid[:, None] + half[:, None] * _GL_X[None, :]
    return np.sum(half[:, None] * _GL_W[None, :] * func(ss), axis=1)


def _adaptive_gl(func, left, right, tol: float = 1e-13, depth: int = 40) -> float:
    """Vectorized Gauss-Legendre with bisection of pieces whose halves disagree."""
    left, right = np.asarray(left, dtype=float), np.asarray(right, dtype=float)
    total = 0.0
    whole = _gl(func, left, right)
    for _ in range(depth):
        if left.size == 0:
            break
        mid = 0.5 * (left + right)
        a, b = _gl(func, left, mid), _gl(func, mid, right)
        done = np.abs(a + b - whole) <= tol * np.maximum(1.0, np.abs(whole))
        done |= right - left < 1e-14
        total += float(np.sum((a + b)[done]))
        keep = ~done
        left = np.r_[left[keep], mid[keep]]
        right = np.r_[mid[keep], right[keep]]
        whole = np.r_[a[keep], b[keep]]
    return total + float(np.sum(whole))


def _tail_pieces(s_max: float):
    """Geometric partition of ``[0, s_max]``."""
    cuts = np.r_[0.0, 2.0 ** np.arange(-2, 11)]
    cuts = np.unique(np.r_[cuts[cuts < s_max], s_max])
    return cuts[:-1], cuts[1:]


def snap_to_atoms(t, points, rtol: float = 1e-12):
    """Move entries of ``t`` onto the nearest of ``points`` when within ``rtol``."""
    t = np.asarray(t, dtype=float)
    if points.size == 0:
        return t
    k = np.clip(np.searchsorted(points, t), 1, max(points.size - 1, 1))
    lo = points[k - 1]
    hi = points[np.minimum(k, points.size - 1)]
    near = np.where(np.abs(t - lo) <= np.abs(hi - t), lo, hi)
    close = np.abs(t - near) <= rtol * np.maximum(1.0, np.abs(t))
    return np.where(close, near, t)


def build_H(group: GroupData, cstar: ChronometricFn) -> EmpiricalLatentCDF:
    """Empirical latent CDF of ``group`` under representative ``cstar``.

    Raises
    ------
    BoundsMismatch
        If the data's time bounds are not contained in those of ``cstar``.
    """
    if not cstar.bounds.covers(group.bounds):
        raise BoundsMismatch(
            f"data bounds [{group.bounds.t_lo}, {group.bounds.t_hi}] exceed representative "
            f"bounds [{cstar.bounds.t_lo}, {cstar.bounds.t_hi}]")
    return EmpiricalLatentCDF(group, cstar)


def _branch_table(F: TimeCDF, bounds: TimeBounds, n: int = 4097):
    """Knots ``(v, t)`` of the interpolated quantile function of ``F``."""
    if isinstance(F, StepCDF):
        F = F.with_mode(INTERP)
        ts, vs = F._anchored()
        return vs, ts
    v = np.linspace(0.0, 1.0, n)
    t = np.maximum.accumulate(np.clip(np.asarray(F.quantile(v), dtype=float), bounds.t_lo, bounds.t_hi))
    return v, t


def _flat_intervals(vs, ts):
    return [(float(ts[k]), float(ts[k + 1])) for k in np.flatnonzero(np.diff(vs) <= 0)]


def build_boundary_cstar(group: GroupData, strict: bool = False) -> BoundaryTabulated:
    """Representative function ``c*(x) = F1^{-1}(1 - x)`` on (0, 1], ``F0^{-1}(1 + x)`` on [-1, 0].

    Under this representative ``H`` is linear on each branch: ``p0 (1 + x)``
    on [-1, 0] and ``1 - p1 + p1 x`` on (0, 1]. Step data use the interpolated
    quantile. With ``strict=True`` a flat stretch of either CDF is an error.
    """
    b = group.bounds
    tables = []
    for F, p in ((group.F0, group.p0), (group.F1, group.p1)):
        if p <= 0 or isinstance(F, DegenerateCDF):
            if not np.isfinite(b.t_hi):
                raise ValueError("degenerate branch needs a finite t_hi")
            tables.append((np.array([0.0, 1.0]), np.array([b.t_lo, b.t_hi])))
            continue
        vs, ts = _branch_table(F, b)
        if strict:
            flats = _flat_intervals(vs, ts)
            if isinstance(F, StepCDF):
                flats += [iv for iv in F.with_mode(INTERP).flat_intervals(b.t_hi) if iv not in flats]
            if flats:
                a, z = flats[0]
                raise FlatSegment(f"response-time CDF is flat on [{a:.6g}, {z:.6g}]")
        tables.append((vs, ts))
    (v0, t0), (v1, t1) = tables
    return BoundaryTabulated(b, v0 - 1.0, t0, (1.0 - v1)[::-1], t1[::-1])


def h_stats(H: EmpiricalLatentCDF) -> HStats:
    """Mean, median, variance, skewness and excess kurtosis of ``H``."""

    def attempt(fn):
        try:
            return fn()
        except MomentUndefined:
            return None

    mean = attempt(H.mean)
    var = attempt(H.variance) if mean is not None else None
    skew = kurt = None
    if var is not None and var > 0:
        m3 = attempt(lambda: H.moment(3, mean))
        m4 = attempt(lambda: H.moment(4, mean))
        skew = None if m3 is None else m3 / var ** 1.5
        kurt = None if m4 is None else m4 / var ** 2 - 3.0
    return HStats(mean, H.median(), var, skew, kurt)


def lorenz(H: EmpiricalLatentCDF, q):
    return H.lorenz(q)


def gini(H: EmpiricalLatentCDF) -> float:
    return H.gini()
