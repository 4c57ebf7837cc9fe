"""Conditional response-time distribution functions.

Every class here exposes the same small surface: ``cdf``, ``left_limit``,
``quantile`` (left inverse), ``quantile_right`` and ``knots`` (the points at
which the function may change slope or jump). Step functions built from
samples can be evaluated either as right-continuous steps or as the
piecewise-linear interpolation anchored at ``(t_lo, 0)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

STEP = "step"
INTERP = "interp"
MODES = (STEP, INTERP)


class TimeCDF:
    t_lo: float
    t_hi: float
    continuous = True

    def __call__(self, t):
        return self.cdf(t)

    def cdf(self, t):
        raise NotImplementedError

    def left_limit(self, t):
        return self.cdf(t)

    def quantile(self, v):
        raise NotImplementedError

    def quantile_right(self, v):
        return self.quantile(v)

    def support_lo(self) -> float:
        """Smallest time with positive mass nearby: ``inf{t : F(t) > 0}``."""
        return float(self.quantile(0.0))

    def support_hi(self) -> float:
        """``inf{t : F(t) = 1}``."""
        return float(self.quantile(1.0))

    @property
    def knots(self) -> np.ndarray:
        return np.array([self.t_lo, self.t_hi])

    def with_mode(self, mode: str) -> "TimeCDF":
        return self


@dataclass(frozen=True, eq=False)
class StepCDF(TimeCDF):
    """Distribution function of a finite weighted sample.

    Parameters
    ----------
    points : array
        Sorted unique support points.
    cum : array
        Cumulative weights at ``points``; nondecreasing and ending at 1.
    mode : {"step", "interp"}
        ``step`` evaluates the right-continuous ECDF. ``interp`` joins
        ``(t_lo, 0)`` and the points ``(points[k], cum[k])`` linearly.
    """

    points: np.ndarray
    cum: np.ndarray
    mode: str = STEP
    t_lo: float = 0.0
    t_hi: float = np.inf

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        cum = np.asarray(self.cum, dtype=float)
        if pts.ndim != 1 or pts.size == 0 or pts.shape != cum.shape:
            raise ValueError("points and cum must be nonempty 1-d arrays of equal length")
        if np.any(np.diff(pts) <= 0):
            raise ValueError("points must be strictly increasing")
        if np.any(np.diff(cum) < 0) or cum[0] < 0:
            raise ValueError("cumulative weights must be nondecreasing")
        if abs(cum[-1] - 1.0) > 1e-9:
            raise ValueError(f"cumulative weights must end at 1, got {cum[-1]!r}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if pts[0] < self.t_lo or pts[-1] > self.t_hi:
            raise ValueError("sample points fall outside [t_lo, t_hi]")
        cum = cum.copy()
        cum[-1] = 1.0
        pts.setflags(write=False)
        cum.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "cum", cum)

    @property
    def continuous(self):
        return self.mode == INTERP

    def with_mode(self, mode):
        if mode == self.mode:
            return self
        return StepCDF(self.points, self.cum, mode, self.t_lo, self.t_hi)

    @property
    def knots(self):
        return np.unique(np.r_[self.t_lo, self.points, self.t_hi if np.isfinite(self.t_hi) else self.points[-1]])

    def _anchored(self):
        if self.points[0] > self.t_lo:
            return np.r_[self.t_lo, self.points], np.r_[0.0, self.cum]
        return self.points, self.cum

    def cdf(self, t):
        t = np.asarray(t, dtype=float)
        if self.mode == STEP:
            idx = np.searchsorted(self.points, t, side="right")
            return np.where(idx == 0, 0.0, self.cum[np.maximum(idx - 1, 0)])
        xs, ys = self._anchored()
        return np.interp(t, xs, ys, left=0.0, right=1.0)

    def left_limit(self, t):
        if self.mode == INTERP:
            return self.cdf(t)
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.points, t, side="left")
        return np.where(idx == 0, 0.0, self.cum[np.maximum(idx - 1, 0)])

    def quantile(self, v):
        """Left inverse ``inf{t : F(t) >= v}``."""
        v = np.asarray(v, dtype=float)
        if self.mode == STEP:
            idx = np.searchsorted(self.cum, v, side="left")
            out = self.points[np.minimum(idx, self.points.size - 1)]
            return np.where(v <= 0, self.t_lo, out)
        xs, ys = self._anchored()
        # first knot reaching v, then interpolate back within its segment
        idx = np.clip(np.searchsorted(ys, v, side="left"), 1, ys.size - 1)
        y0, y1 = ys[idx - 1], ys[idx]
        x0, x1 = xs[idx - 1], xs[idx]
        with np.errstate(invalid="ignore", divide="ignore"):
            frac = np.where(y1 > y0, (v - y0) / (y1 - y0), 1.0)
        out = x0 + np.clip(frac, 0.0, 1.0) * (x1 - x0)
        return np.where(v <= 0, self.t_lo, out)

    def quantile_right(self, v):
        """Right inverse ``sup{t : F(t) <= v}`` (``t_hi`` once ``v >= 1``)."""
        v = np.asarray(v, dtype=float)
        if self.mode == STEP:
            idx = np.searchsorted(self.cum, v, side="right")
            out = self.points[np.minimum(idx, self.points.size - 1)]
            return np.where(v >= 1.0, self.t_hi, out)
        xs, ys = self._anchored()
        idx = np.clip(np.searchsorted(ys, v, side="right"), 1, ys.size - 1)
        y0, y1 = ys[idx - 1], ys[idx]
        x0, x1 = xs[idx - 1], xs[idx]
        with np.errstate(invalid="ignore", divide="ignore"):
            frac = np.where(y1 > y0, (v - y0) / (y1 - y0), 0.0)
        out = x0 + np.clip(frac, 0.0, 1.0) * (x1 - x0)
        return np.where(v >= 1.0, self.t_hi, out)

    def support_lo(self):
        if self.mode == INTERP and self.points[0] > self.t_lo:
            return float(self.t_lo)
        return float(self.points[0])

    def support_hi(self):
        return float(self.points[-1])

    def flat_intervals(self, t_hi: float | None = None):
        """Intervals of ``[t_lo, t_hi]`` on which the interpolated CDF is constant."""
        t_hi = self.t_hi if t_hi is None else t_hi
        xs, ys = self._anchored()
        out = [(float(xs[k]), float(xs[k + 1])) for k in np.flatnonzero(np.diff(ys) <= 0)]
        if np.isfinite(t_hi) and xs[-1] < t_hi:
            out.append((float(xs[-1]), float(t_hi)))
        return out


def empirical_cdf(samples, weights=None, mode: str = STEP, t_lo: float = 0.0, t_hi: float = np.inf) -> StepCDF:
    """Build the (weighted) empirical distribution function of ``samples``."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("empirical_cdf needs at least one sample")
    if not np.all(np.isfinite(x)):
        raise ValueError("samples must be finite")
    w = np.ones_like(x) if weights is None else np.asarray(weights, dtype=float).ravel()
    if w.shape != x.shape or np.any(w < 0) or w.sum() <= 0:
        raise ValueError("weights must be nonnegative, match samples and not all vanish")
    pts, inv = np.unique(x, return_inverse=True)
    mass = np.bincount(inv, weights=w, minlength=pts.size)
    cum = np.cumsum(mass) / mass.sum()
    keep = mass > 0
    return StepCDF(pts[keep], cum[keep], mode=mode, t_lo=t_lo, t_hi=t_hi)


@dataclass(frozen=True, eq=False)
class DegenerateCDF(TimeCDF):
    """Placeholder for a response with probability zero: identically one."""

    t_lo: float
    t_hi: float

    def cdf(self, t):
        return np.ones_like(np.asarray(t, dtype=float))

    def quantile(self, v):
        return np.full_like(np.asarray(v, dtype=float), self.t_lo)

    def support_hi(self):
        return float(self.t_lo)


@dataclass(frozen=True, eq=False)
class InducedCDF(TimeCDF):
    """Response-time CDF induced by a latent law and a chronometric function.

    ``branch`` 0 gives ``G(c0^{-1}(t)) / p0``; branch 1 gives
    ``(1 - G(c1^{-1}(t))) / p1``. Evaluation is exact; ``grid`` only records
    where sup-type conditions are checked.
    """

    latent: object
    chrono: object
    branch: int
    mass: float
    grid: np.ndarray

    @property
    def t_lo(self):
        return self.chrono.bounds.t_lo

    @property
    def t_hi(self):
        return self.chrono.bounds.t_hi

    @property
    def knots(self):
        return np.asarray(self.grid, dtype=float)

    def cdf(self, t):
        t = np.asarray(t, dtype=float)
        tc = np.clip(t, self.t_lo, self.t_hi)
        x = self.chrono.inverse(self.branch, tc)
        if self.branch == 0:
            val = self.latent.cdf(x) / self.mass
        else:
            val = self.latent.sf(x) / self.mass
        val = np.clip(val, 0.0, 1.0)
        val = np.where(t < self.t_lo, 0.0, val)
        return np.where(t >= self.t_hi, 1.0, val)

    def quantile(self, v):
        v = np.clip(np.asarray(v, dtype=float), 0.0, 1.0)
        if self.branch == 0:
            x = np.minimum(self.latent.ppf(v * self.mass), 0.0)
        else:
            x = np.maximum(self.latent.isf(v * self.mass), 0.0)
            x = np.where(x == 0.0, np.nextafter(0.0, 1.0), x)
        return np.asarray(self.chrono(x), dtype=float)


@dataclass(frozen=True, eq=False)
class MixtureCDF(TimeCDF):
    """Finite mixture of time CDFs sharing the same bounds."""

    components: tuple
    weights: tuple

    @property
    def t_lo(self):
        return min(c.t_lo for c in self.components)

    @property
    def t_hi(self):
        return max(c.t_hi for c in self.components)

    @property
    def continuous(self):
        return all(c.continuous for c in self.components)

    @property
    def knots(self):
        return np.unique(np.concatenate([c.knots for c in self.components]))

    def cdf(self, t):
        return sum(w * c.cdf(t) for w, c in zip(self.weights, self.components))

    def left_limit(self, t):
        return sum(w * c.left_limit(t) for w, c in zip(self.weights, self.components))

    def _bisect(self, v, right):
        v = np.asarray(v, dtype=float)
        lo = np.full(v.shape, self.t_lo)
        hi = np.full(v.shape, self.t_hi if np.isfinite(self.t_hi) else self.knots.max())
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            f = self.cdf(mid)
            go_right = f <= v if right else f < v
            lo = np.where(go_right, mid, lo)
            hi = np.where(go_right, hi, mid)
        return hi

    def quantile(self, v):
        v = np.asarray(v, dtype=float)
        return np.where(v <= 0, self.t_lo, self._bisect(v, right=False))

    def support_lo(self):
        return min(c.support_lo() for c in self.components)

    def support_hi(self):
        return max(c.support_hi() for c in self.components)

    def quantile_right(self, v):
        v = np.asarray(v, dtype=float)
        return np.where(v >= 1, self.t_hi, self._bisect(v, right=True))

    def with_mode(self, mode):
        return MixtureCDF(tuple(c.with_mode(mode) for c in self.components), self.weights)


def mix(components, weights) -> TimeCDF:
    """Mixture of time CDFs; step-based inputs with a common mode stay step-based."""
    weights = np.asarray(weights, dtype=float)
    keep = weights > 0
    comps = [c for c, k in zip(components, keep) if k]
    weights = weights[keep] / weights[keep].sum()
    if len(comps) == 1:
        return comps[0]
    if all(isinstance(c, StepCDF) for c in comps) and len({(c.mode, c.t_lo) for c in comps}) == 1:
        pts = np.unique(np.concatenate([c.points for c in comps]))
        cum = sum(w * c.cdf(pts) for w, c in zip(weights, comps))
        first = comps[0]
        return StepCDF(pts, np.minimum(np.maximum.accumulate(cum), 1.0), first.mode, first.t_lo,
                       max(c.t_hi for c in comps))
    return MixtureCDF(tuple(comps), tuple(weights.tolist()))
