"""Binary response models with response times.

A latent value ``x`` drawn from a continuous CDF ``G`` produces response 0 when
``x <= 0`` and response 1 otherwise; the response time is ``c(x)`` for a
chronometric function ``c`` that peaks at ``c(0) = t_hi`` and falls towards
``t_lo`` as ``|x|`` grows. This module holds the latent families, the
chronometric families, the forward map from ``(G, c)`` to observable data and
a seeded simulator with speed heterogeneity and multiplicative noise.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import special, stats

from .ecdf import INTERP, DegenerateCDF, InducedCDF, StepCDF, TimeCDF, empirical_cdf
from .transforms import Identity, Monotone, Tabulated, TimeMap


class DomainError(ValueError):
    """A time lies outside the range of a chronometric function."""


@dataclass(frozen=True)
class TimeBounds:
    """Fastest and slowest possible response time.

    ``t_hi`` may be infinite only for the reciprocal representative used with
    baseline-normalized times.
    """

    t_lo: float
    t_hi: float

    def __post_init__(self):
        if not (0.0 <= self.t_lo < self.t_hi):
            raise ValueError(f"need 0 <= t_lo < t_hi, got ({self.t_lo}, {self.t_hi})")
        if np.isnan(self.t_hi):
            raise ValueError("t_hi is NaN")

    @property
    def span(self) -> float:
        return self.t_hi - self.t_lo

    def covers(self, other: "TimeBounds", rtol: float = 1e-12) -> bool:
        slack = rtol * max(1.0, abs(other.t_lo), abs(other.t_hi) if np.isfinite(other.t_hi) else 1.0)
        return self.t_lo <= other.t_lo + slack and self.t_hi >= other.t_hi - slack


DEFAULT_BOUNDS = TimeBounds(0.1, 1.1)


# --------------------------------------------------------------------------
# chronometric functions


class ChronometricFn:
    """Two-branch map from latent values to response times.

    Subclasses implement ``_branch(x)`` on the whole real line and
    ``_inverse(branch, t)`` on ``[t_lo, t_hi]``.
    """

    bounds: TimeBounds
    symmetric = False

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return self._eval(x)

    def _eval(self, x):
        raise NotImplementedError

    def inverse(self, branch: int, t):
        """Branch inverse, extended to ``t_lo`` by the asymptote or the boundary point."""
        if branch not in (0, 1):
            raise ValueError("branch must be 0 or 1")
        t = np.asarray(t, dtype=float)
        lo, hi = self.bounds.t_lo, self.bounds.t_hi
        if np.any(t < lo) or np.any(t > hi) or np.any(np.isnan(t)):
            bad = t[(t < lo) | (t > hi) | np.isnan(t)]
            raise DomainError(f"times {bad[:5].tolist()} outside [{lo}, {hi}]")
        with np.errstate(divide="ignore", invalid="ignore"):
            return self._inverse(branch, t)

    def _inverse(self, branch, t):
        raise NotImplementedError

    @property
    def asymptotic(self) -> bool:
        """True when ``t_lo`` is only approached in the limit."""
        return bool(np.isinf(self.inverse(0, self.bounds.t_lo)))

    def t_knots(self, branch: int) -> np.ndarray:
        """Times at which the branch inverse may have a kink."""
        return np.empty(0)


@dataclass(frozen=True)
class HyperbolicSymmetric(ChronometricFn):
    """``t_lo + 1 / (|x| + 1/(t_hi - t_lo))``; never reaches ``t_lo``.

    With ``t_hi = inf`` this is ``t_lo + 1/|x|``.
    """

    bounds: TimeBounds = DEFAULT_BOUNDS
    symmetric = True

    @property
    def _k(self):
        return 0.0 if np.isinf(self.bounds.t_hi) else 1.0 / self.bounds.span

    def _eval(self, x):
        return self.bounds.t_lo + 1.0 / (np.abs(x) + self._k)

    def _inverse(self, branch, t):
        r = 1.0 / (t - self.bounds.t_lo) - self._k
        r = np.maximum(r, 0.0)
        return -r if branch == 0 else r


@dataclass(frozen=True)
class LinearCapped(ChronometricFn):
    """``max(t_hi - slope * |x|, t_lo)``; reaches ``t_lo`` at ``|x| = (t_hi - t_lo)/slope``."""

    bounds: TimeBounds = DEFAULT_BOUNDS
    slope: float = 1.0
    symmetric = True

    def __post_init__(self):
        if not np.isfinite(self.bounds.t_hi):
            raise ValueError("LinearCapped needs a finite t_hi")
        if not self.slope > 0:
            raise ValueError("slope must be positive")

    def _eval(self, x):
        return np.maximum(self.bounds.t_hi - self.slope * np.abs(x), self.bounds.t_lo)

    def _inverse(self, branch, t):
        r = (self.bounds.t_hi - t) / self.slope
        return -r if branch == 0 else r


@dataclass(frozen=True, eq=False)
class BoundaryTabulated(ChronometricFn):
    """Chronometric function given by one monotone point table per branch.

    ``neg`` holds ``(x, t)`` knots with ``x <= 0`` increasing and ``t``
    nondecreasing; ``pos`` holds knots with ``x >= 0`` increasing and ``t``
    nonincreasing. Between knots the function is linear, outside it is ``t_lo``.
    """

    bounds: TimeBounds
    neg_x: np.ndarray
    neg_t: np.ndarray
    pos_x: np.ndarray
    pos_t: np.ndarray

    def __post_init__(self):
        nx, nt = np.asarray(self.neg_x, float), np.asarray(self.neg_t, float)
        px, pt = np.asarray(self.pos_x, float), np.asarray(self.pos_t, float)
        if nx.size < 2 or px.size < 2 or nx.shape != nt.shape or px.shape != pt.shape:
            raise ValueError("each branch table needs at least two matching knots")
        if np.any(np.diff(nx) < 0) or np.any(np.diff(nt) < 0) or nx[-1] > 0:
            raise ValueError("negative branch must be increasing on x <= 0")
        if np.any(np.diff(px) < 0) or np.any(np.diff(pt) > 0) or px[0] < 0:
            raise ValueError("positive branch must be decreasing on x >= 0")
        for arr in (nx, nt, px, pt):
            arr.setflags(write=False)
        object.__setattr__(self, "neg_x", nx)
        object.__setattr__(self, "neg_t", nt)
        object.__setattr__(self, "pos_x", px)
        object.__setattr__(self, "pos_t", pt)

    def _eval(self, x):
        lo = self.bounds.t_lo
        neg = np.interp(x, self.neg_x, self.neg_t, left=lo, right=self.neg_t[-1])
        pos = np.interp(x, self.pos_x, self.pos_t, left=self.pos_t[0], right=lo)
        return np.where(x <= 0, neg, pos)

    def _inverse(self, branch, t):
        if branch == 0:
            # for repeated times keep the largest x (closest to zero)
            ts, idx = np.unique(self.neg_t[::-1], return_index=True)
            xs = self.neg_x[::-1][idx]
            return np.interp(t, ts, xs)
        ts, idx = np.unique(self.pos_t, return_index=True)
        xs = self.pos_x[idx]
        out = np.interp(t, ts, xs)
        return out

    def t_knots(self, branch):
        return np.unique(self.neg_t if branch == 0 else self.pos_t)


@dataclass(frozen=True, eq=False)
class Composed(ChronometricFn):
    """``base o psi`` for a strictly increasing bijection ``psi`` with ``psi(0) = 0``."""

    base: ChronometricFn
    psi: Monotone = field(default_factory=Identity)

    def __post_init__(self):
        if abs(float(self.psi(0.0))) > 1e-12:
            raise ValueError("psi must fix zero")

    @property
    def bounds(self):
        return self.base.bounds

    @property
    def symmetric(self):
        return self.base.symmetric and self.psi.odd

    def _eval(self, x):
        return self.base(self.psi(x))

    def _inverse(self, branch, t):
        return self.psi.inverse(self.base.inverse(branch, t))

    def t_knots(self, branch):
        knots = [self.base.t_knots(branch)]
        if isinstance(self.psi, Tabulated):
            xs = np.asarray(self.psi.xs)
            xs = xs[xs < 0] if branch == 0 else xs[xs > 0]
            knots.append(self.base(self.psi(xs)))
        return np.unique(np.concatenate(knots))


@dataclass(frozen=True, eq=False)
class AsymmetryMapped(ChronometricFn):
    """Branch 0 of ``base`` with branch 1 given by ``c1(x) = m(c0(-x))``."""

    base: ChronometricFn
    m: TimeMap

    @property
    def bounds(self):
        return self.base.bounds

    def _eval(self, x):
        neg = self.base(np.minimum(x, 0.0))
        pos = self.m(self.base(-np.abs(x)))
        return np.where(x <= 0, neg, pos)

    def _inverse(self, branch, t):
        if branch == 0:
            return self.base.inverse(0, t)
        return -self.base.inverse(0, np.clip(self.m.inverse(t), self.bounds.t_lo, self.bounds.t_hi))

    def t_knots(self, branch):
        if branch == 0:
            return self.base.t_knots(0)
        return np.unique(np.r_[self.m.knots, self.m(self.base.t_knots(0))])


def eval_chronometric(c: ChronometricFn, x):
    return c(x)


def invert_chronometric(c: ChronometricFn, branch: int, t):
    return c.inverse(branch, t)


# --------------------------------------------------------------------------
# latent distributions


class LatentCDF:
    """Continuous latent distribution ``G``."""

    def cdf(self, x):
        raise NotImplementedError

    def sf(self, x):
        return 1.0 - self.cdf(x)

    def ppf(self, u):
        raise NotImplementedError

    def isf(self, u):
        return self.ppf(1.0 - np.asarray(u, dtype=float))

    def pdf(self, x, h: float = 1e-6):
        x = np.asarray(x, dtype=float)
        return (self.cdf(x + h) - self.cdf(x - h)) / (2 * h)

    def __call__(self, x):
        return self.cdf(x)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return self.ppf(rng.random(n))

    def mean(self) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class _ScipyLatent(LatentCDF):
    """Location-scale family evaluated through ``scipy.special`` ufuncs."""

    def _dist(self):
        raise NotImplementedError

    def pdf(self, x, h=None):
        return self._dist().pdf(x)

    def mean(self):
        return float(self._dist().mean())


@dataclass(frozen=True)
class Logistic(_ScipyLatent):
    mu: float = 0.0
    s: float = 1.0

    def cdf(self, x):
        return special.expit((np.asarray(x, dtype=float) - self.mu) / self.s)

    def sf(self, x):
        return special.expit((self.mu - np.asarray(x, dtype=float)) / self.s)

    def ppf(self, u):
        return self.mu + self.s * special.logit(u)

    def isf(self, u):
        return self.mu - self.s * special.logit(u)

    def _dist(self):
        return stats.logistic(loc=self.mu, scale=self.s)


@dataclass(frozen=True)
class Normal(_ScipyLatent):
    mu: float = 0.0
    sigma: float = 1.0

    def cdf(self, x):
        return special.ndtr((np.asarray(x, dtype=float) - self.mu) / self.sigma)

    def sf(self, x):
        return special.ndtr((self.mu - np.asarray(x, dtype=float)) / self.sigma)

    def ppf(self, u):
        return self.mu + self.sigma * special.ndtri(u)

    def isf(self, u):
        return self.mu - self.sigma * special.ndtri(u)

    def _dist(self):
        return stats.norm(loc=self.mu, scale=self.sigma)


@dataclass(frozen=True)
class Uniform(_ScipyLatent):
    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        if not self.b > self.a:
            raise ValueError("need a < b")

    def cdf(self, x):
        return np.clip((np.asarray(x, dtype=float) - self.a) / (self.b - self.a), 0.0, 1.0)

    def sf(self, x):
        return np.clip((self.b - np.asarray(x, dtype=float)) / (self.b - self.a), 0.0, 1.0)

    def ppf(self, u):
        u = np.asarray(u, dtype=float)
        return np.where((u >= 0) & (u <= 1), self.a + u * (self.b - self.a), np.nan)

    def isf(self, u):
        u = np.asarray(u, dtype=float)
        return np.where((u >= 0) & (u <= 1), self.b - u * (self.b - self.a), np.nan)

    def _dist(self):
        return stats.uniform(loc=self.a, scale=self.b - self.a)


@dataclass(frozen=True, eq=False)
class Mixture(LatentCDF):
    components: tuple
    weights: tuple

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if len(self.components) != w.size or np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("mixture weights must be nonnegative and sum to 1")

    def cdf(self, x):
        return sum(w * c.cdf(x) for w, c in zip(self.weights, self.components))

    def sf(self, x):
        return sum(w * c.sf(x) for w, c in zip(self.weights, self.components))

    def pdf(self, x, h=1e-6):
        return sum(w * c.pdf(x) for w, c in zip(self.weights, self.components))

    def ppf(self, u):
        u = np.asarray(u, dtype=float)
        qs = np.stack([np.asarray(c.ppf(u), dtype=float) for c in self.components])
        lo, hi = qs.min(axis=0), qs.max(axis=0)
        lo = np.where(np.isfinite(lo), lo, -1e300)
        hi = np.where(np.isfinite(hi), hi, 1e300)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            below = self.cdf(mid) < u
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
            if np.all(hi - lo <= 1e-15 * np.maximum(1.0, np.abs(hi))):
                break
        out = hi
        out = np.where(u <= 0, -np.inf, out)
        return np.where(u >= 1, np.inf, out)

    def isf(self, u):
        return self.ppf(1.0 - np.asarray(u, dtype=float))

    def sample(self, rng, n):
        which = rng.choice(len(self.components), size=n, p=np.asarray(self.weights, dtype=float))
        u = rng.random(n)
        out = np.empty(n)
        for k, comp in enumerate(self.components):
            sel = which == k
            out[sel] = comp.ppf(u[sel])
        return out

    def mean(self):
        return float(sum(w * c.mean() for w, c in zip(self.weights, self.components)))


@dataclass(frozen=True, eq=False)
class TabulatedLatent(LatentCDF):
    """Piecewise-linear CDF through ``(xs, ps)``; 0 left of the table, 1 right of it."""

    xs: np.ndarray
    ps: np.ndarray

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        ps = np.asarray(self.ps, dtype=float)
        if xs.shape != ps.shape or xs.size < 2 or np.any(np.diff(xs) <= 0) or np.any(np.diff(ps) < 0):
            raise ValueError("need increasing knots and a nondecreasing CDF table")
        if abs(ps[0]) > 1e-12 or abs(ps[-1] - 1.0) > 1e-12:
            raise ValueError("tabulated CDF must run from 0 to 1")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ps", ps)

    def cdf(self, x):
        return np.interp(np.asarray(x, dtype=float), self.xs, self.ps, left=0.0, right=1.0)

    def ppf(self, u):
        u = np.asarray(u, dtype=float)
        keep = np.r_[True, np.diff(self.ps) > 0]
        out = np.interp(u, self.ps[keep], self.xs[keep])
        out = np.where(u <= 0, -np.inf, out)
        return np.where(u >= 1, np.inf, out)

    def mean(self):
        dp = np.diff(self.ps)
        mid = 0.5 * (self.xs[1:] + self.xs[:-1])
        return float(np.sum(dp * mid))


@dataclass(frozen=True, eq=False)
class Transformed(LatentCDF):
    """``base o phi``: the law of ``phi^{-1}(Y)`` for ``Y ~ base``."""

    base: LatentCDF
    phi: Monotone

    def cdf(self, x):
        return self.base.cdf(self.phi(x))

    def sf(self, x):
        return self.base.sf(self.phi(x))

    def ppf(self, u):
        return self.phi.inverse(self.base.ppf(u))

    def isf(self, u):
        return self.phi.inverse(self.base.isf(u))

    def sample(self, rng, n):
        return self.phi.inverse(self.base.sample(rng, n))


# --------------------------------------------------------------------------
# observations


@dataclass(frozen=True)
class RawObservation:
    group_id: str
    response: int
    time: float
    baseline_time: float | None = None

    def __post_init__(self):
        if self.response not in (0, 1):
            raise ValueError(f"response must be 0 or 1, got {self.response!r}")
        if not (np.isfinite(self.time) and self.time > 0):
            raise ValueError(f"time must be positive and finite, got {self.time!r}")
        if self.baseline_time is not None and not (np.isfinite(self.baseline_time) and self.baseline_time > 0):
            raise ValueError(f"baseline_time must be positive, got {self.baseline_time!r}")


@dataclass(frozen=True, eq=False)
class ObservationTable:
    """Columnar collection of raw observations; iterates as ``RawObservation``."""

    group: np.ndarray
    response: np.ndarray
    time: np.ndarray
    baseline: np.ndarray

    def __post_init__(self):
        n = len(self.time)
        group = np.asarray(self.group, dtype=object)
        resp = np.asarray(self.response, dtype=np.int8)
        time = np.asarray(self.time, dtype=float)
        base = np.asarray(self.baseline, dtype=float)
        if not (len(group) == len(resp) == len(base) == n):
            raise ValueError("columns must have equal length")
        if np.any((resp != 0) & (resp != 1)):
            raise ValueError("responses must be 0 or 1")
        if np.any(~np.isfinite(time)) or np.any(time <= 0):
            raise ValueError("times must be positive and finite")
        if np.any(base[~np.isnan(base)] <= 0):
            raise ValueError("baseline times must be positive")
        for arr in (group, resp, time, base):
            arr.setflags(write=False)
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "response", resp)
        object.__setattr__(self, "time", time)
        object.__setattr__(self, "baseline", base)

    @classmethod
    def from_records(cls, records: Iterable[RawObservation]) -> "ObservationTable":
        records = list(records)
        return cls(
            np.array([r.group_id for r in records], dtype=object),
            np.array([r.response for r in records], dtype=np.int8),
            np.array([r.time for r in records], dtype=float),
            np.array([np.nan if r.baseline_time is None else r.baseline_time for r in records], dtype=float),
        )

    @classmethod
    def concat(cls, tables: Sequence["ObservationTable"]) -> "ObservationTable":
        return cls(
            np.concatenate([t.group for t in tables]),
            np.concatenate([t.response for t in tables]),
            np.concatenate([t.time for t in tables]),
            np.concatenate([t.baseline for t in tables]),
        )

    def __len__(self):
        return len(self.time)

    def __iter__(self):
        for g, r, t, b in zip(self.group, self.response, self.time, self.baseline):
            yield RawObservation(str(g), int(r), float(t), None if np.isnan(b) else float(b))

    @property
    def has_baseline(self) -> bool:
        return bool(len(self)) and not np.any(np.isnan(self.baseline))

    def labels(self) -> list[str]:
        seen = dict.fromkeys(str(g) for g in self.group)
        return list(seen)

    def select(self, label: str) -> "ObservationTable":
        sel = np.array([str(g) == label for g in self.group], dtype=bool)
        return self.take(np.flatnonzero(sel))

    def take(self, idx) -> "ObservationTable":
        return ObservationTable(self.group[idx], self.response[idx], self.time[idx], self.baseline[idx])

    def by_group(self) -> dict[str, "ObservationTable"]:
        return {lab: self.select(lab) for lab in self.labels()}


def _as_table(observations) -> ObservationTable:
    if isinstance(observations, ObservationTable):
        return observations
    return ObservationTable.from_records(observations)


# --------------------------------------------------------------------------
# observable data


@dataclass(frozen=True, eq=False)
class GroupData:
    """Observables of one group: response shares and conditional time CDFs."""

    p0: float
    p1: float
    F0: TimeCDF
    F1: TimeCDF
    bounds: TimeBounds
    label: str | None = None
    n: int | None = None

    def __post_init__(self):
        if abs(self.p0 + self.p1 - 1.0) > 1e-12 or min(self.p0, self.p1) < 0:
            raise ValueError(f"response shares must be nonnegative and sum to 1, got {self.p0}, {self.p1}")
        for F in (self.F0, self.F1):
            if np.isfinite(self.bounds.t_hi) and abs(float(F.cdf(self.bounds.t_hi)) - 1.0) > 1e-9:
                raise ValueError("response-time CDFs must reach 1 at t_hi")

    @property
    def degenerate(self) -> tuple[bool, bool]:
        return (self.p0 == 0.0, self.p1 == 0.0)

    @property
    def sampled(self) -> bool:
        return isinstance(self.F0, StepCDF) or isinstance(self.F1, StepCDF)

    def F(self, i: int) -> TimeCDF:
        return self.F0 if i == 0 else self.F1

    def p(self, i: int) -> float:
        return self.p0 if i == 0 else self.p1

    def sub(self, i: int, t):
        """Sub-distribution function ``p_i F_i(t)``."""
        return self.p(i) * self.F(i).cdf(t)

    @property
    def grid(self) -> np.ndarray:
        pts = [self.F0.knots, self.F1.knots, [self.bounds.t_lo]]
        if np.isfinite(self.bounds.t_hi):
            pts.append([self.bounds.t_hi])
        g = np.unique(np.concatenate([np.asarray(p, dtype=float) for p in pts]))
        return g[(g >= self.bounds.t_lo) & (g <= self.bounds.t_hi) & np.isfinite(g)]

    def with_mode(self, mode: str) -> "GroupData":
        return GroupData(self.p0, self.p1, self.F0.with_mode(mode), self.F1.with_mode(mode),
                         self.bounds, self.label, self.n)

    @classmethod
    def from_samples(cls, times0, times1, bounds: TimeBounds | None = None, mode: str = INTERP,
                     label: str | None = None) -> "GroupData":
        t0 = np.asarray(times0, dtype=float).ravel()
        t1 = np.asarray(times1, dtype=float).ravel()
        n = t0.size + t1.size
        if n == 0:
            raise ValueError("group has no observations")
        if bounds is None:
            bounds = inferred_bounds(np.r_[t0, t1])
        p0 = t0.size / n
        F0 = empirical_cdf(t0, mode=mode, t_lo=bounds.t_lo, t_hi=bounds.t_hi) if t0.size else \
            DegenerateCDF(bounds.t_lo, bounds.t_hi)
        F1 = empirical_cdf(t1, mode=mode, t_lo=bounds.t_lo, t_hi=bounds.t_hi) if t1.size else \
            DegenerateCDF(bounds.t_lo, bounds.t_hi)
        return cls(p0, 1.0 - p0, F0, F1, bounds, label, n)

    @classmethod
    def from_observations(cls, observations, bounds: TimeBounds | None = None, mode: str = INTERP,
                          label: str | None = None) -> "GroupData":
        tab = _as_table(observations)
        if label is None and len(tab):
            labels = tab.labels()
            label = labels[0] if len(labels) == 1 else None
        return cls.from_samples(tab.time[tab.response == 0], tab.time[tab.response == 1], bounds, mode, label)


def inferred_bounds(times) -> TimeBounds:
    """``(0, max * (1 + 1e-9))``: the slowest observed time just inside ``t_hi``."""
    times = np.asarray(times, dtype=float)
    return TimeBounds(0.0, float(times.max()) * (1.0 + 1e-9))


def induce_data(G: LatentCDF, c: ChronometricFn, grid=None, label: str | None = None) -> GroupData:
    """Response shares and time CDFs induced by the model ``(G, c)``.

    ``p0 = G(0)``, ``p0 F0(t) = G(c0^{-1}(t))`` and ``p1 F1(t) = 1 - G(c1^{-1}(t))``.
    A response with zero probability gets the constant CDF 1 and shows up in
    ``GroupData.degenerate``.
    """
    b = c.bounds
    if grid is None:
        hi = b.t_hi if np.isfinite(b.t_hi) else b.t_lo + 100.0
        grid = np.linspace(b.t_lo, hi, 513)
    grid = np.asarray(grid, dtype=float)
    if np.any(grid < b.t_lo) or np.any(grid > b.t_hi):
        raise DomainError("grid must lie within the chronometric bounds")
    p0 = float(G.cdf(0.0))
    p1 = float(G.sf(0.0))
    p1 = 1.0 - p0 if abs(p0 + p1 - 1.0) > 1e-15 else p1
    F0 = InducedCDF(G, c, 0, p0, grid) if p0 > 0 else DegenerateCDF(b.t_lo, b.t_hi)
    F1 = InducedCDF(G, c, 1, p1, grid) if p1 > 0 else DegenerateCDF(b.t_lo, b.t_hi)
    return GroupData(p0, 1.0 - p0, F0, F1, b, label)


# --------------------------------------------------------------------------
# simulation


@dataclass(frozen=True)
class Constant:
    value: float = 1.0

    def sample(self, rng, n):
        return np.full(n, float(self.value))


@dataclass(frozen=True)
class LogNormal:
    sigma: float
    mu: float = 0.0

    def sample(self, rng, n):
        return np.exp(self.mu + self.sigma * rng.standard_normal(n))


@dataclass(frozen=True)
class NoiseSpec:
    """Speed heterogeneity and noise: ``t = c(x) * eta * eps`` and ``t_b = phi * eta``.

    ``eta_sampler(rng, x)`` may replace ``eta`` to couple speed with ``x``;
    ``phi_eps_sampler(rng, n)`` may replace ``phi``/``eps`` with a joint law.
    """

    eta: object = Constant(1.0)
    phi: object = Constant(1.0)
    eps: object = Constant(1.0)
    eta_sampler: Callable | None = None
    phi_eps_sampler: Callable | None = None

    @classmethod
    def lognormal(cls, eta_sigma: float = 0.0, eps_sigma: float = 0.0, phi: float = 1.0) -> "NoiseSpec":
        return cls(
            eta=LogNormal(eta_sigma) if eta_sigma > 0 else Constant(1.0),
            phi=Constant(phi),
            eps=LogNormal(eps_sigma) if eps_sigma > 0 else Constant(1.0),
        )

    def draw(self, rng, x):
        n = x.size
        eta = self.eta_sampler(rng, x) if self.eta_sampler else self.eta.sample(rng, n)
        if self.phi_eps_sampler:
            phi, eps = self.phi_eps_sampler(rng, n)
        else:
            phi, eps = self.phi.sample(rng, n), self.eps.sample(rng, n)
        eta, phi, eps = (np.asarray(a, dtype=float) for a in (eta, phi, eps))
        if np.any(eta <= 0) or np.any(phi <= 0) or np.any(eps <= 0):
            raise ValueError("noise draws must be strictly positive")
        return eta, phi, eps


CHUNK = 1 << 16


def _chunk_rng(seed: int, k: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(k,)))


def simulate_raw(G: LatentCDF, c: ChronometricFn, noise: NoiseSpec | None, n: int, seed: int,
                 group_id: str = "g", workers: int = 1) -> ObservationTable:
    """Draw ``n`` observations; identical for a given seed whatever ``workers`` is.

    Draws are produced in fixed chunks of ``CHUNK`` rows, each seeded from
    ``(seed, chunk index)``.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    starts = list(range(0, n, CHUNK))

    def run(k):
        m = min(CHUNK, n - starts[k])
        rng = _chunk_rng(seed, k)
        x = np.asarray(G.sample(rng, m), dtype=float)
        x = np.where(x == 0.0, np.nextafter(0.0, -1.0), x)
        t = np.asarray(c(x), dtype=float)
        if noise is None:
            return x > 0, t, np.full(m, np.nan)
        eta, phi, eps = noise.draw(rng, x)
        return x > 0, t * eta * eps, phi * eta

    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(run, range(len(starts))))
    else:
        parts = [run(k) for k in range(len(starts))]
    resp = np.concatenate([p[0] for p in parts]).astype(np.int8)
    time = np.concatenate([p[1] for p in parts])
    base = np.concatenate([p[2] for p in parts])
    return ObservationTable(np.full(n, group_id, dtype=object), resp, time, base)


def normalize(observations, mode: str = INTERP, label: str | None = None) -> GroupData:
    """Group data from baseline-normalized times ``t / t_b``.

    Bounds are ``(0, max ratio * (1 + 1e-9))``.
    """
    tab = _as_table(observations)
    missing = np.flatnonzero(np.isnan(tab.baseline))
    if missing.size:
        shown = ", ".join(str(i) for i in missing[:20])
        more = "" if missing.size <= 20 else f" (+{missing.size - 20} more)"
        raise ValueError(f"missing baseline_time in rows {shown}{more}")
    ratio = tab.time / tab.baseline
    if label is None:
        labels = tab.labels()
        label = labels[0] if len(labels) == 1 else None
    return GroupData.from_samples(ratio[tab.response == 0], ratio[tab.response == 1],
                                  inferred_bounds(ratio), mode, label)
