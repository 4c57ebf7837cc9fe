"""Strictly increasing maps used as transformations of latent values and times.

These cover the psi/phi transformations that generate chronometric classes,
the witnesses returned by rationalizability checks, and the time maps relating
the two response branches of an asymmetric representative function.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np


class Monotone:
    """Strictly increasing bijection with a known inverse (vectorized)."""

    odd = False

    def __call__(self, x):
        raise NotImplementedError

    def inverse(self, y):
        raise NotImplementedError

    def then(self, other: "Monotone") -> "Monotone":
        """Return ``other o self``."""
        return Chain((self, other))


@dataclass(frozen=True)
class Identity(Monotone):
    odd = True

    def __call__(self, x):
        return np.asarray(x, dtype=float) * 1.0

    def inverse(self, y):
        return np.asarray(y, dtype=float) * 1.0


@dataclass(frozen=True)
class Linear(Monotone):
    """``x -> slope * x``."""

    slope: float
    odd = True

    def __post_init__(self):
        if not self.slope > 0:
            raise ValueError("slope must be positive")

    def __call__(self, x):
        return self.slope * np.asarray(x, dtype=float)

    def inverse(self, y):
        return np.asarray(y, dtype=float) / self.slope


@dataclass(frozen=True)
class Affine(Monotone):
    """``x -> shift + slope * x``; not admissible as a chronometric psi unless shift == 0."""

    shift: float
    slope: float

    def __post_init__(self):
        if not self.slope > 0:
            raise ValueError("slope must be positive")

    def __call__(self, x):
        return self.shift + self.slope * np.asarray(x, dtype=float)

    def inverse(self, y):
        return (np.asarray(y, dtype=float) - self.shift) / self.slope


@dataclass(frozen=True)
class PiecewiseLinear(Monotone):
    """Slope ``neg_slope`` below zero and ``pos_slope`` above zero."""

    neg_slope: float
    pos_slope: float

    def __post_init__(self):
        if not (self.neg_slope > 0 and self.pos_slope > 0):
            raise ValueError("slopes must be positive")

    @property
    def odd(self):
        return self.neg_slope == self.pos_slope

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x < 0, self.neg_slope * x, self.pos_slope * x)

    def inverse(self, y):
        y = np.asarray(y, dtype=float)
        return np.where(y < 0, y / self.neg_slope, y / self.pos_slope)


@dataclass(frozen=True)
class SignedPower(Monotone):
    """``x -> scale * sign(x) * |x| ** power``."""

    power: float
    scale: float = 1.0
    odd = True

    def __post_init__(self):
        if not (self.power > 0 and self.scale > 0):
            raise ValueError("power and scale must be positive")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.scale * np.sign(x) * np.abs(x) ** self.power

    def inverse(self, y):
        y = np.asarray(y, dtype=float) / self.scale
        return np.sign(y) * np.abs(y) ** (1.0 / self.power)


@dataclass(frozen=True)
class Sinh(Monotone):
    """``x -> scale * sinh(x / width)``; convex above zero, concave below."""

    scale: float = 1.0
    width: float = 1.0
    odd = True

    def __call__(self, x):
        return self.scale * np.sinh(np.asarray(x, dtype=float) / self.width)

    def inverse(self, y):
        return self.width * np.arcsinh(np.asarray(y, dtype=float) / self.scale)


@dataclass(frozen=True)
class Tabulated(Monotone):
    """Piecewise-linear map through strictly increasing knots.

    Outside the knot range the first/last segment slopes are extended, so the
    map stays a bijection of the reals.
    """

    xs: tuple
    ys: tuple

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        ys = np.asarray(self.ys, dtype=float)
        if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 2:
            raise ValueError("need matching 1-d knot arrays with at least two points")
        if np.any(np.diff(xs) <= 0) or np.any(np.diff(ys) <= 0):
            raise ValueError("knots must be strictly increasing in both coordinates")
        object.__setattr__(self, "xs", tuple(xs.tolist()))
        object.__setattr__(self, "ys", tuple(ys.tolist()))

    @staticmethod
    def _interp(v, a, b):
        a = np.asarray(a)
        b = np.asarray(b)
        v = np.asarray(v, dtype=float)
        out = np.interp(v, a, b)
        lo_slope = (b[1] - b[0]) / (a[1] - a[0])
        hi_slope = (b[-1] - b[-2]) / (a[-1] - a[-2])
        out = np.where(v < a[0], b[0] + lo_slope * (v - a[0]), out)
        return np.where(v > a[-1], b[-1] + hi_slope * (v - a[-1]), out)

    def __call__(self, x):
        return self._interp(x, self.xs, self.ys)

    def inverse(self, y):
        return self._interp(y, self.ys, self.xs)


@dataclass(frozen=True)
class FromCallables(Monotone):
    fn: Callable
    inv: Callable
    odd: bool = False

    def __call__(self, x):
        return np.asarray(self.fn(np.asarray(x, dtype=float)), dtype=float)

    def inverse(self, y):
        return np.asarray(self.inv(np.asarray(y, dtype=float)), dtype=float)


@dataclass(frozen=True)
class Chain(Monotone):
    """Composition applying ``parts`` left to right."""

    parts: tuple = field(default_factory=tuple)

    @property
    def odd(self):
        return all(p.odd for p in self.parts)

    def __call__(self, x):
        out = np.asarray(x, dtype=float)
        for p in self.parts:
            out = p(out)
        return out

    def inverse(self, y):
        out = np.asarray(y, dtype=float)
        for p in reversed(self.parts):
            out = p.inverse(out)
        return out


@dataclass(frozen=True)
class TimeMap:
    """Increasing self-map ``m`` of ``[t_lo, t_hi]`` given by a point table.

    ``m(t) = t`` is obtained with ``TimeMap.identity(t_lo, t_hi)``.
    """

    ts: tuple
    ms: tuple

    def __post_init__(self):
        ts = np.asarray(self.ts, dtype=float)
        ms = np.asarray(self.ms, dtype=float)
        if ts.shape != ms.shape or ts.size < 2:
            raise ValueError("need matching knot arrays with at least two points")
        if np.any(np.diff(ts) <= 0) or np.any(np.diff(ms) < 0):
            raise ValueError("time map must be increasing")
        if not (np.isclose(ms[0], ts[0]) and np.isclose(ms[-1], ts[-1])):
            raise ValueError("time map must send [t_lo, t_hi] onto itself")
        object.__setattr__(self, "ts", tuple(ts.tolist()))
        object.__setattr__(self, "ms", tuple(ms.tolist()))

    @classmethod
    def identity(cls, t_lo: float, t_hi: float) -> "TimeMap":
        return cls((t_lo, t_hi), (t_lo, t_hi))

    @classmethod
    def from_function(cls, fn, t_lo: float, t_hi: float, n: int = 1025) -> "TimeMap":
        ts = np.linspace(t_lo, t_hi, n)
        ms = np.asarray(fn(ts), dtype=float)
        ms[0], ms[-1] = t_lo, t_hi
        return cls(tuple(ts), tuple(np.maximum.accumulate(ms)))

    def __call__(self, t):
        return np.interp(np.asarray(t, dtype=float), self.ts, self.ms)

    def inverse(self, t):
        """Smallest preimage (left inverse) of ``t``."""
        ms = np.asarray(self.ms)
        ts = np.asarray(self.ts)
        t = np.asarray(t, dtype=float)
        # collapse flat stretches to their left end
        keep = np.r_[True, np.diff(ms) > 0]
        return np.interp(t, ms[keep], ts[keep])

    @property
    def knots(self):
        return np.asarray(self.ts)
