"""Rationalizability of response data by restricted model classes.

Data are rationalizable by latent laws ``G*_j o phi_j`` and chronometric
functions ``c*_j o psi_j`` exactly when ``H_j = G*_j o L_j`` for some
``L_j`` in ``Phi o Psi^{-1}``. The candidate ``L_j = (G*_j)^{-1} o H_j`` is
unique, so each decidable class reduces to a membership test for this one
map. Membership is checked numerically in the space of ``H``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .construct import EmpiricalLatentCDF
from .model import LatentCDF, Transformed
from .transforms import FromCallables, Identity, Linear, Monotone

RATIONALIZABLE = "rationalizable"
NOT_RATIONALIZABLE = "not_rationalizable"
UNDECIDED = "undecided"

KNOWN_TAGS = ("all_increasing", "symmetric", "linear", "identical_across_j")
_RANK = {"linear": 0, "symmetric": 1, "all_increasing": 2}

TOL = 1e-8


@dataclass(frozen=True)
class TransformClass:
    """A class of strictly increasing bijections, described by tags.

    ``linear`` (``x -> b x``), ``symmetric`` (odd maps) and ``all_increasing``
    are nested in that order; ``identical_across_j`` forces one map for every
    group. Any other tag places the class outside the decidable fragment.
    """

    tags: frozenset

    @classmethod
    def of(cls, *tags: str) -> "TransformClass":
        if len(tags) == 1 and "+" in tags[0]:
            tags = tuple(tags[0].split("+"))
        return cls(frozenset(t.strip() for t in tags))

    @property
    def shape(self) -> str | None:
        shapes = [t for t in self.tags if t in _RANK]
        if not shapes:
            return "all_increasing"
        return min(shapes, key=_RANK.get)

    @property
    def identical(self) -> bool:
        return "identical_across_j" in self.tags

    @property
    def decidable(self) -> bool:
        return all(t in KNOWN_TAGS for t in self.tags)

    def compose(self, other: "TransformClass") -> "TransformClass":
        """Tags of ``self o other^{-1}``: the looser shape; identical only if both are."""
        shape = max(self.shape, other.shape, key=_RANK.get)
        tags = {shape}
        if self.identical and other.identical:
            tags.add("identical_across_j")
        extra = (self.tags | other.tags) - set(KNOWN_TAGS)
        return TransformClass(frozenset(tags | extra))


@dataclass(frozen=True, eq=False)
class LMap:
    """The candidate ``L = (G*)^{-1} o H`` on a grid, with its problem regions.

    ``flat_intervals`` are x-intervals inside the support where ``H`` is
    constant; ``atoms`` are jump points ``(x, size)``; ``support`` is the hull
    of ``{x : 0 < H(x) < 1}``.
    """

    x: np.ndarray
    values: np.ndarray
    support: tuple
    flat_intervals: tuple = ()
    atoms: tuple = ()
    undefined_intervals: tuple = ()

    def is_nondecreasing(self) -> bool:
        v = self.values[np.isfinite(self.values)]
        return bool(np.all(np.diff(v) >= -1e-12 * np.maximum(1.0, np.abs(v[:-1]))))


@dataclass(frozen=True, eq=False)
class RationalizeResult:
    status: str
    reason: str
    L: LMap | None = None
    phi: Monotone | None = None
    psi: Monotone | None = None
    b: float | None = None
    residual: float | None = None
    notes: dict = field(default_factory=dict)

    def records(self):
        out = [("status", self.status), ("reason", self.reason)]
        if self.b is not None:
            out.append(("b", self.b))
        if self.residual is not None:
            out.append(("residual", self.residual))
        out.extend(sorted(self.notes.items()))
        return out


def _check_grid(H: EmpiricalLatentCDF, n: int = 1000) -> np.ndarray:
    u = np.linspace(0.0, 1.0, n + 2)[1:-1]
    x = np.asarray(H.quantile(u), dtype=float)
    return np.unique(x[np.isfinite(x)])


def _left_cdf(H, x):
    g = H.group
    t = H._times(x)
    neg = g.p0 * g.F0.left_limit(t) if g.p0 > 0 else np.zeros_like(t)
    pos = 1.0 - g.p1 * g.F1.cdf(t) if g.p1 > 0 else np.ones_like(t)
    return np.clip(np.where(np.asarray(x) <= 0, neg, pos), 0.0, 1.0)


def _L_eval(gstar, H, x):
    """``(G*)^{-1}(H(x))``, via the survival side in the upper half for accuracy."""
    x = np.asarray(x, dtype=float)
    h = np.asarray(H.cdf(x), dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        lower = np.asarray(gstar.ppf(h), dtype=float)
        upper = np.asarray(gstar.isf(H.sf(x)), dtype=float)
    return np.where(h <= 0.5, lower, upper)


def compute_L(gstar: LatentCDF, H: EmpiricalLatentCDF, n: int = 1000) -> LMap:
    """``L = (G*)^{-1} o H`` on a quantile-spaced grid, with flats and atoms reported."""
    x = np.unique(np.r_[_check_grid(H, n), H.knots_x()])
    x = x[np.isfinite(x)]
    h = np.asarray(H.cdf(x), dtype=float)
    vals = _L_eval(gstar, H, x)
    lo, hi = H.support
    inside = (h > 1e-12) & (h < 1 - 1e-12)
    flats = []
    dh = np.diff(h)
    for k in np.flatnonzero((dh <= 0) & inside[:-1] & inside[1:]):
        flats.append((float(x[k]), float(x[k + 1])))
    flats = _merge(flats)
    jumps = np.asarray(H.cdf(x), dtype=float) - _left_cdf(H, x)
    atoms = tuple((float(x[k]), float(jumps[k])) for k in np.flatnonzero(jumps > 1e-12))
    undefined = []
    if np.isfinite(lo):
        undefined.append((-np.inf, float(lo)))
    if np.isfinite(hi):
        undefined.append((float(hi), np.inf))
    return LMap(x, vals, (lo, hi), tuple(flats), atoms, tuple(undefined))


def _merge(intervals):
    out = []
    for a, b in sorted(intervals):
        if out and a <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], b))
        else:
            out.append((a, b))
    return out


def _gstar_support(gstar):
    return float(gstar.ppf(0.0)), float(gstar.ppf(1.0))


def _witness_all(gstar: LatentCDF, H: EmpiricalLatentCDF) -> Monotone:
    """``L`` itself, bridged linearly (slope 1) beyond the support of ``H``."""
    lo, hi = H.support
    L_lo = float(gstar.ppf(0.0)) if np.isfinite(lo) else -np.inf
    L_hi = float(gstar.ppf(1.0)) if np.isfinite(hi) else np.inf

    def fn(x):
        x = np.asarray(x, dtype=float)
        out = _L_eval(gstar, H, x)
        if np.isfinite(lo):
            out = np.where(x <= lo, L_lo + (x - lo), out)
        if np.isfinite(hi):
            out = np.where(x >= hi, L_hi + (x - hi), out)
        return out

    def inv(y):
        y = np.asarray(y, dtype=float)
        out = np.asarray(H.quantile(np.clip(gstar.cdf(y), 0.0, 1.0)), dtype=float)
        if np.isfinite(lo):
            out = np.where(y <= L_lo, lo + (y - L_lo), out)
        if np.isfinite(hi):
            out = np.where(y >= L_hi, hi + (y - L_hi), out)
        return out

    return FromCallables(fn, inv)


def _residual(gstar, phi, H, x):
    return float(np.max(np.abs(gstar.cdf(phi(x)) - H.cdf(x)))) if x.size else 0.0


def _structural(gstar, H, L: LMap):
    """Reasons why no increasing bijection can work, or ``None``."""
    g_lo, g_hi = _gstar_support(gstar)
    lo, hi = H.support
    if (np.isfinite(lo) and not np.isfinite(g_lo)) or (np.isfinite(hi) and not np.isfinite(g_hi)):
        return "support mismatch: H reaches 0 or 1 at a finite value but the latent law does not"
    if (not np.isfinite(lo) and np.isfinite(g_lo)) or (not np.isfinite(hi) and np.isfinite(g_hi)):
        return "support mismatch: the latent law is bounded but H is not"
    if L.atoms:
        return f"H has an atom at x={L.atoms[0][0]:.6g}; a continuous latent law cannot produce it"
    if L.flat_intervals:
        a, b = L.flat_intervals[0]
        return f"H is flat on [{a:.6g}, {b:.6g}] inside its support"
    return None


def check_rationalizable(gstar: LatentCDF | Sequence[LatentCDF], H: EmpiricalLatentCDF | Sequence[EmpiricalLatentCDF],
                         phi_class: TransformClass, psi_class: TransformClass, tol: float = TOL) -> RationalizeResult:
    """Decide whether ``H`` (one group or a profile) is ``G* o L`` with ``L`` in ``Phi o Psi^{-1}``.

    The witness is ``phi = L`` (or ``x -> b x``) together with ``psi`` the
    identity, so inducing data from ``(G* o phi, c* o psi)`` reproduces ``H``.
    """
    Hs = list(H) if isinstance(H, (list, tuple)) else [H]
    gs = list(gstar) if isinstance(gstar, (list, tuple)) else [gstar] * len(Hs)
    if len(gs) != len(Hs):
        raise ValueError("one latent law per group")
    cls = phi_class.compose(psi_class)
    results = [_check_one(g, h, cls, tol) for g, h in zip(gs, Hs)]
    if len(results) == 1 and not cls.identical:
        return results[0]
    bad = [r for r in results if r.status == NOT_RATIONALIZABLE]
    if bad:
        return bad[0]
    if any(r.status == UNDECIDED for r in results):
        return RationalizeResult(UNDECIDED, "at least one group is outside the decidable fragment",
                                 notes={"groups": len(results)})
    if cls.identical:
        # one map for all groups: the first witness must fit every group
        phi = results[0].phi
        worst = 0.0
        for g, h in zip(gs, Hs):
            worst = max(worst, _residual(g, phi, h, _check_grid(h)))
        if worst > tol:
            return RationalizeResult(NOT_RATIONALIZABLE, "maps differ across groups", residual=worst)
        return RationalizeResult(RATIONALIZABLE, "one map fits all groups", results[0].L, phi, Identity(),
                                 results[0].b, worst)
    worst = max(r.residual or 0.0 for r in results)
    return RationalizeResult(RATIONALIZABLE, "every group fits", None, None, Identity(), None, worst,
                             notes={"witnesses": len(results)})


def _check_one(gstar, H, cls: TransformClass, tol) -> RationalizeResult:
    L = compute_L(gstar, H)
    why = _structural(gstar, H, L)
    if why is not None:
        return RationalizeResult(NOT_RATIONALIZABLE, why, L)
    if not cls.decidable:
        unknown = sorted(cls.tags - set(KNOWN_TAGS))
        return RationalizeResult(UNDECIDED, f"class tags {unknown} are outside the decidable fragment", L)
    x = _check_grid(H)
    shape = cls.shape
    if shape == "linear":
        # two-point solve through the quartiles, then verification on the grid
        u = np.array([0.25, 0.75])
        xs = np.asarray(H.quantile(u), dtype=float)
        ls = _L_eval(gstar, H, xs)
        if np.any(xs == 0) or abs(xs[1] - xs[0]) == 0:
            xs = np.asarray(H.quantile(np.array([0.1, 0.9])), dtype=float)
            ls = _L_eval(gstar, H, xs)
        b = float((ls[1] - ls[0]) / (xs[1] - xs[0]))
        if not b > 0:
            return RationalizeResult(NOT_RATIONALIZABLE, "no positive slope fits", L)
        phi = Linear(b)
        res = _residual(gstar, phi, H, x)
        if res > tol:
            return RationalizeResult(NOT_RATIONALIZABLE, f"L is not linear (residual {res:.3g})", L, b=b, residual=res)
        return RationalizeResult(RATIONALIZABLE, "L(x) = b x", L, phi, Identity(), b, res)
    phi = _witness_all(gstar, H)
    res = _residual(gstar, phi, H, x)
    if shape == "symmetric":
        # odd L: H(-x) must equal G*(-L(x))
        lx = phi(x)
        sym = float(np.max(np.abs(H.cdf(-x) - gstar.cdf(-lx)))) if x.size else 0.0
        if sym > tol:
            return RationalizeResult(NOT_RATIONALIZABLE, f"L is not odd (residual {sym:.3g})", L, residual=sym)
        res = max(res, sym)
        return RationalizeResult(RATIONALIZABLE, "L is odd and increasing", L, phi, Identity(), None, res)
    return RationalizeResult(RATIONALIZABLE, "L extends to an increasing bijection", L, phi, Identity(), None, res,
                             notes={"extension": "slope-1 linear bridges beyond the support of H"})


def reinduce(gstar: LatentCDF, result: RationalizeResult):
    """Latent law ``G* o phi`` of a rationalizable result's witness."""
    if result.status != RATIONALIZABLE or result.phi is None:
        raise ValueError("no witness to re-induce")
    return Transformed(gstar, result.phi)
