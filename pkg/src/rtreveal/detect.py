"""Detectors for properties of a single latent distribution.

Every detector states the class of chronometric functions it assumes and
returns a ``DetectionReport``. A weak verdict uses the non-strict form of the
detection inequalities; the strict verdict additionally requires a positive
margin away from the trivial endpoint ``t_lo``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .construct import MomentUndefined, build_boundary_cstar, build_H
from .ecdf import INTERP, InducedCDF, StepCDF
from .model import BoundaryTabulated, ChronometricFn, GroupData

DETECTED = "detected"
VIOLATION = "violation-detected"
INDETERMINATE = "indeterminate"

# slack below this magnitude is treated as exact equality
DEFAULT_TOL = 1e-12


@dataclass(frozen=True)
class DetectionReport:
    """Outcome of a detector.

    Attributes
    ----------
    property : str
        Name of the property examined.
    assumption : str
        Class of chronometric functions under which the verdict holds.
    verdict : str
        ``detected``, ``violation-detected`` or ``indeterminate`` (weak form).
    margin : float
        Signed minimum slack of the deciding inequalities; nonnegative iff the
        weak form holds.
    strict_verdict, strict_margin
        Same for the strict form.
    witnesses : tuple
        Times or latent values where the deciding inequality binds or fails.
    direction : str or None
        For sign and ranking detectors: ``positive``, ``negative`` or ``both``.
    notes : dict
        Detector-specific extras (flags, counts, intermediate values).
    """

    property: str
    assumption: str
    verdict: str
    margin: float
    strict_verdict: str = INDETERMINATE
    strict_margin: float = float("nan")
    witnesses: tuple = ()
    direction: str | None = None
    notes: dict = field(default_factory=dict)

    @property
    def detected(self) -> bool:
        return self.verdict == DETECTED

    def records(self) -> list[tuple[str, object]]:
        out = [("property", self.property), ("assumption", self.assumption), ("verdict", self.verdict),
               ("margin", self.margin), ("strict_verdict", self.strict_verdict),
               ("strict_margin", self.strict_margin)]
        if self.direction is not None:
            out.append(("direction", self.direction))
        if self.witnesses:
            out.append(("witnesses", ";".join(_fmt_witness(w) for w in self.witnesses)))
        out.extend((k, v) for k, v in sorted(self.notes.items()))
        return out


def _fmt_witness(w):
    if isinstance(w, tuple):
        return ":".join(repr(float(v)) if isinstance(v, (float, np.floating)) else str(v) for v in w)
    return repr(float(w))


# --------------------------------------------------------------------------
# shared machinery


def prepare(group: GroupData, mode: str | None = INTERP) -> GroupData:
    """Switch sample-based CDFs to the requested evaluation mode."""
    return group if mode is None else group.with_mode(mode)


def condition_grid(*groups: GroupData, extra=()) -> np.ndarray:
    """Merged response-time knots of ``groups`` plus the bound endpoints."""
    parts = [g.grid for g in groups] + [np.asarray(extra, dtype=float).ravel()]
    g = np.unique(np.concatenate(parts))
    return g[np.isfinite(g)]


def snap(x: float, tol: float) -> float:
    return 0.0 if abs(x) <= tol else float(x)


@dataclass(frozen=True)
class Slack:
    """Pointwise slack of a family of inequalities ``lhs <= rhs`` on a time grid."""

    t: np.ndarray
    values: tuple  # one array per inequality, rhs - lhs
    names: tuple
    scales: tuple | None = None  # max(|lhs|, |rhs|) per inequality, for the strict form

    def margin(self, tol: float) -> float:
        return snap(min(float(v.min()) for v in self.values), tol)

    def strict_margin(self, t_lo: float, tol: float) -> float:
        """Smallest relative slack over ``t > t_lo``, ignoring points where both sides vanish.

        Relative slack keeps strictness visible in tails where both sides are tiny.
        """
        mask = self.t > t_lo
        scales = self.scales or tuple(np.ones_like(v) for v in self.values)
        rel = []
        for v, s in zip(self.values, scales):
            keep = mask & (s > 0)
            if keep.any():
                rel.append(float((v[keep] / s[keep]).min()))
        if not rel:
            return float("nan")
        return snap(min(rel), 1e-9)

    def failures(self, tol: float, k: int = 5) -> tuple:
        out = []
        for name, v in zip(self.names, self.values):
            for idx in np.argsort(v)[:k]:
                if v[idx] < -tol:
                    out.append((name, float(self.t[idx]), float(v[idx])))
        out.sort(key=lambda w: w[2])
        return tuple(out[:k])

    def binding(self, k: int = 3) -> tuple:
        out = []
        for name, v in zip(self.names, self.values):
            idx = int(np.argmin(v))
            out.append((name, float(self.t[idx]), float(v[idx])))
        out.sort(key=lambda w: w[2])
        return tuple(out[:k])


def judge(prop: str, assumption: str, slack: Slack, t_lo: float, two_sided: bool, tol: float,
          strict_tol: float, direction: str | None = None, notes: dict | None = None) -> DetectionReport:
    """Turn a ``Slack`` into a report with sufficient-only or two-sided semantics."""
    m = slack.margin(tol)
    sm = slack.strict_margin(t_lo, tol)
    if m >= 0:
        verdict = DETECTED
    else:
        verdict = VIOLATION if two_sided else INDETERMINATE
    if sm > strict_tol:
        strict = DETECTED
    elif two_sided and verdict == VIOLATION:
        strict = VIOLATION
    else:
        strict = INDETERMINATE
    wit = slack.failures(tol) if m < 0 else slack.binding()
    return DetectionReport(prop, assumption, verdict, m, strict, sm, wit, direction, dict(notes or {}))


def sub(group: GroupData, i: int, t) -> np.ndarray:
    return np.asarray(group.sub(i, t), dtype=float)


# --------------------------------------------------------------------------
# full support


def _strictly_increasing(F, p, bounds, grid):
    """Flat stretches of ``F`` on ``[t_lo, t_hi]`` (empty when strictly increasing)."""
    if p <= 0:
        return [(bounds.t_lo, bounds.t_hi)]
    if isinstance(F, StepCDF):
        return F.with_mode(INTERP).flat_intervals(bounds.t_hi)
    vals = np.asarray(F.cdf(grid), dtype=float)
    flat = np.flatnonzero(np.diff(vals) <= 0)
    if isinstance(F, InducedCDF):
        # zeros of an unbounded latent law near t_lo are floating-point underflow
        edge = F.latent.ppf(0.0) if F.branch == 0 else F.latent.ppf(1.0)
        if np.isinf(edge):
            flat = flat[vals[flat + 1] > 0]
    return [(float(grid[k]), float(grid[k + 1])) for k in flat]


def detect_full_support(group: GroupData, family: str = "asymptotic") -> DetectionReport:
    """Full support of the latent distribution.

    ``asymptotic`` assumes representatives that approach ``t_lo`` only in the
    limit; ``capped`` assumes they reach it (so the support is bounded);
    ``union`` allows both.
    """
    if family not in ("asymptotic", "capped", "union"):
        raise ValueError("family must be asymptotic, capped or union")
    b = group.bounds
    grid = condition_grid(group)
    flats = []
    for i in (0, 1):
        flats += [(i, a, z) for a, z in _strictly_increasing(group.F(i), group.p(i), b, grid)]
    holds = not flats
    notes = {"flat_intervals": len(flats)}
    if family == "capped":
        return DetectionReport("full_support", "capped", VIOLATION, -1.0, VIOLATION, -1.0,
                               ((0, float(b.t_lo)),), notes=notes)
    margin = 0.0 if holds else -max(z - a for _, a, z in flats)
    if family == "asymptotic":
        verdict = DETECTED if holds else VIOLATION
    else:
        verdict = INDETERMINATE if holds else VIOLATION
    return DetectionReport("full_support", family, verdict, margin, verdict, margin, tuple(flats[:5]), notes=notes)


# --------------------------------------------------------------------------
# sign of the mean


def _sign_report(prop, assumption, pos: Slack, neg: Slack, t_lo, tol, strict_tol, notes):
    rp = judge(prop, assumption, pos, t_lo, False, tol, strict_tol)
    rn = judge(prop, assumption, neg, t_lo, False, tol, strict_tol)
    if rp.detected and rn.detected:
        direction, base = "both", rp
    elif rp.detected:
        direction, base = "positive", rp
    elif rn.detected:
        direction, base = "negative", rn
    else:
        direction = None
        base = rp if rp.margin >= rn.margin else rn
    strict_dir = [d for d, r in (("positive", rp), ("negative", rn)) if r.strict_verdict == DETECTED]
    notes = dict(notes, strict_direction=strict_dir[0] if strict_dir else "none")
    return DetectionReport(prop, assumption, base.verdict, base.margin, base.strict_verdict,
                           base.strict_margin, base.witnesses, direction, notes)


def detect_mean_sign(group: GroupData, mode: str = "symmetric", m=None, cstar: ChronometricFn | None = None,
                     strict_tol: float = 0.0, tol: float = DEFAULT_TOL, eval_mode: str | None = INTERP) -> DetectionReport:
    """Sign of the latent mean.

    ``symmetric``: positive if ``p0 F0(t) <= p1 F1(t)`` for all t (and the
    mirrored check for negative). ``asymmetric``: the same with ``m(t)`` on the
    response-1 side. ``linear``: the sign of the mean of ``H`` under ``cstar``.
    The inequality modes are sufficient conditions, so failing them gives
    ``indeterminate``.
    """
    g = prepare(group, eval_mode)
    notes = {"degenerate": g.degenerate[0] or g.degenerate[1]}
    if mode == "linear":
        if cstar is None:
            raise ValueError("linear mode needs cstar")
        H = build_H(g, cstar)
        try:
            mu = H.mean()
        except MomentUndefined as exc:
            return DetectionReport("mean_sign", "linear symmetric", INDETERMINATE, float("nan"),
                                   notes=dict(notes, reason=str(exc)))
        mu = snap(mu, 1e-9)
        direction = "positive" if mu > 0 else "negative" if mu < 0 else "both"
        strict = DETECTED if abs(mu) > strict_tol else INDETERMINATE
        return DetectionReport("mean_sign", "linear symmetric", DETECTED, abs(mu), strict, abs(mu),
                               (mu,), direction, dict(notes, mean=mu))
    if mode == "symmetric":
        t = condition_grid(g)
        a, bvals = sub(g, 0, t), sub(g, 1, t)
        assumption = "symmetric"
    elif mode == "asymmetric":
        if m is None:
            raise ValueError("asymmetric mode needs the time map m")
        t = condition_grid(g, extra=m.inverse(g.grid))
        a, bvals = sub(g, 0, t), sub(g, 1, m(t))
        assumption = "asymmetric (known m)"
    else:
        raise ValueError("mode must be symmetric, asymmetric or linear")
    scale = (np.maximum(np.abs(a), np.abs(bvals)),)
    pos = Slack(t, (bvals - a,), ("p0F0<=p1F1",), scale)
    neg = Slack(t, (a - bvals,), ("p1F1<=p0F0",), scale)
    return _sign_report("mean_sign", assumption, pos, neg, g.bounds.t_lo, tol, strict_tol, notes)


def median_sign(group: GroupData) -> int:
    """Sign of the latent median: ``sign(p1 - p0)``."""
    d = group.p1 - group.p0
    return 0 if abs(d) <= 1e-12 else (1 if d > 0 else -1)


# --------------------------------------------------------------------------
# unimodality


def _slope_changes(x, y):
    keep = np.isfinite(x) & np.isfinite(y)
    x, y = x[keep], y[keep]
    order = np.argsort(x)
    x, y = x[order], y[order]
    dx = np.diff(x)
    ok = dx > 0
    slopes = np.diff(y)[ok] / dx[ok]
    xm = 0.5 * (x[1:] + x[:-1])[ok]
    if slopes.size < 2:
        return np.empty(0), np.empty(0)
    scale = max(1.0, float(np.max(np.abs(slopes))))
    return 0.5 * (xm[1:] + xm[:-1]), np.diff(slopes) / scale


def detect_unimodality(group: GroupData, cstar: ChronometricFn, n: int = 512, tol: float = 1e-8,
                       strict_tol: float = 0.0) -> DetectionReport:
    """Unimodality (mode at zero) of the latent distribution relative to the boundary representative.

    With ``b`` the boundary representative built from the data, the
    distribution under ``cstar`` is the piecewise-uniform boundary law
    composed with ``psi = b^{-1} o cstar``. It is unimodal when ``psi`` is
    convex on the negative branch and concave on the positive branch.
    """
    g = prepare(group, INTERP)
    b = build_boundary_cstar(g)
    # a tabulated cstar is compared with the equally tabulated boundary inverse
    tabulated = isinstance(cstar, BoundaryTabulated)
    lo, hi = g.bounds.t_lo, g.bounds.t_hi
    conv_neg, conc_pos = [], []
    wit = []
    for branch in (0, 1):
        if g.p(branch) <= 0:
            continue
        F = g.F(branch)
        a = max(lo, F.support_lo())
        z = min(hi, F.support_hi())
        ts = np.linspace(a, z, n + 1)
        if cstar.asymptotic:
            ts = ts[ts > cstar.bounds.t_lo]
        x = np.asarray(cstar.inverse(branch, ts), dtype=float)
        if tabulated:
            y = np.asarray(b.inverse(branch, ts), dtype=float)
        else:
            # exact inverse of the boundary representative: F0(t) - 1 and 1 - F1(t)
            Ft = np.asarray(F.cdf(ts), dtype=float)
            y = Ft - 1.0 if branch == 0 else 1.0 - Ft
        xm, d2 = _slope_changes(x, y)
        if d2.size == 0:
            continue
        # negative branch wants convex psi (d2 >= 0); positive wants concave (d2 <= 0)
        signed = d2 if branch == 0 else -d2
        (conv_neg if branch == 0 else conc_pos).append(signed)
        worst = np.argsort(signed)[:3]
        wit += [(branch, float(xm[k]), float(signed[k])) for k in worst]
    parts = conv_neg + conc_pos
    if not parts:
        return DetectionReport("unimodality", "relative to boundary representative", INDETERMINATE, float("nan"))
    allv = np.concatenate(parts)
    uni = float(allv.min())
    anti = float((-allv).min())
    margin = snap(uni, tol)
    if margin >= 0:
        verdict = DETECTED
    elif snap(anti, tol) >= 0:
        verdict = VIOLATION
    else:
        verdict = INDETERMINATE
    strict = DETECTED if uni > max(tol, strict_tol) else (VIOLATION if anti > max(tol, strict_tol) else INDETERMINATE)
    wit.sort(key=lambda w: w[2])
    return DetectionReport("unimodality", "relative to boundary representative", verdict, margin, strict,
                           uni, tuple(wit[:5]), notes={"anti_margin": snap(anti, tol)})


__all__ = [
    "DETECTED", "VIOLATION", "INDETERMINATE", "DetectionReport", "Slack", "condition_grid",
    "detect_full_support", "detect_mean_sign", "median_sign", "detect_unimodality", "judge", "prepare",
]
