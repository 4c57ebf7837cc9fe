"""Detectors comparing two or more latent distributions.

Dominance orders are checked on the merged time grid of both groups. The
orders that are invariant to any common increasing transformation (FOSD,
likelihood ratio, hazard rates, single crossing) are evaluated on the
"virtual" latent axis: negative-branch times ascending, the point zero, then
positive-branch times descending, where group ``j`` has value
``p0 F0(t)`` on the first half and ``1 - p1 F1(t)`` on the second.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .construct import EmpiricalLatentCDF, MomentUndefined, build_H
from .detect import (DEFAULT_TOL, DETECTED, INDETERMINATE, VIOLATION, DetectionReport, Slack,
                     condition_grid, judge, prepare, snap, sub)
from .ecdf import INTERP, StepCDF
from .model import ChronometricFn, GroupData


@dataclass(frozen=True, eq=False)
class GroupProfile:
    """Groups indexed by ``j`` with an optional discrete index distribution ``Gamma``.

    ``values`` are the numeric index values used by correlation measures;
    they default to ``0, 1, ..., J-1``.
    """

    labels: tuple
    groups: tuple
    weights: tuple | None = None
    values: tuple | None = None

    def __post_init__(self):
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("labels must be unique")
        if len(self.labels) != len(self.groups):
            raise ValueError("one label per group")
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)
            if w.size != len(self.groups) or np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
                raise ValueError("index weights must be nonnegative and sum to 1")
        if self.values is not None and len(self.values) != len(self.groups):
            raise ValueError("one index value per group")

    @property
    def index_values(self) -> np.ndarray:
        return np.arange(len(self.groups), dtype=float) if self.values is None else np.asarray(self.values, float)


def _pair_grid(g1, g2):
    return condition_grid(g1, g2)


def _t_lo(g1, g2):
    return min(g1.bounds.t_lo, g2.bounds.t_lo)


def _scale(*arrs):
    return np.maximum.reduce([np.abs(a) for a in arrs])


# --------------------------------------------------------------------------
# FOSD and mean rankings


def _fosd_slack(g1, g2):
    t = _pair_grid(g1, g2)
    a1, a2 = sub(g1, 0, t), sub(g2, 0, t)
    b1, b2 = sub(g1, 1, t), sub(g2, 1, t)
    return Slack(t, (a2 - a1, b1 - b2), ("p0F0_1<=p0F0_2", "p1F1_2<=p1F1_1"),
                 (_scale(a1, a2), _scale(b1, b2)))


def detect_fosd(g1: GroupData, g2: GroupData, tol: float = DEFAULT_TOL, strict_tol: float = 0.0,
                eval_mode: str | None = INTERP) -> DetectionReport:
    """First-order stochastic dominance of ``G1`` over ``G2``.

    Detected when ``p0_1 F0_1 - p0_2 F0_2 <= 0 <= p1_1 F1_1 - p1_2 F1_2`` on the
    grid, and a violation otherwise. Valid for any chronometric functions that
    are identical across the two groups.
    """
    g1, g2 = prepare(g1, eval_mode), prepare(g2, eval_mode)
    return judge("fosd", "identical across groups", _fosd_slack(g1, g2), _t_lo(g1, g2), True, tol, strict_tol)


def detect_mean_ranking(g1: GroupData, g2: GroupData, method: str = "asymmetry",
                        cstar: ChronometricFn | None = None, tol: float = DEFAULT_TOL,
                        strict_tol: float = 0.0, eval_mode: str | None = INTERP) -> DetectionReport:
    """Whether the mean of ``G1`` is at least the mean of ``G2``.

    Methods
    -------
    fosd
        The FOSD condition (identical representatives across groups).
    sign_split
        ``p1_2 F1_2 - p0_2 F0_2 <= 0 <= p1_1 F1_1 - p0_1 F0_1`` (symmetric
        representatives, possibly differing across groups).
    asymmetry
        ``p0_1 F0_1 - p0_2 F0_2 <= p1_1 F1_1 - p1_2 F1_2`` (symmetric and
        identical across groups).
    linear
        Compare the means of ``H1`` and ``H2`` under ``cstar``; two-sided.

    The first three are sufficient conditions: failing them is indeterminate.
    """
    g1, g2 = prepare(g1, eval_mode), prepare(g2, eval_mode)
    t_lo = _t_lo(g1, g2)
    if method == "fosd":
        return judge("mean_ranking", "identical across groups (fosd)", _fosd_slack(g1, g2), t_lo, False,
                     tol, strict_tol)
    if method == "linear":
        if cstar is None:
            raise ValueError("linear method needs cstar")
        try:
            m1, m2 = build_H(g1, cstar).mean(), build_H(g2, cstar).mean()
        except MomentUndefined as exc:
            return DetectionReport("mean_ranking", "linear, identical across groups", INDETERMINATE,
                                   float("nan"), notes={"reason": str(exc)})
        gap = snap(m1 - m2, 1e-9)
        verdict = DETECTED if gap >= 0 else VIOLATION
        strict = DETECTED if gap > strict_tol else VIOLATION if gap < 0 else INDETERMINATE
        return DetectionReport("mean_ranking", "linear, identical across groups", verdict, gap, strict, gap,
                               (m1, m2), notes={"mean_1": m1, "mean_2": m2})
    t = _pair_grid(g1, g2)
    a1, a2 = sub(g1, 0, t), sub(g2, 0, t)
    b1, b2 = sub(g1, 1, t), sub(g2, 1, t)
    if method == "sign_split":
        slack = Slack(t, (a2 - b2, b1 - a1), ("p1F1_2<=p0F0_2", "p0F0_1<=p1F1_1"),
                      (_scale(a2, b2), _scale(a1, b1)))
        assumption = "symmetric"
    elif method == "asymmetry":
        lhs, rhs = a1 - a2, b1 - b2
        slack = Slack(t, (rhs - lhs,), ("avcond",), (_scale(lhs, rhs),))
        assumption = "symmetric, identical across groups"
    else:
        raise ValueError("method must be fosd, sign_split, asymmetry or linear")
    return judge("mean_ranking", assumption, slack, t_lo, False, tol, strict_tol)


# --------------------------------------------------------------------------
# orders evaluated on the virtual latent axis


def virtual_axis(g1: GroupData, g2: GroupData, t=None):
    """Values of both groups' latent CDFs along the common virtual axis.

    Returns ``(labels, h1, h2)`` where ``labels`` holds ``(branch, t)`` pairs
    (branch 0 ascending in t, then ``("zero", 0.0)``, then branch 1
    descending in t).
    """
    if t is None:
        t = _pair_grid(g1, g2)
    t = np.asarray(t, dtype=float)
    t1 = t[::-1]
    h1 = np.r_[sub(g1, 0, t), g1.p0, 1.0 - sub(g1, 1, t1)]
    h2 = np.r_[sub(g2, 0, t), g2.p0, 1.0 - sub(g2, 1, t1)]
    labels = [(0, float(v)) for v in t] + [("zero", 0.0)] + [(1, float(v)) for v in t1]
    # clip rounding excursions outside [0, 1]
    return labels, np.clip(h1, 0.0, 1.0), np.clip(h2, 0.0, 1.0)


def _thin(t, n):
    if t.size <= n:
        return t
    idx = np.unique(np.round(np.linspace(0, t.size - 1, n)).astype(int))
    return t[idx]


def _lr_triples(h1, h2):
    """Minimum slack of the triple inequality over all ``i < j < k``."""
    n = h1.size
    worst = np.inf
    where = None
    for j in range(1, n - 1):
        i = np.arange(j)[:, None]
        k = np.arange(j + 1, n)[None, :]
        lhs = (h1[k] - h1[i]) * (h2[k] - h2[j])
        rhs = (h1[k] - h1[j]) * (h2[k] - h2[i])
        s = rhs - lhs
        m = s.min()
        if m < worst:
            worst = float(m)
            ii, kk = np.unravel_index(np.argmin(s), s.shape)
            where = (int(ii), j, int(kk + j + 1))
    return worst, where


def _density(g: GroupData, i: int, t, bandwidth):
    F = g.F(i)
    if isinstance(F, StepCDF):
        # the weighted sample behind the step function
        w = np.diff(np.r_[0.0, F.cum])
        if F.points.size < 2:
            raise ValueError("density form needs at least two distinct response times per branch; use the cdf form")
        kde = stats.gaussian_kde(F.points, bw_method=bandwidth, weights=w)
        return kde(t)
    lo, hi = F.t_lo, F.t_hi
    h = 1e-6 * max(1.0, hi - lo if np.isfinite(hi) else 1.0)
    a = np.clip(t - h, lo, hi)
    b = np.clip(t + h, lo, hi)
    return (np.asarray(F.cdf(b)) - np.asarray(F.cdf(a))) / (b - a)


def detect_lr_dominance(g1: GroupData, g2: GroupData, form: str = "cdf_inequality", bandwidth="silverman",
                        tol: float = DEFAULT_TOL, max_points: int = 64, eval_mode: str | None = INTERP) -> DetectionReport:
    """Likelihood-ratio dominance of ``G1`` over ``G2``; two-sided.

    ``cdf_inequality`` checks the triple inequality on a thinned grid of at
    most ``max_points`` times per branch. ``density_ratio`` checks that
    ``p0_1 f0_1 / p0_2 f0_2`` is nondecreasing and ``p1_1 f1_1 / p1_2 f1_2``
    nonincreasing in ``t``, and that the first is at most the second at ``t_hi``.
    """
    g1, g2 = prepare(g1, eval_mode), prepare(g2, eval_mode)
    assumption = "identical across groups"
    if form == "cdf_inequality":
        t = _thin(_pair_grid(g1, g2), max_points)
        labels, h1, h2 = virtual_axis(g1, g2, t)
        worst, where = _lr_triples(h1, h2)
        m = snap(worst, tol)
        verdict = DETECTED if m >= 0 else VIOLATION
        wit = tuple(labels[k] for k in where) if where is not None else ()
        return DetectionReport("lr_dominance", assumption, verdict, m, verdict, m, wit,
                               notes={"form": form, "points": int(h1.size)})
    if form != "density_ratio":
        raise ValueError("form must be cdf_inequality or density_ratio")
    if min(g1.p0, g1.p1, g2.p0, g2.p1) <= 0:
        raise ValueError("density form needs both responses in both groups; use the cdf form")
    t = _pair_grid(g1, g2)
    hi = min(g1.bounds.t_hi, g2.bounds.t_hi)
    t = t[(t > max(g1.bounds.t_lo, g2.bounds.t_lo)) & (t <= hi)]
    floor = 1e-300
    ratios = []
    for i in (0, 1):
        f1 = np.maximum(_density(g1, i, t, bandwidth), floor)
        f2 = np.maximum(_density(g2, i, t, bandwidth), floor)
        ratios.append(g1.p(i) * f1 / (g2.p(i) * f2))
    r0, r1 = ratios
    # relative changes so that the check is scale free
    d0 = np.diff(r0) / np.maximum(np.abs(r0[:-1]), floor)
    d1 = -np.diff(r1) / np.maximum(np.abs(r1[:-1]), floor)
    end = (r1[-1] - r0[-1]) / max(abs(r0[-1]), abs(r1[-1]), floor)
    slack_vals = np.r_[d0, d1, end]
    m = snap(float(slack_vals.min()), max(tol, 1e-9))
    verdict = DETECTED if m >= 0 else VIOLATION
    k = int(np.argmin(slack_vals))
    nd = d0.size
    if k < nd:
        wit = ((0, float(t[k + 1])),)
    elif k < 2 * nd:
        wit = ((1, float(t[k - nd + 1])),)
    else:
        wit = (("t_hi", float(t[-1])),)
    return DetectionReport("lr_dominance", assumption, verdict, m, verdict, m, wit,
                           notes={"form": form, "bandwidth": str(bandwidth)})


def detect_hazard_dominance(g1: GroupData, g2: GroupData, reversed: bool = False, tol: float = DEFAULT_TOL,
                            eval_mode: str | None = INTERP) -> DetectionReport:
    """Hazard-rate (or reversed hazard-rate) dominance of ``G1`` over ``G2``; two-sided.

    Hazard: ``(1 - H1) / (1 - H2)`` nondecreasing. Reversed: ``H1 / H2``
    nondecreasing. Checked by cross products on the virtual axis, restricted to
    points where the denominator is positive.
    """
    g1, g2 = prepare(g1, eval_mode), prepare(g2, eval_mode)
    labels, h1, h2 = virtual_axis(g1, g2)
    if reversed:
        a, b = h1, h2
        prop = "reversed_hazard_dominance"
    else:
        a, b = 1.0 - h1, 1.0 - h2
        prop = "hazard_dominance"
    keep = np.flatnonzero(b > 0)
    if keep.size < 2:
        return DetectionReport(prop, "identical across groups", DETECTED, 0.0, INDETERMINATE, float("nan"))
    a, b = a[keep], b[keep]
    # a[k+1] / b[k+1] >= a[k] / b[k]
    s = a[1:] * b[:-1] - a[:-1] * b[1:]
    m = snap(float(s.min()), tol)
    verdict = DETECTED if m >= 0 else VIOLATION
    k = int(np.argmin(s))
    return DetectionReport(prop, "identical across groups", verdict, m, verdict, m,
                           (labels[keep[k + 1]],), notes={"points": int(keep.size)})


def crossing_counts(d: np.ndarray, tol: float) -> int:
    """Sign changes of ``d`` after censoring the dead band ``|d| <= tol``."""
    s = np.sign(np.where(np.abs(d) <= tol, 0.0, d))
    s = s[s != 0]
    return int(np.count_nonzero(np.diff(s)))


def detect_single_crossing(g1: GroupData, g2: GroupData, cross_tol: float = 1e-12,
                           eval_mode: str | None = INTERP) -> DetectionReport:
    """Single-crossing dominance of ``G1`` over ``G2``: ``H1 - H2`` is nonpositive then nonnegative."""
    g1, g2 = prepare(g1, eval_mode), prepare(g2, eval_mode)
    t = _pair_grid(g1, g2)
    d0 = sub(g1, 0, t) - sub(g2, 0, t)
    d1 = sub(g2, 1, t) - sub(g1, 1, t)  # H1 - H2 on the positive branch
    c0, c1 = crossing_counts(d0, cross_tol), crossing_counts(d1, cross_tol)
    labels, h1, h2 = virtual_axis(g1, g2, t)
    d = h1 - h2
    s = np.sign(np.where(np.abs(d) <= cross_tol, 0.0, d))
    nz = np.flatnonzero(s)
    # allowed pattern: (-)* then (+)*
    ok = True
    bad = None
    if nz.size:
        seq = s[nz]
        first_pos = np.argmax(seq > 0) if np.any(seq > 0) else seq.size
        late_neg = np.flatnonzero(seq[first_pos:] < 0)
        if late_neg.size:
            ok = False
            bad = labels[nz[first_pos + late_neg[0]]]
    mag = float(np.max(np.abs(d))) if d.size else 0.0
    verdict = DETECTED if ok else VIOLATION
    notes = {"crossings_branch0": c0, "crossings_branch1": c1, "total_crossings": crossing_counts(d, cross_tol)}
    if g1.sampled or g2.sampled:
        notes["advisory"] = "single crossing need not survive aggregation of noise"
    return DetectionReport("single_crossing", "identical across groups", verdict, 0.0 if ok else -mag,
                           verdict, 0.0 if ok else -mag, (bad,) if bad else (), notes=notes)


# --------------------------------------------------------------------------
# Lorenz and second-order dominance


def lorenz_dominance(H1: EmpiricalLatentCDF, H2: EmpiricalLatentCDF, n: int = 512,
                     tol: float = 1e-9) -> DetectionReport:
    """``L(q, H1) >= L(q, H2)`` on an ``n``-point grid of ``q``; two-sided."""
    q = np.linspace(0.0, 1.0, n)
    l1, l2 = lorenz_curve(H1, q), lorenz_curve(H2, q)
    s = l1 - l2
    m = snap(float(s.min()), tol)
    verdict = DETECTED if m >= 0 else VIOLATION
    k = int(np.argmin(s))
    return DetectionReport("lorenz_dominance", "linear, identical across groups", verdict, m, verdict, m,
                           (float(q[k]),))


def lorenz_curve(H: EmpiricalLatentCDF, q) -> np.ndarray:
    """Lorenz curve on a sorted grid, integrating successive segments once."""
    q = np.asarray(q, dtype=float)
    mu = H._lorenz_denominator()
    order = np.argsort(q)
    qs = q[order]
    f = lambda x, u: x  # noqa: E731
    seg = np.array([H._integrate(f, a, b) if b > a else 0.0 for a, b in zip(np.r_[0.0, qs[:-1]], qs)])
    out = np.empty_like(qs)
    out[order] = np.cumsum(seg) / mu
    out = np.where(q <= 0, 0.0, np.where(q >= 1, 1.0, out))
    return out


def detect_sosd(g1: GroupData, g2: GroupData, route: str = "single_crossing", cstar: ChronometricFn | None = None,
                mean_method: str = "asymmetry", cross_tol: float = 1e-12) -> DetectionReport:
    """Second-order stochastic dominance via Lorenz or single-crossing dominance plus a mean ranking.

    Detected only when both parts are detected; otherwise indeterminate.
    """
    if route == "lorenz":
        if cstar is None:
            raise ValueError("the Lorenz route needs cstar")
        try:
            part = lorenz_dominance(build_H(prepare(g1), cstar), build_H(prepare(g2), cstar))
        except MomentUndefined as exc:
            return DetectionReport("sosd", "route=lorenz", INDETERMINATE, float("nan"), notes={"reason": str(exc)})
    elif route == "single_crossing":
        part = detect_single_crossing(g1, g2, cross_tol)
    else:
        raise ValueError("route must be lorenz or single_crossing")
    rank = detect_mean_ranking(g1, g2, mean_method, cstar=cstar)
    both = part.detected and rank.detected
    margin = min(part.margin, rank.margin) if both else float("nan")
    return DetectionReport("sosd", f"route={route}, mean={mean_method}", DETECTED if both else INDETERMINATE,
                           margin, INDETERMINATE, float("nan"), part.witnesses + rank.witnesses,
                           notes={"route_verdict": part.verdict, "mean_verdict": rank.verdict})


# --------------------------------------------------------------------------
# out-of-sample preference


def theta_percentile(group: GroupData, chosen: int) -> float:
    """Time ``theta`` with ``F_chosen(theta) = 1 / (2 p_chosen)`` (interpolated quantile)."""
    p = group.p(chosen)
    if not p > 0.5:
        raise ValueError(f"p of response {chosen} is {p:.4g} <= 1/2; use the other response as 'chosen'")
    F = group.F(chosen).with_mode(INTERP)
    return float(F.quantile(1.0 / (2.0 * p)))


def oos_preference(g_xz: GroupData, g_yz: GroupData, mode: str = "median_theta", m=None,
                   tol: float = DEFAULT_TOL, eval_mode: str | None = INTERP) -> DetectionReport:
    """Revealed preference ``u(y) <= u(x)`` from choices of x over z and y over z.

    In both groups response 1 is the choice of x (resp. y) and response 0 the
    choice of z. The inequality modes are sufficient conditions; the median
    modes compare the medians of the latent utility differences and are
    two-sided.
    """
    if mode == "fosd_cond":
        r = detect_mean_ranking(g_xz, g_yz, "fosd", tol=tol, eval_mode=eval_mode)
    elif mode == "sign_cond":
        r = detect_mean_ranking(g_xz, g_yz, "sign_split", tol=tol, eval_mode=eval_mode)
    elif mode == "asym_cond":
        r = detect_mean_ranking(g_xz, g_yz, "asymmetry", tol=tol, eval_mode=eval_mode)
    elif mode in ("median_theta", "median_theta_asym"):
        return _median_theta(g_xz, g_yz, m if mode == "median_theta_asym" else None, tol, mode)
    else:
        raise ValueError("unknown mode")
    return DetectionReport("oos_preference", r.assumption, r.verdict, r.margin, r.strict_verdict,
                           r.strict_margin, r.witnesses, notes=dict(r.notes, mode=mode))


def _median_theta(g_xz, g_yz, m, tol, mode):
    if m is None and mode == "median_theta_asym":
        raise ValueError("median_theta_asym needs the time map m")
    if g_xz.p1 > 0.5 and g_yz.p1 > 0.5:
        side = 1
    elif g_xz.p0 > 0.5 and g_yz.p0 > 0.5:
        side = 0
    else:
        raise ValueError("choice shares lie on different sides of 1/2 (or at 1/2); use mode='sign_cond'")
    th_x = theta_percentile(g_xz, side)
    th_y = theta_percentile(g_yz, side)
    if m is not None:
        th_y = float(m.inverse(th_y))
    # chosen-option branch: faster x-choices reveal the preference; z-branch reverses it
    gap = th_y - th_x if side == 1 else th_x - th_y
    gap = snap(gap, tol)
    verdict = DETECTED if gap >= 0 else VIOLATION
    strict = DETECTED if gap > 0 else VIOLATION if gap < 0 else INDETERMINATE
    return DetectionReport("oos_preference", "identical across problems" if m is None else "known time map m",
                           verdict, gap, strict, gap, (th_x, th_y),
                           notes={"mode": mode, "theta_xz": th_x, "theta_yz": th_y, "branch": side})


# --------------------------------------------------------------------------
# correlations


def correlation(profile: GroupProfile, cstar: ChronometricFn, kind: str = "spearman",
                eval_mode: str | None = INTERP) -> float | None:
    """Correlation between the index ``j`` and the latent value ``x``.

    The joint law draws ``j`` from the index weights and ``x`` from ``H_j``.
    Returns ``None`` when a Pearson coefficient needs a moment that does not
    exist.
    """
    if profile.weights is None:
        raise ValueError("correlation needs index weights")
    w = np.asarray(profile.weights, dtype=float)
    js = profile.index_values
    Hs = [build_H(prepare(g, eval_mode), cstar) for g in profile.groups]
    if kind == "pearson":
        return _pearson(Hs, w, js)
    if kind == "spearman":
        return _spearman(Hs, w, js)
    if kind == "kendall":
        return _kendall(Hs, w, js)
    raise ValueError("kind must be pearson, spearman or kendall")


def _clip_corr(r):
    return float(np.clip(r, -1.0, 1.0))


def _pearson(Hs, w, js):
    try:
        mus = np.array([H.mean() for H in Hs])
        m2 = np.array([H.moment(2) for H in Hs])
    except MomentUndefined:
        return None
    ex = w @ mus
    vx = w @ m2 - ex ** 2
    ej = w @ js
    vj = w @ js ** 2 - ej ** 2
    cov = w @ (js * mus) - ej * ex
    if vx <= 0 or vj <= 0:
        return 0.0
    return _clip_corr(cov / np.sqrt(vx * vj))


def _marginal(Hs, w):
    def G(x):
        return sum(wk * H.cdf(x) for wk, H in zip(w, Hs))
    return G


def _spearman(Hs, w, js):
    G = _marginal(Hs, w)
    order = np.argsort(js, kind="stable")
    gamma = np.empty_like(w)
    # Gamma(j): cumulative index weight, ties in j share the upper value
    cum = np.cumsum(w[order])
    sorted_js = js[order]
    for pos, k in enumerate(order):
        last = np.searchsorted(sorted_js, sorted_js[pos], side="right") - 1
        gamma[k] = cum[last]
    e1 = np.array([H._integrate(lambda q, u: G(q)) for H in Hs])
    e2 = np.array([H._integrate(lambda q, u: G(q) ** 2) for H in Hs])
    eg = w @ e1
    vg = w @ e2 - eg ** 2
    eG = w @ gamma
    vG = w @ gamma ** 2 - eG ** 2
    cov = w @ (gamma * e1) - eg * eG
    if vg <= 1e-15 or vG <= 1e-15:
        return 0.0
    return _clip_corr(cov / np.sqrt(vg * vG))


def _left_cdf(H: EmpiricalLatentCDF, x):
    """``H(x-)``."""
    x = np.asarray(x, dtype=float)
    g = H.group
    t = H._times(x)
    neg = g.p0 * g.F0.left_limit(t) if g.p0 > 0 else np.zeros_like(t)
    pos = 1.0 - g.p1 * g.F1.cdf(t) if g.p1 > 0 else np.ones_like(t)
    return np.clip(np.where(x <= 0, neg, pos), 0.0, 1.0)


def _kendall(Hs, w, js):
    tau = 0.0
    n = len(Hs)
    for a in range(n):
        for b in range(n):
            sgn = np.sign(js[a] - js[b])
            if sgn == 0 or w[a] == 0 or w[b] == 0:
                continue
            # P(X_a > X_b) - P(X_a < X_b) with X_a ~ H_a, X_b ~ H_b independent
            gt = Hs[a]._integrate(lambda q, u: _left_cdf(Hs[b], q))
            lt = 1.0 - Hs[a]._integrate(lambda q, u: Hs[b].cdf(q))
            tau += w[a] * w[b] * sgn * (gt - lt)
    return _clip_corr(tau)


__all__ = [
    "GroupProfile", "detect_fosd", "detect_mean_ranking", "detect_lr_dominance", "detect_hazard_dominance",
    "detect_single_crossing", "lorenz_dominance", "lorenz_curve", "detect_sosd", "theta_percentile",
    "oos_preference", "correlation", "virtual_axis", "crossing_counts",
]
