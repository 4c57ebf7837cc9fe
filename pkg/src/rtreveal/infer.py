"""Pooling, sup-statistic bootstrap tests and the concavity pipeline.

Midpoint concavity of a mean function is tested by pooling a low and a high
group with weight ``alpha`` and comparing the pooled group ``P`` with a middle
group ``M`` through three testing conditions on the subdistribution functions
``M_i(t) = p_M^i F_M^i(t)`` and ``P_i(t) = p_P^i F_P^i(t)``:

``avcond``     ``M0 - P0 <= M1 - P1``
``htcond``     ``M0 - P0 <= 0 <= M1 - P1``
``httwtcond``  ``P1 - P0 <= 0 <= M1 - M0``

Each ``*_rev`` condition reverses every inequality. The null hypothesis that a
condition holds for all ``t`` is tested with a recentred nonparametric
bootstrap of ``sqrt(n) * sup_t max(v(t), 0)``, where ``v <= 0`` is the
condition written as violation functions.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .ecdf import STEP, mix
from .model import GroupData, ObservationTable, TimeBounds

log = logging.getLogger(__name__)

FORWARD = ("avcond", "htcond", "httwtcond")
REVERSED = tuple(c + "_rev" for c in FORWARD)
CONDITIONS = FORWARD + REVERSED
MIN_GROUP_SIZE = 10


# --------------------------------------------------------------------------
# pooling


def solve_alpha(wL: float, wM: float, wH: float) -> float:
    """Weight with ``alpha * wL + (1 - alpha) * wH = wM``."""
    if not (wL < wM < wH):
        raise ValueError(f"need wL < wM < wH, got {wL}, {wM}, {wH}")
    return (wH - wM) / (wH - wL)


@dataclass(frozen=True)
class ImputationMethod:
    """Imputed mean incomes of the low, middle and high groups."""

    id: int
    wL: float
    wM: float
    wH: float
    reported_alpha: float | None = None

    @property
    def alpha(self) -> float:
        return solve_alpha(self.wL, self.wM, self.wH)


# Imputed incomes per method and the pooling weights reported alongside them.
IMPUTATION_METHODS = (
    ImputationMethod(1, 20000, 55000, 90000, 0.500),
    ImputationMethod(2, 20000, 55000, 110000, 0.610),
    ImputationMethod(3, 20000, 55000, 135000, 0.660),
    ImputationMethod(4, 39334, 68013, 115459, 0.623),
    ImputationMethod(5, 23172, 53048, 111167, 0.660),
    ImputationMethod(6, 25094, 54381, 108469, 0.649),
    ImputationMethod(7, 22627, 53979, 111161, 0.646),
    ImputationMethod(8, 23318, 54125, 112854, 0.656),
)


@dataclass(frozen=True)
class PoolSpec:
    low: str = "L"
    mid: str = "M"
    high: str = "H"
    alpha: float | None = None
    incomes: tuple | None = None

    def __post_init__(self):
        if (self.alpha is None) == (self.incomes is None):
            raise ValueError("give exactly one of alpha or incomes")
        if not 0.0 < self.weight < 1.0:
            raise ValueError("alpha must lie in (0, 1)")

    @property
    def weight(self) -> float:
        return float(self.alpha) if self.alpha is not None else solve_alpha(*self.incomes)


def pool_groups(gL: GroupData, gH: GroupData, alpha: float, label: str = "P") -> GroupData:
    """Group whose subdistribution functions are ``alpha * L_i + (1 - alpha) * H_i``."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    p0 = alpha * gL.p0 + (1.0 - alpha) * gH.p0
    p1 = 1.0 - p0
    F = []
    for i in (0, 1):
        wl, wh = alpha * gL.p(i), (1.0 - alpha) * gH.p(i)
        if wl + wh <= 0:
            F.append(gL.F(i) if alpha > 0 else gH.F(i))
        else:
            F.append(mix([gL.F(i), gH.F(i)], [wl, wh]))
    bounds = TimeBounds(min(gL.bounds.t_lo, gH.bounds.t_lo), max(gL.bounds.t_hi, gH.bounds.t_hi))
    n = gL.n + gH.n if gL.n is not None and gH.n is not None else None
    return GroupData(p0, p1, F[0], F[1], bounds, label, n)


def n_eff(n_m: int, n_p: int) -> float:
    return n_m * n_p / (n_m + n_p)


# --------------------------------------------------------------------------
# statistics


def violation_functions(condition: str, M0, M1, P0, P1) -> tuple[np.ndarray, ...]:
    """The condition as functions that are ``<= 0`` wherever it holds."""
    base, rev = (condition[:-4], True) if condition.endswith("_rev") else (condition, False)
    if base == "avcond":
        out = ((M0 - P0) - (M1 - P1),)
    elif base == "htcond":
        out = (M0 - P0, P1 - M1)
    elif base == "httwtcond":
        out = (P1 - P0, M0 - M1)
    else:
        raise ValueError(f"unknown condition {condition!r}; choose from {CONDITIONS}")
    return tuple(-v for v in out) if rev else out


def condition_curves(condition: str, gM: GroupData, gP: GroupData, t=None):
    """Left- and right-hand sides of the displayed condition over ``t``.

    Forward conditions read ``lhs <= rhs`` (with zero between the sides for the
    two-inequality conditions); reversed conditions read ``lhs >= rhs``.
    """
    if t is None:
        t = np.unique(np.r_[gM.grid, gP.grid])
    t = np.asarray(t, dtype=float)
    M0, M1, P0, P1 = gM.sub(0, t), gM.sub(1, t), gP.sub(0, t), gP.sub(1, t)
    base = condition[:-4] if condition.endswith("_rev") else condition
    if base in ("avcond", "htcond"):
        lhs, rhs = M0 - P0, M1 - P1
    elif base == "httwtcond":
        lhs, rhs = P1 - P0, M1 - M0
    else:
        raise ValueError(f"unknown condition {condition!r}; choose from {CONDITIONS}")
    return t, lhs, rhs


@dataclass(frozen=True)
class ViolationStat:
    condition: str
    value: float
    parts: tuple
    n: float


def sup_violation_statistic(condition: str, gM: GroupData, gP: GroupData, n: float | None = None,
                            grid=None) -> ViolationStat:
    """``sqrt(n) * sup_t max(v(t), 0)``, maximized over the condition's inequalities.

    ``n`` defaults to the effective size ``nM nP / (nM + nP)`` from the groups.
    """
    if n is None:
        if gM.n is None or gP.n is None:
            raise ValueError("sample sizes unknown; pass n")
        n = n_eff(gM.n, gP.n)
    if grid is None:
        grid = np.unique(np.r_[gM.grid, gP.grid])
    t = np.asarray(grid, dtype=float)
    vs = violation_functions(condition, gM.sub(0, t), gM.sub(1, t), gP.sub(0, t), gP.sub(1, t))
    parts = tuple(float(np.sqrt(n) * max(float(np.max(v)), 0.0)) for v in vs)
    return ViolationStat(condition, max(parts), parts, float(n))


# --------------------------------------------------------------------------
# bootstrap


@dataclass(frozen=True)
class TestResult:
    """Outcome of one bootstrap test.

    ``sub_p_values`` are the step-down adjusted p-values of the individual
    inequalities; the condition's p-value is their minimum.
    """

    condition: str
    statistic: float
    p_value: float
    B: int
    seed: int
    sub_statistics: tuple = ()
    sub_p_values: tuple = ()
    alpha: float | None = None
    n_eff: float | None = None

    __test__ = False  # not a pytest class

    @property
    def below_resolution(self) -> bool:
        """True when no bootstrap statistic reached the observed one."""
        return self.p_value <= 1.0 / (self.B + 1) + 1e-15

    def records(self):
        out = [("condition", self.condition), ("statistic", self.statistic), ("p_value", self.p_value),
               ("B", self.B), ("seed", self.seed)]
        if self.alpha is not None:
            out.append(("alpha", self.alpha))
        if self.n_eff is not None:
            out.append(("n_eff", self.n_eff))
        for k, (s, p) in enumerate(zip(self.sub_statistics, self.sub_p_values)):
            out += [(f"statistic_{k}", s), (f"p_value_{k}", p)]
        return out


def step_down_pvalues(observed: Sequence[float], boot: np.ndarray) -> tuple[float, ...]:
    """Step-down max-statistic adjusted p-values.

    ``boot`` has shape ``(B, k)``. Hypotheses are visited from the largest
    observed statistic down; each is compared with the bootstrap maximum over
    the hypotheses not yet visited, and adjusted p-values are made monotone.
    """
    obs = np.asarray(observed, dtype=float)
    B = boot.shape[0]
    order = np.argsort(-obs, kind="stable")
    adj = np.empty(obs.size)
    running = 0.0
    for step, k in enumerate(order):
        rest = order[step:]
        mx = boot[:, rest].max(axis=1)
        p = (1.0 + np.count_nonzero(mx >= obs[k])) / (B + 1.0)
        running = max(running, p)
        adj[k] = running
    return tuple(float(v) for v in adj)


@dataclass(frozen=True, eq=False)
class _Sample:
    response: np.ndarray
    time: np.ndarray

    @property
    def n(self) -> int:
        return self.time.size


def _as_sample(obj, normalize: bool, label: str) -> _Sample:
    if isinstance(obj, ObservationTable):
        if normalize:
            if not obj.has_baseline:
                raise ValueError(f"group {label!r} lacks baseline times; pass normalize=False to use raw times")
            t = obj.time / obj.baseline
        else:
            t = obj.time
        resp = obj.response
    else:
        resp, t = obj
    resp, t = np.asarray(resp, dtype=np.int8), np.asarray(t, dtype=float)
    # canonical order makes resamples, and so p-values, independent of row order
    order = np.lexsort((resp, t))
    return _Sample(resp[order], t[order])


class _Engine:
    """Step ECDF subdistribution functions of resampled groups on one merged grid."""

    def __init__(self, samples: Mapping[str, _Sample]):
        self.samples = dict(samples)
        self.grid = np.unique(np.concatenate([s.time for s in samples.values()]))
        self.pos = {k: np.searchsorted(self.grid, s.time) for k, s in samples.items()}

    def subs(self, label: str, idx=None) -> tuple[np.ndarray, np.ndarray]:
        s = self.samples[label]
        pos, resp = self.pos[label], s.response
        if idx is not None:
            pos, resp = pos[idx], resp[idx]
        m = self.grid.size
        c0 = np.bincount(pos[resp == 0], minlength=m)
        c1 = np.bincount(pos[resp == 1], minlength=m)
        return np.cumsum(c0) / s.n, np.cumsum(c1) / s.n


def _violations(engine: _Engine, subs: dict, labels, alphas, conditions):
    """Per alpha: forward violation arrays for every base condition."""
    lo, mid, hi = labels
    L0, L1 = subs[lo]
    M0, M1 = subs[mid]
    H0, H1 = subs[hi]
    out = []
    for a in alphas:
        P0 = a * L0 + (1 - a) * H0
        P1 = a * L1 + (1 - a) * H1
        out.append({c: violation_functions(c, M0, M1, P0, P1) for c in conditions})
    return out


def _bases(conditions):
    return sorted({c[:-4] if c.endswith("_rev") else c for c in conditions})


def bootstrap_tests(conditions: Sequence[str], groups: Mapping[str, object], pool: PoolSpec | Sequence[float],
                    B: int = 1000, seed: int = 0, workers: int = 1, normalize: bool = True,
                    labels: tuple | None = None) -> dict:
    """Run several conditions (and possibly several pooling weights) on shared resamples.

    Parameters
    ----------
    conditions : sequence of str
        Condition ids from ``CONDITIONS``.
    groups : mapping
        Group label to ``ObservationTable`` or ``(responses, times)``.
    pool : PoolSpec or sequence of float
        A single pooling specification, or several ``alpha`` values that are
        all evaluated on the same resamples (labels then default to L, M, H).
    B : int
        Bootstrap replications (at least 100).
    seed : int
        Master seed; replicate ``b`` uses the ``b``-th spawned child.
    workers : int
        Threads; the result does not depend on it.

    Returns
    -------
    dict
        ``{condition: TestResult}`` for a single pool, otherwise
        ``{(alpha, condition): TestResult}``.
    """
    if B < 100:
        raise ValueError("B must be at least 100")
    for c in conditions:
        violation_functions(c, 0.0, 0.0, 0.0, 0.0)
    if isinstance(pool, PoolSpec):
        alphas = [pool.weight]
        labels = (pool.low, pool.mid, pool.high)
        single = True
    else:
        alphas = [float(a) for a in pool]
        labels = labels or ("L", "M", "H")
        single = False
    missing = [lab for lab in labels if lab not in groups]
    if missing:
        raise ValueError(f"missing groups: {', '.join(missing)} (have {', '.join(map(str, groups))})")
    samples = {lab: _as_sample(groups[lab], normalize, lab) for lab in labels}
    for lab, s in samples.items():
        if s.n < MIN_GROUP_SIZE:
            raise ValueError(f"group {lab!r} has {s.n} observations; at least {MIN_GROUP_SIZE} are required")
    if not normalize:
        log.warning("testing raw response times: identical chronometric functions are assumed without normalization")
    engine = _Engine(samples)
    bases = _bases(conditions)
    n_m = samples[labels[1]].n
    n_p = samples[labels[0]].n + samples[labels[2]].n
    scale = np.sqrt(n_eff(n_m, n_p))

    full = {lab: engine.subs(lab) for lab in labels}
    observed = _violations(engine, full, labels, alphas, bases)

    children = np.random.SeedSequence(seed).spawn(B)
    sizes = {lab: samples[lab].n for lab in labels}

    def replicate(b):
        rng = np.random.default_rng(children[b])
        subs = {lab: engine.subs(lab, rng.integers(0, sizes[lab], sizes[lab])) for lab in labels}
        boot = _violations(engine, subs, labels, alphas, bases)
        rows = []
        for obs_a, boot_a in zip(observed, boot):
            row = {}
            for c in bases:
                devs = [bv - ov for bv, ov in zip(boot_a[c], obs_a[c])]
                row[c] = tuple(scale * max(float(d.max()), 0.0) for d in devs)
                row[c + "_rev"] = tuple(scale * max(float((-d).max()), 0.0) for d in devs)
            rows.append(row)
        return rows

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            reps = list(ex.map(replicate, range(B)))
    else:
        reps = [replicate(b) for b in range(B)]

    results = {}
    for k, a in enumerate(alphas):
        for c in conditions:
            base = c[:-4] if c.endswith("_rev") else c
            vs = observed[k][base]
            if c.endswith("_rev"):
                vs = tuple(-v for v in vs)
            obs = tuple(scale * max(float(v.max()), 0.0) for v in vs)
            boot = np.array([reps[b][k][c] for b in range(B)], dtype=float)
            sub_p = step_down_pvalues(obs, boot)
            res = TestResult(c, max(obs), min(sub_p), B, seed, obs, sub_p, a, float(scale ** 2))
            results[c if single else (a, c)] = res
    return results


def bootstrap_test(condition: str, groups: Mapping[str, object], pool: PoolSpec, B: int = 1000, seed: int = 0,
                   workers: int = 1, normalize: bool = True) -> TestResult:
    """Recentred bootstrap p-value for one testing condition.

    The bootstrap statistic is ``sqrt(n) * sup_t max(v*(t) - v(t), 0)``, which
    places the resampling world on the least favourable boundary of the null.
    The p-value is ``(1 + #{T* >= T}) / (B + 1)``; two-inequality conditions
    are corrected jointly by the step-down max-statistic method.
    """
    return bootstrap_tests([condition], groups, pool, B, seed, workers, normalize)[condition]


@dataclass(frozen=True)
class PipelineRow:
    method: int
    alpha: float
    p_values: dict = field(default_factory=dict)
    statistics: dict = field(default_factory=dict)


@dataclass(frozen=True)
class PipelineTable:
    rows: tuple
    B: int
    seed: int
    conditions: tuple = CONDITIONS

    def lines(self) -> list[str]:
        head = ["method", "alpha"] + [f"p_{c}" for c in self.conditions]
        out = [",".join(head)]
        floor = 1.0 / (self.B + 1)
        for r in self.rows:
            # no bootstrap statistic reached the observed one: the p-value is only bounded
            ps = [f"<{floor:.4f}" if r.p_values[c] <= floor + 1e-15 else f"{r.p_values[c]:.4f}" for c in self.conditions]
            out.append(",".join([str(r.method), f"{r.alpha:.3f}"] + ps))
        return out


def concavity_pipeline(groups: Mapping[str, object] | ObservationTable, methods: Sequence[ImputationMethod] = IMPUTATION_METHODS,
                       B: int = 1000, seed: int = 0, workers: int = 1, normalize: bool = True,
                       labels: tuple = ("L", "M", "H")) -> PipelineTable:
    """Test all six conditions for every imputation method on shared resamples."""
    if isinstance(groups, ObservationTable):
        groups = groups.by_group()
    alphas = [m.alpha for m in methods]
    res = bootstrap_tests(CONDITIONS, groups, alphas, B, seed, workers, normalize, labels)
    rows = []
    for m, a in zip(methods, alphas):
        rows.append(PipelineRow(m.id, a, {c: res[(a, c)].p_value for c in CONDITIONS},
                                {c: res[(a, c)].statistic for c in CONDITIONS}))
    return PipelineTable(tuple(rows), B, seed)


def step_group(sample_times0, sample_times1, bounds=None, label=None) -> GroupData:
    """Group data with right-continuous step CDFs, as used by the bootstrap."""
    return GroupData.from_samples(sample_times0, sample_times1, bounds, STEP, label)
