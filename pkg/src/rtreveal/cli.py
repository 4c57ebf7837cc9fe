"""Command-line interface.

Every command prints ``key=value`` records on stdout, with human-readable
lines prefixed by ``# ``. Exit status is 0 whenever the analysis completes,
whatever the verdicts, and 2 on errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .compare import (GroupProfile, correlation, detect_fosd, detect_hazard_dominance, detect_lr_dominance,
                      detect_mean_ranking, detect_single_crossing, detect_sosd, lorenz_curve, lorenz_dominance,
                      oos_preference)
from .construct import MomentUndefined, build_boundary_cstar, build_H, h_stats
from .detect import detect_full_support, detect_mean_sign, detect_unimodality
from .infer import CONDITIONS, IMPUTATION_METHODS, PoolSpec, bootstrap_test, concavity_pipeline, condition_curves, pool_groups
from .io import ObservationTable, RunConfig, format_records, read_observations, write_curves, \
    write_group, write_observations
from .model import (GroupData, HyperbolicSymmetric, LinearCapped, Logistic, NoiseSpec, Normal, TimeBounds,
                    Uniform, inferred_bounds, simulate_raw)
from .rationalize import TransformClass, check_rationalizable
from .svg import write_line_plot
from .transforms import TimeMap

log = logging.getLogger("rtreveal")

LATENTS = {"logistic": Logistic, "normal": Normal, "uniform": Uniform}


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# argument helpers


def parse_latent(text: str):
    """``logistic:mu,s``, ``normal:mu,sigma`` or ``uniform:a,b``."""
    name, _, params = text.partition(":")
    if name not in LATENTS:
        raise UsageError(f"unknown latent family {name!r}; choose from {sorted(LATENTS)}")
    try:
        vals = [float(v) for v in params.split(",")] if params else []
    except ValueError:
        raise UsageError(f"bad parameters in {text!r}") from None
    return LATENTS[name](*vals)


def parse_incomes(text: str) -> tuple:
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"--incomes expects wL,wM,wH, got {text!r}") from None
    if len(vals) != 3:
        raise UsageError(f"--incomes expects three values, got {len(vals)}")
    return vals


def parse_m(text: str | None, bounds: TimeBounds):
    """Time map ``power:a``: ``m(t) = t_lo + span * ((t - t_lo) / span) ** a``."""
    if text is None:
        return None
    name, _, arg = text.partition(":")
    if name == "identity":
        return TimeMap.identity(bounds.t_lo, bounds.t_hi)
    if name == "power":
        a = float(arg)
        lo, span = bounds.t_lo, bounds.span
        return TimeMap.from_function(lambda t: lo + span * ((t - lo) / span) ** a, lo, bounds.t_hi)
    raise UsageError(f"unknown time map {text!r}; use identity or power:a")


def common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("shared options")
    g.add_argument("--config", help="JSON run configuration; flags override it")
    g.add_argument("--input", action="append", help="observation CSV (repeatable)")
    g.add_argument("--group-col")
    g.add_argument("--response-col")
    g.add_argument("--time-col")
    g.add_argument("--baseline-col")
    g.add_argument("--no-normalize", action="store_true", help="use raw times even when baselines exist")
    g.add_argument("--cstar", choices=("hyperbolic", "linear", "boundary"))
    g.add_argument("--t-lo", type=float)
    g.add_argument("--t-hi", type=float)
    g.add_argument("--m", help="asymmetry time map: identity or power:a")
    g.add_argument("--mode", choices=("step", "interp"))
    g.add_argument("--b", type=int, help="bootstrap replications")
    g.add_argument("--seed", type=int)
    g.add_argument("--workers", type=int)
    g.add_argument("--out", help="output file or directory")
    g.add_argument("--alpha", type=float)
    g.add_argument("--incomes", help="wL,wM,wH")
    g.add_argument("--strict-tol", type=float)
    g.add_argument("--cross-tol", type=float)
    return p


def config_from(ns) -> RunConfig:
    base = RunConfig.from_file(ns.config) if ns.config else RunConfig()
    incomes = parse_incomes(ns.incomes) if ns.incomes else None
    return base.merged(input=tuple(ns.input) if ns.input else None, group_col=ns.group_col,
                       response_col=ns.response_col, time_col=ns.time_col, baseline_col=ns.baseline_col,
                       cstar=ns.cstar, t_lo=ns.t_lo, t_hi=ns.t_hi, m=ns.m, mode=ns.mode, b=ns.b, seed=ns.seed,
                       workers=ns.workers, out=ns.out, alpha=ns.alpha, incomes=incomes,
                       strict_tol=ns.strict_tol, cross_tol=ns.cross_tol)


# --------------------------------------------------------------------------
# data loading


def load_table(cfg: RunConfig) -> ObservationTable:
    if not cfg.input:
        raise UsageError("no input: pass --input FILE")
    tables = []
    for path in cfg.input:
        if not Path(path).exists():
            raise UsageError(f"input file {path} does not exist")
        tables.append(read_observations(path, cfg.schema))
    return ObservationTable.concat(tables)


def analysis_times(tab: ObservationTable, normalize: bool) -> np.ndarray:
    if normalize and tab.has_baseline:
        return tab.time / tab.baseline
    if normalize and np.any(~np.isnan(tab.baseline)):
        raise UsageError("some rows lack baseline_time; fill them or pass --no-normalize")
    if normalize:
        log.warning("no baseline_time column values; analysing raw response times")
    return tab.time


def load_groups(cfg: RunConfig, ns) -> tuple[dict[str, GroupData], TimeBounds]:
    """Groups on common bounds, normalized by baseline times when available."""
    tab = load_table(cfg)
    times = analysis_times(tab, not ns.no_normalize)
    auto = inferred_bounds(times)
    bounds = TimeBounds(auto.t_lo if cfg.t_lo is None else cfg.t_lo, auto.t_hi if cfg.t_hi is None else cfg.t_hi)
    groups = {}
    labels = np.array([str(g) for g in tab.group], dtype=object)
    for lab in tab.labels():
        sel = labels == lab
        t, r = times[sel], tab.response[sel]
        groups[lab] = GroupData.from_samples(t[r == 0], t[r == 1], bounds, cfg.mode, lab)
    return groups, bounds


def make_cstar(cfg: RunConfig, bounds: TimeBounds, group: GroupData | None = None):
    if cfg.cstar == "hyperbolic":
        return HyperbolicSymmetric(bounds)
    if cfg.cstar == "linear":
        return LinearCapped(bounds)
    if group is None:
        raise UsageError("--cstar boundary is built per group; choose a single group")
    return build_boundary_cstar(group)


def pick(groups: dict, names: list[str] | None, k: int | None = None) -> list[str]:
    names = names or list(groups)
    missing = [n for n in names if n not in groups]
    if missing:
        raise UsageError(f"unknown groups {missing}; available: {list(groups)}")
    if k is not None and len(names) != k:
        raise UsageError(f"need exactly {k} groups via --groups, got {names}")
    return names


def out_dir(cfg: RunConfig) -> Path | None:
    if cfg.out is None:
        return None
    p = Path(cfg.out)
    p.mkdir(parents=True, exist_ok=True)
    return p


def emit(records, prefix=""):
    for line in format_records(records, prefix):
        print(line)


def say(text: str):
    print(f"# {text}")


# --------------------------------------------------------------------------
# commands


def cmd_simulate(cfg, ns):
    seed = cfg.require_seed("simulate")
    bounds = TimeBounds(0.1 if cfg.t_lo is None else cfg.t_lo, 1.1 if cfg.t_hi is None else cfg.t_hi)
    c = LinearCapped(bounds) if cfg.cstar == "linear" else HyperbolicSymmetric(bounds)
    noise = NoiseSpec.lognormal(ns.eta_sigma, ns.eps_sigma, ns.phi)
    tables = []
    for k, spec in enumerate(ns.latent):
        label, sep, fam = spec.partition("=")
        if not sep:
            raise UsageError(f"--latent expects LABEL=family:params, got {spec!r}")
        tables.append(simulate_raw(parse_latent(fam), c, noise, ns.n, seed + k, label, cfg.workers))
    tab = ObservationTable.concat(tables)
    path = Path(cfg.out or "observations.csv")
    if path.suffix != ".csv":
        path.mkdir(parents=True, exist_ok=True)
        path = path / "observations.csv"
    write_observations(path, tab, {"command": "simulate", "seed": seed, "n": ns.n})
    say(f"simulated {len(tab)} observations in {len(ns.latent)} groups")
    emit([("command", "simulate"), ("seed", seed), ("n", ns.n), ("groups", ",".join(tab.labels())),
          ("path", str(path))])


def cmd_build_h(cfg, ns):
    groups, bounds = load_groups(cfg, ns)
    d = out_dir(cfg)
    for lab in pick(groups, ns.groups):
        g = groups[lab]
        H = build_H(g, make_cstar(cfg, bounds, g))
        st = h_stats(H)
        lo, hi = H.support
        say(f"group {lab}: p1={g.p1:.4f}, support=[{lo:.4g}, {hi:.4g}]")
        emit([("group", lab), ("p0", g.p0), ("p1", g.p1), ("support_lo", lo), ("support_hi", hi),
              ("mean", st.mean), ("median", st.median), ("variance", st.variance), ("skewness", st.skewness),
              ("excess_kurtosis", st.kurtosis), ("undefined", ",".join(st.undefined))])
        if d is not None:
            x = H.grid(ns.points)
            write_curves(d / f"H_{lab}.csv", {"x": x, "H": H.cdf(x)}, {"group": lab, "cstar": cfg.cstar})
            write_group(d / f"group_{lab}.csv", g)


def cmd_detect(cfg, ns):
    groups, bounds = load_groups(cfg, ns)
    for lab in pick(groups, ns.groups):
        g = groups[lab]
        if ns.property == "full_support":
            rep = detect_full_support(g, ns.family)
        elif ns.property == "mean_sign":
            cstar = make_cstar(cfg, bounds, g) if ns.sign_mode == "linear" else None
            rep = detect_mean_sign(g, ns.sign_mode, parse_m(cfg.m, bounds), cstar, cfg.strict_tol)
        else:
            cfg_b = cfg.merged(cstar="boundary") if cfg.cstar != "boundary" else cfg
            rep = detect_unimodality(g, make_cstar(cfg_b, bounds, g), strict_tol=cfg.strict_tol)
        say(f"group {lab}: {rep.property} {rep.verdict}")
        emit([("group", lab)] + rep.records())


def cmd_compare(cfg, ns):
    groups, bounds = load_groups(cfg, ns)
    prop = ns.property
    if prop == "correlation":
        names = pick(groups, ns.groups)
        w = np.array([groups[n].n for n in names], dtype=float)
        prof = GroupProfile(tuple(names), tuple(groups[n] for n in names), tuple(w / w.sum()))
        r = correlation(prof, make_cstar(cfg, bounds), ns.kind)
        emit([("property", "correlation"), ("kind", ns.kind), ("groups", ",".join(names)),
              ("value", "undefined" if r is None else r)])
        return
    a, b = (groups[n] for n in pick(groups, ns.groups, 2))
    if prop == "fosd":
        rep = detect_fosd(a, b, strict_tol=cfg.strict_tol)
    elif prop == "mean_ranking":
        cstar = make_cstar(cfg, bounds) if ns.method == "linear" else None
        rep = detect_mean_ranking(a, b, ns.method, cstar, strict_tol=cfg.strict_tol)
    elif prop == "lr":
        rep = detect_lr_dominance(a, b, ns.form)
    elif prop in ("hazard", "reversed_hazard"):
        rep = detect_hazard_dominance(a, b, reversed=prop == "reversed_hazard")
    elif prop == "single_crossing":
        rep = detect_single_crossing(a, b, cfg.cross_tol)
    elif prop == "sosd":
        rep = detect_sosd(a, b, ns.route, make_cstar(cfg, bounds), ns.method, cfg.cross_tol)
    elif prop == "lorenz":
        rep = lorenz_dominance(build_H(a, make_cstar(cfg, bounds)), build_H(b, make_cstar(cfg, bounds)))
    else:
        rep = oos_preference(a, b, ns.oos_mode, parse_m(cfg.m, bounds))
    say(f"{a.label} vs {b.label}: {rep.property} {rep.verdict}")
    emit([("group_1", a.label), ("group_2", b.label)] + rep.records())


def cmd_rationalize(cfg, ns):
    groups, bounds = load_groups(cfg, ns)
    names = pick(groups, ns.groups)
    gstar = parse_latent(ns.gstar)
    Hs = [build_H(groups[n], make_cstar(cfg, bounds, groups[n] if len(names) == 1 else None)) for n in names]
    res = check_rationalizable(gstar, Hs if len(Hs) > 1 else Hs[0], TransformClass.of(ns.phi_class),
                               TransformClass.of(ns.psi_class))
    say(f"{','.join(names)}: {res.status}")
    emit([("groups", ",".join(names)), ("gstar", ns.gstar), ("phi_class", ns.phi_class),
          ("psi_class", ns.psi_class)] + res.records())


def _pool(cfg, ns) -> PoolSpec:
    low, mid, high = ns.pool.split(",")
    if cfg.alpha is not None and cfg.incomes is not None:
        raise UsageError("give --alpha or --incomes, not both")
    if cfg.alpha is None and cfg.incomes is None:
        raise UsageError("pooling needs --alpha or --incomes wL,wM,wH")
    return PoolSpec(low, mid, high, cfg.alpha, cfg.incomes)


def _test_inputs(cfg, ns):
    tab = load_table(cfg)
    normalize = not ns.no_normalize
    if normalize and not tab.has_baseline:
        raise UsageError("testing needs baseline_time for every row (or pass --no-normalize)")
    return tab.by_group(), normalize


def cmd_test(cfg, ns):
    seed = cfg.require_seed("test")
    groups, normalize = _test_inputs(cfg, ns)
    pool = _pool(cfg, ns)
    res = bootstrap_test(ns.condition, groups, pool, cfg.b, seed, cfg.workers, normalize)
    say(f"{ns.condition}: p={res.p_value:.4f}" + (" (below bootstrap resolution)" if res.below_resolution else ""))
    emit(res.records())


def cmd_replicate(cfg, ns):
    seed = cfg.require_seed("replicate")
    groups, normalize = _test_inputs(cfg, ns)
    methods = [m for m in IMPUTATION_METHODS if ns.methods is None or m.id in ns.methods]
    table = concavity_pipeline(groups, methods, cfg.b, seed, cfg.workers, normalize, tuple(ns.pool.split(",")))
    say(f"concavity tests, B={cfg.b}, seed={seed}")
    for line in table.lines():
        say(line)
    for row in table.rows:
        emit([("method", row.method), ("alpha", row.alpha)] + [(f"p_{c}", row.p_values[c]) for c in CONDITIONS],
             prefix=f"m{row.method}.")
    emit([("B", cfg.b), ("seed", seed)])
    d = out_dir(cfg)
    if d is not None:
        cols = {"method": [r.method for r in table.rows], "alpha": [r.alpha for r in table.rows]}
        cols.update({f"p_{c}": [r.p_values[c] for r in table.rows] for c in CONDITIONS})
        write_curves(d / "table.csv", cols, {"B": cfg.b, "seed": seed})


def cmd_plot(cfg, ns):
    d = out_dir(cfg) or Path(".")
    groups, bounds = load_groups(cfg, ns)
    if ns.kind == "h":
        series = []
        for lab in pick(groups, ns.groups):
            H = build_H(groups[lab], make_cstar(cfg, bounds, groups[lab]))
            x = H.grid(ns.points)
            y = H.cdf(x)
            write_curves(d / f"H_{lab}.csv", {"x": x, "H": y}, {"group": lab, "cstar": cfg.cstar})
            series.append((lab, x, y))
        write_line_plot(d / "H.svg", series, title=f"H under {cfg.cstar}", xlabel="x", ylabel="H(x)")
        files = [f"H_{s[0]}.csv" for s in series] + ["H.svg"]
    elif ns.kind == "lorenz":
        q = np.linspace(0.0, 1.0, ns.points)
        series = []
        for lab in pick(groups, ns.groups):
            try:
                y = lorenz_curve(build_H(groups[lab], make_cstar(cfg, bounds, groups[lab])), q)
            except MomentUndefined as exc:
                say(f"group {lab}: Lorenz curve undefined ({exc})")
                continue
            write_curves(d / f"lorenz_{lab}.csv", {"q": q, "L": y}, {"group": lab})
            series.append((lab, q, y))
        write_line_plot(d / "lorenz.svg", series, title="Lorenz curves", xlabel="q", ylabel="L(q)")
        files = [f"lorenz_{s[0]}.csv" for s in series] + ["lorenz.svg"]
    else:
        low, mid, high = pick(groups, ns.pool.split(","), 3)
        pool = _pool(cfg, ns)
        gM = groups[mid].with_mode("step")
        gP = pool_groups(groups[low].with_mode("step"), groups[high].with_mode("step"), pool.weight)
        conds = CONDITIONS[:3] if ns.condition == "all" else [ns.condition]
        files = []
        for c in conds:
            t, lhs, rhs = condition_curves(c, gM, gP)
            write_curves(d / f"condition_{c}.csv", {"t": t, "lhs": lhs, "rhs": rhs},
                         {"condition": c, "alpha": pool.weight})
            write_line_plot(d / f"condition_{c}.svg", [("lhs", t, lhs), ("rhs", t, rhs)], title=c,
                            xlabel="t", ylabel="subdistribution difference", hline=0.0)
            files += [f"condition_{c}.csv", f"condition_{c}.svg"]
    say(f"wrote {len(files)} files to {d}")
    emit([("kind", ns.kind), ("files", ",".join(files))])


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = common_parser()
    p = argparse.ArgumentParser(prog="rtreveal", description="Revealed latent distributions from response times.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", parents=[common], help="simulate raw observations")
    s.add_argument("--latent", action="append", required=True, help="LABEL=family:params, e.g. M=logistic:1,1")
    s.add_argument("--n", type=int, default=1000)
    s.add_argument("--eta-sigma", type=float, default=0.0)
    s.add_argument("--eps-sigma", type=float, default=0.0)
    s.add_argument("--phi", type=float, default=1.0)
    s.set_defaults(fn=cmd_simulate)

    s = sub.add_parser("build-h", parents=[common], help="empirical latent CDF and its moments")
    s.add_argument("--groups", type=lambda v: v.split(","))
    s.add_argument("--points", type=int, default=1000)
    s.set_defaults(fn=cmd_build_h)

    s = sub.add_parser("detect", parents=[common], help="single-group properties")
    s.add_argument("property", choices=("full_support", "mean_sign", "unimodality"))
    s.add_argument("--groups", type=lambda v: v.split(","))
    s.add_argument("--family", choices=("asymptotic", "capped", "union"), default="asymptotic")
    s.add_argument("--sign-mode", choices=("symmetric", "asymmetric", "linear"), default="symmetric")
    s.set_defaults(fn=cmd_detect)

    s = sub.add_parser("compare", parents=[common], help="two-group orders and correlations")
    s.add_argument("property", choices=("fosd", "mean_ranking", "lr", "hazard", "reversed_hazard",
                                        "single_crossing", "sosd", "lorenz", "oos", "correlation"))
    s.add_argument("--groups", type=lambda v: v.split(","))
    s.add_argument("--method", choices=("fosd", "sign_split", "asymmetry", "linear"), default="asymmetry")
    s.add_argument("--form", choices=("cdf_inequality", "density_ratio"), default="cdf_inequality")
    s.add_argument("--route", choices=("single_crossing", "lorenz"), default="single_crossing")
    s.add_argument("--oos-mode", choices=("fosd_cond", "sign_cond", "asym_cond", "median_theta",
                                          "median_theta_asym"), default="median_theta")
    s.add_argument("--kind", choices=("pearson", "spearman", "kendall"), default="spearman")
    s.set_defaults(fn=cmd_compare)

    s = sub.add_parser("rationalize", parents=[common], help="rationalizability under restricted classes")
    s.add_argument("--groups", type=lambda v: v.split(","))
    s.add_argument("--gstar", default="logistic:0,1", help="reference latent law, e.g. logistic:0,1")
    s.add_argument("--phi-class", default="all_increasing")
    s.add_argument("--psi-class", default="all_increasing")
    s.set_defaults(fn=cmd_rationalize)

    s = sub.add_parser("test", parents=[common], help="bootstrap test of one testing condition")
    s.add_argument("condition", choices=CONDITIONS)
    s.add_argument("--pool", default="L,M,H", help="low,middle,high group labels")
    s.set_defaults(fn=cmd_test)

    s = sub.add_parser("replicate", parents=[common], help="concavity tests for the imputation methods")
    s.add_argument("--pool", default="L,M,H")
    s.add_argument("--methods", type=lambda v: [int(x) for x in v.split(",")])
    s.set_defaults(fn=cmd_replicate)

    s = sub.add_parser("plot", parents=[common], help="curve CSVs and SVG plots")
    s.add_argument("kind", choices=("h", "lorenz", "condition"))
    s.add_argument("--groups", type=lambda v: v.split(","))
    s.add_argument("--condition", choices=CONDITIONS[:3] + ("all",), default="all")
    s.add_argument("--pool", default="L,M,H")
    s.add_argument("--points", type=int, default=400)
    s.set_defaults(fn=cmd_plot)
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="# warning: %(message)s", stream=sys.stderr)
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = config_from(ns)
        for path in cfg.input:
            if Path(path).exists():
                cfg.check_columns(path)
        ns.fn(cfg, ns)
    except (UsageError, ValueError, MomentUndefined, OSError) as exc:
        print(f"rtreveal {ns.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
