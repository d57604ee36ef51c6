"""Command-line front end.

Every subcommand writes its data files plus ``manifest.json`` into ``--out``.
``run --manifest FILE`` replays a stored invocation; data files come out
byte-identical (the manifest itself records wall-clock time).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Callable

import mpmath
import numpy as np

from . import __version__, export
from . import clusters, density, exact, fixedpoint, moments, spectral, stats, urn, walk
from .streams import stream
from .svg import Plot

FIGURE_P = "0.77,0.87,0.92"
FIGURE_Q = "0.5,0.7,0.9"


class ArgumentError(ValueError):
    """Invalid or inconsistent command-line arguments (exit code 2)."""


# ------------------------------------------------------------------ parsing


def number(text: str) -> Fraction:
    """Parse ``3/4``, ``0.87`` or ``1e-3`` as an exact rational."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational or decimal number: {text!r}") from exc


def number_list(text: str) -> list[Fraction]:
    return [number(t) for t in text.split(",") if t.strip()]


def _int_text(text: str) -> int:
    """Integer that also accepts ``1e5``-style input."""
    try:
        x = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from exc
    if x.denominator != 1:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(x)


def _common(parser: argparse.ArgumentParser, n: int, replicas: int, prec: int) -> None:
    g = parser.add_argument_group("common")
    g.add_argument("--seed", type=_int_text, default=0)
    g.add_argument("--precision-bits", type=_int_text, default=prec)
    g.add_argument("--replicas", type=_int_text, default=replicas)
    g.add_argument("--n", type=_int_text, default=n)
    g.add_argument("--d", type=_int_text, default=1)
    g.add_argument("--p", type=number_list, default=None, help="memory parameter (rational or decimal)")
    g.add_argument("--q", type=number_list, default=None, help="first-step law as a comma list")
    g.add_argument("--a", type=number, default=None, help="exponent; checked against d and p when both given")
    g.add_argument("--out", type=Path, default=Path("out"))
    g.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="elephant-lab", description="Elephant random walk laboratory")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="walk trajectories or endpoint ensembles")
    _common(p, 1000, 1, 256)

    p = sub.add_parser("urn", help="urn composition paths or final compositions")
    _common(p, 1000, 1, 256)

    p = sub.add_parser("oracle", help="exact law of S_n (d <= 2) with optional Monte Carlo check")
    _common(p, 10, 0, 256)

    p = sub.add_parser("moments", help="moment recursion, MGF and Carleman diagnostics")
    _common(p, 0, 0, 256)
    p.add_argument("--order", type=_int_text, default=10)
    p.add_argument("--exact", action="store_true", help="rational arithmetic for m_k")
    p.add_argument("--t", type=number, default=None, help="MGF argument")
    p.add_argument("--carleman", type=_int_text, default=0, help="number of Carleman terms")

    p = sub.add_parser("density", help="density of L_q from its moments")
    _common(p, 10000, 0, density.DEFAULT_PREC)
    p.add_argument("--atoms", type=_int_text, default=density.DEFAULT_ATOMS)
    p.add_argument("--paths", type=_int_text, default=0, help="walk paths for a histogram comparison")
    p.add_argument("--clamp", action="store_true")

    p = sub.add_parser("fixedpoint", help="particle iteration of the fixed-point maps")
    _common(p, 0, 100000, 256)
    p.add_argument("--variant", choices=fixedpoint.VARIANTS, default="L1")
    p.add_argument("--steps", type=_int_text, default=20)
    p.add_argument("--trials", type=_int_text, default=0, help="contraction trials (L1 only)")
    p.add_argument("--no-recenter", dest="recenter", action="store_false",
                   help="let the particle mean drift (it performs a random walk under resampling)")

    p = sub.add_parser("support", help="Krylov dimension and support class of urn limits")
    _common(p, 10000, 0, 128)
    p.add_argument("--w", type=number_list, default=None, help="vector to classify")

    p = sub.add_parser("clusters", help="percolated recursive trees and the cluster series")
    _common(p, 100, 1, 256)
    p.add_argument("--mode", choices=("tree", "ensemble", "series"), default="tree")
    p.add_argument("--J", type=_int_text, default=50)

    p = sub.add_parser("figures", help="trajectory and density panels as SVG")
    _common(p, 10000, 0, density.DEFAULT_PREC)
    p.add_argument("--panel", choices=("trajectory", "density", "all"), default="all")
    p.add_argument("--paths", type=_int_text, default=500)
    p.add_argument("--atoms", type=_int_text, default=density.DEFAULT_ATOMS)

    p = sub.add_parser("run", help="replay a stored manifest")
    p.add_argument("--manifest", type=Path, required=True)
    p.add_argument("--out", type=Path, default=None)
    return parser


# ------------------------------------------------------------------ helpers


class Output:
    """Collects written files for the manifest."""

    def __init__(self, root: Path, fmt: str):
        self.root = root
        self.fmt = fmt
        self.files: list[Path] = []

    def table(self, name: str, header, rows) -> Path:
        if self.fmt == "csv":
            path = export.write_csv(self.root / f"{name}.csv", header, rows)
        else:
            path = export.write_json(self.root / f"{name}.json", {"columns": list(header), "rows": [list(r) for r in rows]})
        self.files.append(path)
        return path

    def json(self, name: str, obj) -> Path:
        path = export.write_json(self.root / f"{name}.json", obj)
        self.files.append(path)
        return path

    def svg(self, name: str, plot: Plot) -> Path:
        path = plot.save(self.root / f"{name}.svg")
        self.files.append(path)
        return path


def _single(values, name: str):
    if values is None:
        return None
    if len(values) != 1:
        raise ArgumentError(f"--{name} takes a single value here")
    return values[0]


def _memory(args, required: bool = True):
    p = _single(args.p, "p")
    a = args.a
    if p is not None and a is not None:
        derived = walk.exponent(args.d, p)
        if abs(float(derived) - float(a)) > 1e-12:
            raise ArgumentError(f"--a {a} is inconsistent with d={args.d}, p={p} (a={derived})")
    if p is None and a is not None:
        p = walk.memory_for_exponent(args.d, a)
    if p is None and required:
        raise ArgumentError("give --p or --a")
    if p is not None and not 0 <= p <= 1:
        raise ArgumentError("p must lie in [0, 1]")
    return p


def _exponent(args) -> Fraction:
    if args.a is not None:
        _memory(args)
        return args.a
    return walk.exponent(args.d, _memory(args))


def _first_step(args) -> tuple:
    """Length-2d first-step law; defaults to the first direction."""
    ncol = 2 * args.d
    if args.q is None:
        return tuple(Fraction(int(i == 0)) for i in range(ncol))
    q = list(args.q)
    if args.d == 1 and len(q) == 1:
        q = [q[0], 1 - q[0]]
    if len(q) != ncol or any(x < 0 for x in q) or sum(q) != 1:
        raise ArgumentError(f"--q must be a probability vector with {ncol} entries summing to 1")
    return tuple(q)


def _q_plus(args) -> Fraction:
    """``P(first step = +1)`` for one-dimensional laws."""
    if args.q is None:
        return Fraction(1)
    if len(args.q) > 2:
        raise ArgumentError("--q for a one-dimensional law is P(+1) or a pair")
    return _first_step(argparse.Namespace(q=args.q, d=1))[0]


def _positive(name: str, value: int, allow_zero: bool = False) -> None:
    if value < 0 or (value == 0 and not allow_zero):
        raise ArgumentError(f"--{name} must be {'non-negative' if allow_zero else 'positive'}")


# ------------------------------------------------------------------ commands


def cmd_simulate(args, out: Output) -> dict:
    p = _memory(args)
    cfg = walk.WalkConfig(args.d, p, _first_step(args), args.n, args.seed)
    _positive("replicas", args.replicas)
    if args.replicas == 1:
        traj = walk.simulate_walk(cfg, materialize=True)
        pos = traj.materialize()
        out.table("trajectory", ["t", "step"] + [f"x{i + 1}" for i in range(cfg.d)],
                  ([t, "" if t == 0 else int(traj.steps[t - 1]), *pos[t]] for t in range(cfg.n + 1)))
        return {"config": cfg.to_dict(), "endpoint": traj.endpoint()}
    ends = walk.walk_endpoints(cfg, args.replicas)
    scale = float(cfg.n) ** float(cfg.a)
    out.table("endpoints", ["replica"] + [f"S{i + 1}" for i in range(cfg.d)] + [f"L{i + 1}" for i in range(cfg.d)],
              ([r, *ends[r], *(ends[r] / scale)] for r in range(len(ends))))
    est = walk.estimate_limit_moments(walk.LimitEnsemble(ends / scale, float(cfg.a), cfg.n))
    return {"config": cfg.to_dict(), "limit_moments": est.to_dict()}


def cmd_urn(args, out: Output) -> dict:
    p = _memory(args)
    q = _first_step(args)
    _positive("replicas", args.replicas)
    _positive("n", args.n, allow_zero=True)
    a = walk.exponent(args.d, p)
    if args.replicas == 1:
        init = tuple(int(x == 1) for x in q) if sum(x == 1 for x in q) == 1 else None
        if init is None:
            raise ArgumentError("a single urn path needs a deterministic first colour (one q entry equal to 1)")
        path = urn.simulate_urn(urn.UrnConfig(2 * args.d, p, init, args.n, args.seed))
        c = 2 * args.d
        out.table("urn_path", ["t", "drawn", "shift"] + [f"U{i + 1}" for i in range(c)],
                  ([t, "" if t == 0 else int(path.drawn[t - 1]), "" if t == 0 else int(path.shifts[t - 1]),
                    *path.compositions[t]] for t in range(path.n + 1)))
        return {"d": args.d, "p": p, "a": a, "final": path.compositions[-1],
                "walk_position": urn.urn_to_walk_position(path.compositions[-1])}
    comps = urn.urn_ensemble(args.d, p, args.n, args.replicas, args.seed, q=q)
    summary = {"d": args.d, "p": p, "a": a, "n": args.n, "replicas": args.replicas}
    header = ["replica"] + [f"U{i + 1}" for i in range(2 * args.d)]
    if a > Fraction(1, 2) and args.n > 0:
        Y = urn.centred_urn(comps, a)
        summary["Y_mean"] = Y.mean(axis=0)
        summary["Y_mean_se"] = stats.standard_error(Y)
        summary["Y_mean_exact"] = [float(sum(qi * (int(i == j) - Fraction(1, 2 * args.d)) for j, qi in enumerate(q)))
                                   / math.gamma(1 + float(a)) for i in range(2 * args.d)]
        header += [f"Y{i + 1}" for i in range(2 * args.d)]
        rows = ([r, *comps[r], *Y[r]] for r in range(len(comps)))
    else:
        rows = ([r, *comps[r]] for r in range(len(comps)))
    out.table("urn_final", header, rows)
    return summary


def cmd_oracle(args, out: Output) -> dict:
    p = _memory(args)
    q = _first_step(args)
    if args.d == 1:
        law = exact.exact_law_1d(args.n, p, q)
        labels = ["x"]
    elif args.d == 2:
        law = exact.exact_law_counts(args.n, 2, p, q).pushforward(exact.counts_to_position)
        labels = ["x1", "x2"]
    else:
        raise ArgumentError("the exact oracle supports d <= 2")
    rows = [[*(x if isinstance(x, tuple) else (x,)), law.pmf[x].numerator, law.pmf[x].denominator, float(law.pmf[x])]
            for x in law.support]
    out.table("pmf", labels + ["numerator", "denominator", "probability"], rows)
    summary = {"d": args.d, "n": args.n, "p": p, "q": list(q), "support_size": len(law.pmf)}
    if args.replicas > 0:
        cfg = walk.WalkConfig(args.d, p, q, args.n, args.seed)
        ends = walk.walk_endpoints(cfg, args.replicas)
        samples = ends[:, 0] if args.d == 1 else ends
        summary["chisquare"] = stats.pooled_chisquare(samples, law.pmf).to_dict()
    return summary


def cmd_moments(args, out: Output) -> dict:
    a = _exponent(args) if (args.p or args.a is not None) else None
    if a is None:
        raise ArgumentError("give --a (or --p and --d)")
    if not (Fraction(1, 2) < a <= 1):
        raise ArgumentError(f"the moment recursion needs a in (1/2, 1], got {a}")
    order = max(args.order, 2 * args.carleman, 60 if args.t is not None else 2, 2)
    table = moments.m_sequence(a if args.exact else float(a), order, args.precision_bits)
    rows = list(table.to_rows())[: args.order]
    out.table("moments", ["k", "m_numerator", "m_denominator", "m", "mu"], rows)
    summary = {"a": a, "order": args.order, "exact": args.exact, "precision_bits": args.precision_bits}
    if args.exact:
        summary["closed_forms_match"] = all(table.m[k] == moments.closed_form_m(table.a, k)
                                            for k in range(1, min(4, args.order) + 1))
        summary["hankel_signs"] = moments.hankel_signs(table, min(args.order // 2, 10))
    if args.t is not None:
        q = _q_plus(args)
        mgf = moments.mgf_Lq(table, q, args.t)
        summary["mgf"] = {"t": args.t, "q": q, "value": mgf.value, "tail_bound": mgf.tail_bound, "terms": mgf.terms}
    if args.carleman:
        summary["carleman"] = moments.carleman_diagnostic(table, args.carleman).to_dict()
    return summary


def _density_curve(a, q, atoms: int, prec: int, clamp: bool):
    meas = density.limit_quadrature(a, q, atoms, prec)
    return meas, density.smooth_density(meas, clamp=clamp)


def _walk_limit_samples(p, q, n: int, paths: int, seed: int) -> np.ndarray:
    cfg = walk.WalkConfig(1, p, (q, 1 - q), n, seed)
    return walk.walk_endpoints(cfg, paths)[:, 0] / float(n) ** float(cfg.a)


def cmd_density(args, out: Output) -> dict:
    if args.d != 1:
        raise ArgumentError("the density pipeline is one-dimensional")
    a = _exponent(args)
    q = _q_plus(args)
    if not Fraction(1, 2) < a <= 1:
        raise ArgumentError(f"need a in (1/2, 1], got {a}")
    meas, curve = _density_curve(a, q, args.atoms, args.precision_bits, args.clamp)
    out.table("quadrature", ["atom", "weight"], zip(meas.atoms, meas.weights))
    out.table("density", ["x", "density"], zip(curve.grid, curve.values))
    summary = {"a": a, "q": q, "atoms": meas.K, "precision_bits": args.precision_bits,
               "integral": curve.integral, "min_value": curve.min_value, "negative_mass": curve.negative_mass,
               "clamped": curve.clamped, "modes": curve.mode_count()}
    if args.paths:
        samples = _walk_limit_samples(walk.memory_for_exponent(1, a), q, args.n, args.paths, args.seed)
        summary["histogram"] = density.histogram_compare(samples, curve)
        out.svg("density", _density_plot(samples, curve, f"a={float(a):.4g}, q={float(q):.3g}"))
    return summary


def cmd_fixedpoint(args, out: Output) -> dict:
    a = _exponent(args)
    if not Fraction(1, 2) < a <= 1:
        raise ArgumentError(f"the maps need a in (1/2, 1], got {a}")
    _positive("replicas", args.replicas)
    af = float(a)
    d = args.d
    N = args.replicas
    rng = stream(args.seed, "cli.fixedpoint.init")
    summary = {"variant": args.variant, "a": a, "d": d, "particles": N, "steps": args.steps,
               "recenter": args.recenter}
    if args.variant == "L1":
        if d != 1:
            raise ArgumentError("the L1 map is one-dimensional")
        table = moments.m_sequence(af, 4, args.precision_bits)
        start = fixedpoint.ParticlePopulation(rng.normal(float(table.mu[1]), 1.0, N), "L1", af)
        pop = fixedpoint.iterate_map_1d(start, args.steps, args.seed, args.recenter)
        m, se = fixedpoint.empirical_moments(pop.values, 4)
        summary.update(moments=m, moments_se=se, moments_exact=[float(table.mu[k]) for k in range(1, 5)])
        if args.trials:
            summary["contraction"] = fixedpoint.contraction_estimate(af, start.values, pop.values, args.trials,
                                                                     args.seed).to_dict()
        out.table("particles", ["particle", "x"], enumerate(pop.values))
        return summary
    g = math.gamma(1 + af)
    if args.variant == "W":
        mean = np.full(2 * d - 1, 1.0 / (d * g))
        pop = fixedpoint.ParticlePopulation(np.tile(mean, (N, 1)), "W", af, d)
        res = fixedpoint.iterate_map_W(pop, args.steps, args.seed, args.recenter)
        summary.update(mean=res.mean(), mean_exact=mean, mean_se=stats.standard_error(res.values))
        out.table("particles", ["particle"] + [f"w{i + 1}" for i in range(2 * d - 1)],
                  ([i, *row] for i, row in enumerate(res.values)))
        return summary
    ncol = 2 * d
    # population j holds coordinate j of Y for each starting colour k: mean (delta_jk - 1/2d)/Gamma(1+a)
    exact_means = [((np.arange(ncol) == j) - 1 / ncol) / g for j in range(ncol)]
    pops = [fixedpoint.ParticlePopulation(np.tile(exact_means[j], (N, 1)), "Y", af, d) for j in range(ncol)]
    res = fixedpoint.iterate_map_Y(pops, args.steps, args.seed, args.recenter)
    summary.update(means=[r.mean() for r in res], means_exact=exact_means,
                   means_se=[stats.standard_error(r.values) for r in res])
    out.table("particles", ["population", "particle"] + [f"y{i + 1}" for i in range(ncol)],
              ([j, i, *row] for j, r in enumerate(res) for i, row in enumerate(r.values)))
    return summary


def cmd_support(args, out: Output) -> dict:
    d = args.d
    if d < 2:
        raise ArgumentError("support analysis needs d >= 2")
    if args.w is not None:
        if len(args.w) != 2 * d - 1:
            raise ArgumentError(f"--w needs {2 * d - 1} entries for d={d}")
        rep = spectral.krylov_dimension(args.w, d, args.precision_bits)
        summary = {"krylov": rep.to_dict()}
        if d in spectral.SUPPORT_CLASSES:
            summary["class"] = spectral.classify_support(args.w, d, args.precision_bits).to_dict()
        if d == 2:
            summary["det_formula"] = spectral.det_d2_formula(args.w)
            summary["det_direct"] = spectral.det_krylov(args.w, 2)
        out.json("support", summary)
        return {"d": d, "mode": "vector"}
    p = _memory(args)
    a = walk.exponent(d, p)
    _positive("replicas", args.replicas)
    comps = urn.urn_ensemble(d, p, args.n, args.replicas, args.seed, initial_color=0)
    W = urn.urn_limit_W(comps, a)
    ev = spectral.support_evidence_dimd(W, d)
    out.table("W", ["replica"] + [f"W{i + 2}" for i in range(2 * d - 1)], ([r, *row] for r, row in enumerate(W)))
    return {"d": d, "p": p, "a": a, "n": args.n, "evidence": ev.to_dict(),
            "spectrum": spectral.mean_replacement_spectrum(d, p).to_dict()}


def cmd_clusters(args, out: Output) -> dict:
    if args.d != 1:
        raise ArgumentError("the cluster construction is one-dimensional")
    a = _exponent(args)  # p = (1 + a)/2
    if not 0 <= a <= 1:
        raise ArgumentError(f"need a in [0, 1], got {a}")
    q = _q_plus(args)
    af = float(a)
    if args.mode == "tree":
        tree = clusters.simulate_rrt_percolation(args.n, af, args.seed)
        out.table("tree", ["node", "parent", "kept", "root"],
                  ([i, int(tree.parent[i]), int(tree.kept[i]), int(tree.root[i])] for i in range(tree.n)))
        return {"a": a, "n": args.n, "cluster_sizes": tree.cluster_sizes(),
                "walk_position": clusters.reconstruct_walk_from_clusters(tree, float(q), args.seed)}
    if args.mode == "ensemble":
        _positive("replicas", args.replicas)
        w, root = clusters.rrt_walk_ensemble(args.n, af, float(q), args.replicas, args.seed)
        out.table("ensemble", ["replica", "S", "root_cluster"], ([r, w[r], root[r]] for r in range(len(w))))
        summary = {"a": a, "q": q, "n": args.n, "replicas": args.replicas,
                   "root_cluster_scaled_mean": float(np.mean(root) / args.n**af)}
        if args.n <= exact.MAX_N_1D:
            law = exact.exact_law_1d(args.n, walk.memory_for_exponent(1, a), q)
            summary["chisquare"] = stats.pooled_chisquare(w, law.pmf).to_dict()
        return summary
    if not 0 < a < 1:
        raise ArgumentError("the cluster series needs a in (0, 1)")
    _positive("replicas", args.replicas)
    s = clusters.sample_cluster_series(af, float(q), args.J, stream(args.seed, "cli.clusters.series"), args.replicas)
    partial = s.partial_sum()
    out.table("series", ["replica", "partial_sum"], enumerate(partial))
    return {"a": a, "q": q, "J": args.J, "replicas": args.replicas, "marginal_faithful": s.marginal_faithful,
            "mean_C": s.C.mean(axis=0)[: min(10, args.J)]}


def _density_plot(samples: np.ndarray, curve: density.DensityCurve, title: str) -> Plot:
    nb = int(math.ceil(math.log2(len(samples)))) + 1
    lo, hi = min(samples.min(), curve.grid[0]), max(samples.max(), curve.grid[-1])
    counts, edges = np.histogram(samples, bins=np.linspace(lo, hi, nb + 1))
    heights = counts / (len(samples) * np.diff(edges))
    return Plot(title=title, xlabel="x", ylabel="density").histogram(edges, heights, "Monte Carlo") \
        .line(curve.grid, curve.values, "moment reconstruction")


def cmd_figures(args, out: Output) -> dict:
    if args.d != 1:
        raise ArgumentError("figures are one-dimensional")
    ps = args.p if args.p is not None else number_list(FIGURE_P)
    qs = args.q if args.q is not None else number_list(FIGURE_Q)
    if args.a is not None:
        raise ArgumentError("figures take a grid of --p values, not --a")
    _positive("paths", args.paths)
    for p in ps:
        if not Fraction(3, 4) < p <= 1:
            raise ArgumentError(f"figure panels need p in (3/4, 1], got {p}")
    for q in qs:
        if not 0 <= q <= 1:
            raise ArgumentError(f"q must lie in [0, 1], got {q}")
    panels = []
    if args.panel in ("trajectory", "all"):
        for p in ps:
            plot = Plot(title=f"p={float(p):.3g}", xlabel="n", ylabel="S_n")
            for i, q in enumerate(qs):
                cfg = walk.WalkConfig(1, p, (q, 1 - q), args.n, args.seed)
                pos = walk.simulate_walk(cfg, replica=i, materialize=True).materialize()[:, 0]
                stride = max(1, args.n // 1000)
                t = np.arange(0, args.n + 1, stride)
                plot.line(t, pos[t], f"q={float(q):.3g}")
            out.svg(f"trajectory_p{float(p):g}", plot)
            panels.append({"panel": "trajectory", "p": p})
    if args.panel in ("density", "all"):
        for p in ps:
            a = walk.exponent(1, p)
            for q in qs:
                _, curve = _density_curve(a, q, args.atoms, args.precision_bits, clamp=False)
                samples = _walk_limit_samples(p, q, args.n, args.paths, args.seed)
                cmp = density.histogram_compare(samples, curve)
                name = f"density_p{float(p):g}_q{float(q):g}"
                out.svg(name, _density_plot(samples, curve, f"p={float(p):.3g}, q={float(q):.3g}"))
                out.table(name, ["x", "density"], zip(curve.grid, curve.values))
                panels.append({"panel": "density", "p": p, "q": q, "a": a, **cmp,
                               "negative_mass": curve.negative_mass})
    return {"panels": panels, "paths": args.paths, "n": args.n}


COMMANDS: dict[str, Callable] = {
    "simulate": cmd_simulate, "urn": cmd_urn, "oracle": cmd_oracle, "moments": cmd_moments,
    "density": cmd_density, "fixedpoint": cmd_fixedpoint, "support": cmd_support,
    "clusters": cmd_clusters, "figures": cmd_figures,
}


# ------------------------------------------------------------------ driver


def _parameters(args) -> dict:
    return {k: (str(v) if isinstance(v, Path) else v) for k, v in sorted(vars(args).items())}


def execute(argv: list[str], parser: argparse.ArgumentParser) -> int:
    args = parser.parse_args(argv)
    if args.command == "run":
        try:
            manifest = json.loads(args.manifest.read_text())
            replay = list(manifest["argv"])
        except (OSError, ValueError, KeyError) as exc:
            parser.error(f"cannot read manifest {args.manifest}: {exc}")
        if args.out is not None:
            replay = _replace_out(replay, str(args.out))
        return execute(replay, parser)
    sub_parser = parser._subparsers._group_actions[0].choices[args.command]
    out = Output(args.out, args.format)
    started = time.perf_counter()
    try:
        with mpmath.workprec(args.precision_bits):
            summary = COMMANDS[args.command](args, out)
    except ArgumentError as exc:
        sub_parser.print_usage(sys.stderr)
        print(f"elephant-lab {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, density.NonPositiveBeta) as exc:
        print(f"elephant-lab {args.command}: numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:  # rejected by a domain constructor
        sub_parser.print_usage(sys.stderr)
        print(f"elephant-lab {args.command}: error: {exc}", file=sys.stderr)
        return 2
    out.json("summary", summary)
    files = [str(f.relative_to(args.out)) for f in out.files] + ["manifest.json"]
    export.write_json(args.out / "manifest.json", {
        "subcommand": args.command,
        "argv": list(argv),
        "parameters": _parameters(args),
        "seed": args.seed,
        "code_version": __version__,
        "outputs": files,
        "wall_clock_seconds": time.perf_counter() - started,
    })
    print(f"wrote {len(files)} files to {args.out}")
    return 0


def _replace_out(argv: list[str], out: str) -> list[str]:
    res, skip = [], False
    for i, tok in enumerate(argv):
        if skip:
            skip = False
            continue
        if tok == "--out":
            skip = True
            continue
        if tok.startswith("--out="):
            continue
        res.append(tok)
    return res + ["--out", out]


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        return execute(sys.argv[1:] if argv is None else list(argv), parser)
    except SystemExit as exc:  # argparse reports errors with exit code 2
        return int(exc.code) if isinstance(exc.code, int) else 2


if __name__ == "__main__":
    sys.exit(main())
