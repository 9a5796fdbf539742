"""Command-line surface.

Every run writes its artifacts plus a manifest.json with all effective
parameters into --output-dir. JSON artifacts are the source of truth; CSV
and SVG files are rendered from the same in-memory objects. Determinism:
identical flags + seed give byte-identical artifacts. Parallelism is
controlled by the RASCHCLUST_WORKERS environment variable.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from ._parallel import parallel_map
from .data import ResponseMatrix, read_csv
from .errors import RaschClustError, ConfigError
from .estimation import FitConfig, fit_mml
from .evaluation import (hit_false_rates, item_correlations, matrix_to_csv,
                         mean_conditional_covariance, roc_curve)
from .hierarchy import agglomerate, cut_k, euclidean_item_distances, \
    hcluster_marginal
from .plots import dendrogram_svg, line_chart
from .selection import CRITERIA, Partition, change_sequence, select_sequence, \
    select_with_anchor
from .simulate import preset, preset_names
from .stability import (misfit_scores, order_density, pairwise_similarity,
                        similarity_to_distance, subsample_orders)

HCLUSTER_METHODS = ("marginal", "average", "centroid", "stability-average")

_DEFAULTS = {
    "seed": 0,
    "reps": 1,
    "subsets": 20,
    "proportion": 0.5,
    "threshold": 0.75,
    "quad_points": 30,
    "tol": 1e-5,
    "max_iter": 500,
    "method": None,
    "criterion": "max-sigma",
    "anchor": None,
    "output_dir": "out",
    "emit_svg": False,
}

_CASTS = {
    "seed": int, "reps": int, "subsets": int, "proportion": float,
    "threshold": float, "quad_points": int, "tol": float, "max_iter": int,
    "anchor": int, "emit_svg": lambda v: v.lower() in ("1", "true", "yes"),
}


def _read_config_file(path: str) -> dict:
    values = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key=value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        values[key.lower()] = value
    return values


def _effective(args: argparse.Namespace) -> dict:
    """Merge defaults < config file < explicit flags (argparse gives None
    for unset flags, so file values only fill the gaps)."""
    file_values = _read_config_file(args.config) if args.config else {}
    eff = {}
    for key in vars(args):
        if key in ("config", "command", "func"):
            continue
        flag = getattr(args, key)
        if flag is not None:
            eff[key] = flag
        elif key in file_values:
            cast = _CASTS.get(key, str)
            try:
                eff[key] = cast(file_values[key])
            except ValueError:
                raise ConfigError(
                    f"config value {key}={file_values[key]!r} is not valid")
        else:
            eff[key] = _DEFAULTS.get(key)
    return eff


def _fit_config(eff: dict) -> FitConfig:
    return FitConfig(quad_points=eff["quad_points"], tol=eff["tol"],
                     max_iter=eff["max_iter"])


def _outdir(eff: dict) -> Path:
    path = Path(eff["output_dir"])
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _manifest(out: Path, command: str, eff: dict) -> None:
    _write_json(out / "manifest.json", {
        "tool": "raschclust",
        "version": __version__,
        "command": command,
        "parameters": {k: v for k, v in sorted(eff.items())},
    })


def _load_input(eff: dict) -> ResponseMatrix:
    if not eff.get("input"):
        raise ConfigError("--input is required for this command")
    return read_csv(eff["input"])


def _load_truth(eff: dict, labels) -> Partition:
    if not eff.get("truth"):
        raise ConfigError("--truth is required for this command")
    payload = json.loads(Path(eff["truth"]).read_text())
    clusters = payload.get("clusters") or payload.get("true_partition")
    if not clusters:
        raise ConfigError(f"{eff['truth']} holds no 'clusters' entry")
    return Partition(tuple(tuple(i - 1 for i in c) for c in clusters))


def _cmd_simulate(eff: dict) -> None:
    out = _outdir(eff)
    sc = preset(eff["scenario"]).with_seed(eff["seed"])
    for rep in range(eff["reps"]):
        data = sc.realize(rep)
        (out / f"data_rep{rep:03d}.csv").write_text(data.to_csv())
    _write_json(out / "truth.json", {
        **sc.to_dict(),
        "clusters": (sc.to_dict()["true_partition"]
                     or [[i + 1 for i in range(sc.item_count)]]),
    })
    print(f"wrote {eff['reps']} dataset(s) for scenario {sc.name} to {out}")


def _cmd_fit(eff: dict) -> None:
    out = _outdir(eff)
    data = _load_input(eff)
    fit = fit_mml(data, _fit_config(eff))
    _write_json(out / "fit.json", fit.to_dict())
    lines = ["item,label,difficulty"]
    for i, lab in enumerate(fit.item_labels):
        lines.append(f"{i + 1},{lab},{fit.difficulties[i]!r}")
    (out / "fit.csv").write_text("\n".join(lines) + "\n")
    print(f"P={data.person_count} I={data.item_count} "
          f"sigma_theta={fit.sigma_theta:.4f} "
          f"loglik={fit.log_marginal_likelihood:.2f} "
          f"iterations={fit.iterations} converged={fit.converged}")


def _cmd_select(eff: dict) -> None:
    out = _outdir(eff)
    data = _load_input(eff)
    config = _fit_config(eff)
    if eff["anchor"] is not None:
        trace = select_with_anchor(data, eff["anchor"] - 1, config)
    elif eff["criterion"] in ("max-sigma", None):
        trace = select_sequence(data, config)
    elif eff["criterion"] in CRITERIA:
        trace = change_sequence(data, eff["criterion"], config)
    else:
        raise ConfigError(f"unknown criterion {eff['criterion']!r}; "
                          f"known: {', '.join(CRITERIA)}")
    _write_json(out / "select.json", trace.to_dict())
    (out / "select.csv").write_text(trace.to_csv())
    if eff["emit_svg"]:
        steps = np.arange(1, len(trace.step_sigma) + 1)
        (out / "select.svg").write_text(line_chart(
            {"fused-cluster sigma": (steps, np.asarray(trace.step_sigma))},
            "fusion step", "sigma", "Sequential selection"))
    print("order:", " ".join(trace.labels[i] for i in trace.order))


def _cmd_misfit(eff: dict) -> None:
    out = _outdir(eff)
    data = _load_input(eff)
    algorithm = eff["method"] or "sequential"
    orders = subsample_orders(data, M=eff["subsets"],
                              proportion=eff["proportion"],
                              algorithm=algorithm, seed=eff["seed"],
                              config=_fit_config(eff))
    report = misfit_scores(orders, a=eff["threshold"])
    _write_json(out / "orders.json", orders.to_dict())
    _write_json(out / "misfit.json", report.to_dict())
    (out / "misfit.csv").write_text(report.to_csv())
    lines = ["item,label,order,density"]
    curves = {}
    for i, lab in enumerate(data.item_labels):
        grid, dens = order_density(orders, i)
        curves[lab] = (grid, dens)
        for g, v in zip(grid, dens):
            lines.append(f"{i + 1},{lab},{g!r},{v!r}")
    (out / "densities.csv").write_text("\n".join(lines) + "\n")
    if eff["emit_svg"]:
        (out / "densities.svg").write_text(line_chart(
            curves, "inclusion order", "density", "Order densities"))
    worst = max(range(data.item_count), key=lambda i: report.misfit[i])
    print(f"largest misfit: {data.item_labels[worst]} "
          f"(mf={report.misfit[worst]:.2f})")


def _build_dendrogram(data: ResponseMatrix, method: str, eff: dict):
    config = _fit_config(eff)
    similarity = None
    if method == "marginal":
        dend = hcluster_marginal(data, config)
    elif method in ("average", "centroid"):
        dend = agglomerate(euclidean_item_distances(data), method,
                           data.item_labels)
    elif method == "stability-average":
        similarity = pairwise_similarity(data, M=eff["subsets"],
                                         proportion=eff["proportion"],
                                         seed=eff["seed"], config=config)
        dend = agglomerate(similarity_to_distance(similarity), "average",
                           data.item_labels)
    else:
        raise ConfigError(f"unknown method {method!r}; "
                          f"known: {', '.join(HCLUSTER_METHODS)}")
    return dend, similarity


def _cmd_hcluster(eff: dict) -> None:
    out = _outdir(eff)
    data = _load_input(eff)
    method = eff["method"] or "marginal"
    dend, similarity = _build_dendrogram(data, method, eff)
    _write_json(out / "dendrogram.json", dend.to_dict())
    (out / "dendrogram.nwk").write_text(dend.to_newick() + "\n")
    if similarity is not None:
        _write_json(out / "similarity.json", similarity.to_dict())
        (out / "similarity.csv").write_text(similarity.to_csv())
    if eff["emit_svg"]:
        (out / "dendrogram.svg").write_text(
            dendrogram_svg(dend, f"{method} clustering"))
    print(f"{method}: " + "; ".join(
        ",".join(dend.leaves[i] for i in m.members) for m in dend.merges))


def _cmd_stability(eff: dict) -> None:
    out = _outdir(eff)
    data = _load_input(eff)
    similarity = pairwise_similarity(data, M=eff["subsets"],
                                     proportion=eff["proportion"],
                                     seed=eff["seed"],
                                     config=_fit_config(eff))
    _write_json(out / "similarity.json", similarity.to_dict())
    (out / "similarity.csv").write_text(similarity.to_csv())
    (out / "distance.csv").write_text(
        matrix_to_csv(similarity_to_distance(similarity), data.item_labels))
    print(f"mean off-diagonal similarity: "
          f"{_offdiag_mean(similarity.values):.3f}")


def _offdiag_mean(values: np.ndarray) -> float:
    I = values.shape[0]
    return float((values.sum() - np.trace(values)) / (I * (I - 1)))


def _cmd_evaluate(eff: dict) -> None:
    out = _outdir(eff)
    data = _load_input(eff)
    truth = _load_truth(eff, data.item_labels)
    method = eff["method"] or "marginal"
    dend, _ = _build_dendrogram(data, method, eff)
    curve = roc_curve(truth, dend)
    _write_json(out / "curve.json", {"method": method, **curve.to_dict()})
    (out / "curve.csv").write_text(curve.to_csv())
    if eff["emit_svg"]:
        h = np.array([p[0] for p in curve.points])
        f = np.array([p[1] for p in curve.points])
        (out / "curve.svg").write_text(line_chart(
            {"(f, h) by cluster count": (f, h)},
            "false allocation rate", "hit rate", f"{method} recovery"))
    h2, f2 = curve.points[min(1, len(curve.points) - 1)]
    print(f"k=2 cut: hit rate {h2:.3f}, false rate {f2:.3f}")


def _cmd_diagnose(eff: dict) -> None:
    out = _outdir(eff)
    data = _load_input(eff)
    corr = item_correlations(data)
    ccov = mean_conditional_covariance(data)
    _write_json(out / "diagnostics.json", {
        "item_labels": list(data.item_labels),
        "correlations": corr.tolist(),
        "conditional_covariances": ccov.tolist(),
        "conditioning": "sum score over all items",
        "averaging": "unweighted over qualifying sum scores",
    })
    (out / "correlations.csv").write_text(matrix_to_csv(corr, data.item_labels))
    (out / "conditional_covariance.csv").write_text(
        matrix_to_csv(ccov, data.item_labels))
    print(f"mean correlation {_offdiag_mean(corr):.4f}, "
          f"mean conditional covariance {_offdiag_mean(ccov):.4f}")


def _bench_one(task) -> dict:
    scenario_name, seed, rep, subsets, proportion, threshold, config_kw = task
    sc = preset(scenario_name).with_seed(seed)
    data = sc.realize(rep)
    config = FitConfig(**config_kw)
    result = {"rep": rep}
    if sc.polluted_items:
        orders = subsample_orders(data, M=subsets, proportion=proportion,
                                  seed=seed + rep, config=config)
        report = misfit_scores(orders, a=threshold)
        result["misfit"] = [float(v) for v in report.misfit]
    if sc.true_partition is not None:
        truth = Partition(sc.true_partition)
        curves = {}
        for method in ("marginal", "average", "centroid"):
            if method == "marginal":
                dend = hcluster_marginal(data, config)
            else:
                dend = agglomerate(euclidean_item_distances(data), method,
                                   data.item_labels)
            curves[method] = roc_curve(truth, dend).to_dict()["points"]
        result["curves"] = curves
    return result


def _cmd_bench(eff: dict) -> None:
    out = _outdir(eff)
    sc = preset(eff["scenario"])
    config_kw = dict(quad_points=eff["quad_points"], tol=eff["tol"],
                     max_iter=eff["max_iter"])
    tasks = [(sc.name, eff["seed"], rep, eff["subsets"], eff["proportion"],
              eff["threshold"], config_kw) for rep in range(eff["reps"])]
    results = parallel_map(_bench_one, tasks)

    payload: dict = {"scenario": sc.name, "reps": eff["reps"],
                     "seed": eff["seed"], "replications": results}
    lines = []
    if sc.polluted_items:
        mf = np.array([r["misfit"] for r in results])
        payload["mean_misfit"] = [float(v) for v in mf.mean(axis=0)]
        lines.append("item,mean_misfit")
        for i in range(mf.shape[1]):
            lines.append(f"item{i + 1},{mf.mean(axis=0)[i]!r}")
        print("mean misfit:", " ".join(f"{v:.2f}" for v in mf.mean(axis=0)))
    if sc.true_partition is not None:
        summary = {}
        for method in ("marginal", "average", "centroid"):
            pts = np.array([[(p["hit_rate"], p["false_rate"])
                             for p in r["curves"][method]] for r in results])
            summary[method] = [{"k": k + 1,
                                "hit_rate": float(pts[:, k, 0].mean()),
                                "false_rate": float(pts[:, k, 1].mean())}
                               for k in range(pts.shape[1])]
        payload["mean_curves"] = summary
        lines.append("method,k,mean_hit_rate,mean_false_rate")
        for method, rows in summary.items():
            for row in rows:
                lines.append(f"{method},{row['k']},{row['hit_rate']!r},"
                             f"{row['false_rate']!r}")
            at2 = rows[1] if len(rows) > 1 else rows[0]
            print(f"{method}: k=2 mean hit {at2['hit_rate']:.3f}, "
                  f"mean false {at2['false_rate']:.3f}")
    _write_json(out / "bench.json", payload)
    (out / "bench.csv").write_text("\n".join(lines) + "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="raschclust",
        description="Rasch-cluster analysis: marginal fits, item selection, "
                    "misfit scores and hierarchical clustering.")
    parser.add_argument("--version", action="version",
                        version=f"raschclust {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, *, needs_input=True, needs_scenario=False,
            truth=False):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        p.add_argument("--config", help="key=value file; flags take precedence")
        p.add_argument("--output-dir", dest="output_dir",
                       help=f"artifact directory (default {_DEFAULTS['output_dir']})")
        p.add_argument("--seed", type=int)
        if needs_input:
            p.add_argument("--input", help="response CSV (header of item labels)")
        if needs_scenario:
            p.add_argument("--scenario", required=True,
                           help=f"one of: {', '.join(preset_names())}")
            p.add_argument("--reps", type=int)
        p.add_argument("--quad-points", dest="quad_points", type=int)
        p.add_argument("--tol", type=float)
        p.add_argument("--max-iter", dest="max_iter", type=int)
        p.add_argument("--subsets", type=int, help="number of person subsets M")
        p.add_argument("--proportion", type=float,
                       help="person share per subset")
        p.add_argument("--threshold", type=float, help="misfit threshold a")
        p.add_argument("--method",
                       help="hcluster/evaluate: marginal|average|centroid|"
                            "stability-average; misfit: sequential|"
                            "hierarchical-first-cluster")
        p.add_argument("--criterion", choices=CRITERIA,
                       help="selection criterion")
        p.add_argument("--anchor", type=int, help="1-based anchor item")
        if truth:
            p.add_argument("--truth", help="truth JSON with 1-based clusters")
        p.add_argument("--emit-svg", dest="emit_svg", action="store_const",
                       const=True, help="also render SVG plots")
        return p

    add("simulate", _cmd_simulate, "write scenario datasets and truth",
        needs_input=False, needs_scenario=True)
    add("fit", _cmd_fit, "marginal maximum likelihood Rasch fit")
    add("select", _cmd_select, "sequential Rasch-cluster selection")
    add("misfit", _cmd_misfit, "subsampling misfit scores and order densities")
    add("hcluster", _cmd_hcluster, "hierarchical clustering of items")
    add("stability", _cmd_stability, "co-clustering similarities over subsets")
    add("evaluate", _cmd_evaluate, "hit/false-rate curve against a truth",
        truth=True)
    add("diagnose", _cmd_diagnose, "correlations and conditional covariances")
    add("bench", _cmd_bench, "replicated scenario benchmark",
        needs_input=False, needs_scenario=True)
    return parser


def run_command(argv) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        eff = _effective(args)
        _manifest(_outdir(eff), args.command, eff)
        args.func(eff)
    except RaschClustError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
