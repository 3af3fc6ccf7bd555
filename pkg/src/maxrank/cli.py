"""Command-line pipeline: rankings, the MaxRank solve, and evaluation.

Exit codes: 0 success; 2 usage or parameter error; 3 unreadable or
malformed input; 4 iteration budget exhausted.  Data artifacts (score,
policy, CSV files) are byte-identical across reruns with the same config
and inputs; the JSON run summary is exempt because it carries wall time.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from .evaluation import (Direction, TableVariant, demotion_table,
                         export_curves, precision_recall, trapezoid_auc)
from .graph import FormatError, Label, Split, load_costs, load_graph
from .oracle import enumerate_policies, monte_carlo_bias
from .ranking import (ConvergenceError, ScoreKind, ScoreVector, TeleportVector,
                      _power_iteration, read_scores, write_scores)
from .solver import MaxRankParams, value_iteration
from .graph import reverse_graph

USAGE_ERROR = 2
INPUT_ERROR = 3
NONCONVERGENCE = 4


def _add_common(sub, labels_required):
    sub.add_argument("--graph", required=True, help="edge-list file")
    sub.add_argument("--labels", required=labels_required,
                     help="page_id/label/split file")
    sub.add_argument("--out-dir", default=".", help="artifact directory")
    sub.add_argument("--config", help="key=value file; flags take precedence")
    sub.add_argument("--threads", type=int,
                     default=int(os.environ.get("MAXRANK_THREADS", "1")))
    sub.add_argument("--rng-seed", type=int, default=0)
    sub.add_argument("--cost-spam", type=float, default=1.0)
    sub.add_argument("--cost-nonspam", type=float, default=-0.2)
    sub.add_argument("--alpha", type=float, default=0.85)


def _add_power_flags(sub):
    sub.add_argument("--eps", type=float, default=1e-10)
    sub.add_argument("--max-iters", type=int, default=200)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="maxrank",
        description="Link-based web rankings and the MaxRank spam-demotion solver",
    )
    subs = parser.add_subparsers(
        dest="subcommand", required=True,
        metavar="{pagerank,trustrank,antitrustrank,maxrank,eval}",
    )
    by_name = {}

    for name in ("pagerank", "trustrank", "antitrustrank"):
        sub = by_name[name] = subs.add_parser(name)
        _add_common(sub, labels_required=(name != "pagerank"))
        _add_power_flags(sub)

    sub = by_name["maxrank"] = subs.add_parser("maxrank")
    _add_common(sub, labels_required=True)
    sub.add_argument("--gamma", type=float, default=4.0)
    sub.add_argument("--teleport-fraction", type=float, default=0.89)
    sub.add_argument("--eps", type=float, default=1e-8)
    sub.add_argument("--max-iters", type=int, default=1000)
    sub.add_argument("--mode", choices=("gauss-seidel", "jacobi"),
                     default="gauss-seidel")

    sub = by_name["eval"] = subs.add_parser("eval")
    sub.add_argument("--scores", required=True, nargs="+",
                     help="score files to evaluate")
    sub.add_argument("--labels", required=True)
    sub.add_argument("--out-dir", default=".")
    sub.add_argument("--config", help="key=value file; flags take precedence")
    sub.add_argument("--target", choices=("spam", "nonspam"), default="spam")
    sub.add_argument("--direction", choices=("higher", "lower"),
                     default="higher")
    sub.add_argument("--include-train", action="store_true")
    sub.add_argument("--demote-against",
                     help="pagerank score file for demotion-ratio tables")

    # debugging helper; deliberately absent from the subcommand listing
    sub = by_name["oracle"] = subs.add_parser("oracle")
    _add_common(sub, labels_required=True)
    sub.add_argument("--gamma", type=float, default=4.0)
    sub.add_argument("--teleport-fraction", type=float, default=0.89)
    sub.add_argument("--mc-page", type=int,
                     help="also run the Monte Carlo bias estimate at this page")
    sub.add_argument("--walks", type=int, default=100000)
    return parser, by_name


def _apply_config_file(parser, by_name, argv):
    """Pre-scan argv for --config and install its values as defaults.

    Explicit flags still win: argparse only falls back to defaults for
    flags absent from argv.
    """
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config")
    known, _ = probe.parse_known_args(argv)
    if not known.config or not argv or argv[0] not in by_name:
        return
    sub = by_name[argv[0]]
    actions = {a.dest: a for a in sub._actions}
    try:
        lines = Path(known.config).read_text("ascii").splitlines()
    except OSError as exc:
        parser.error(f"cannot read config file: {exc}")
    overrides = {}
    for lineno, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        if "=" not in text:
            parser.error(f"config line {lineno}: expected key=value")
        key, _, value = text.partition("=")
        dest = key.strip().replace("-", "_")
        action = actions.get(dest)
        if action is None or dest in ("config", "help"):
            parser.error(f"config line {lineno}: unknown key {key.strip()!r}")
        value = value.strip()
        if action.type is not None:
            try:
                value = action.type(value)
            except ValueError:
                parser.error(f"config line {lineno}: bad value for {key.strip()!r}")
        elif isinstance(action, (argparse._StoreTrueAction,
                                 argparse._StoreFalseAction)):
            value = value.lower() in ("1", "true", "yes")
        if action.choices and value not in action.choices:
            parser.error(f"config line {lineno}: bad value for {key.strip()!r}")
        overrides[dest] = value
    sub.set_defaults(**overrides)


def _resolved_config(args) -> dict:
    cfg = {}
    for key, value in sorted(vars(args).items()):
        if key in ("subcommand",):
            continue
        if isinstance(value, Path):
            value = str(value)
        cfg[key] = value
    return cfg


def _summary(args, extra: dict, out_dir: Path | None) -> None:
    payload = dict(extra)
    payload["subcommand"] = args.subcommand
    payload["config"] = _resolved_config(args)
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    sys.stdout.write(text)
    if out_dir is not None:
        (out_dir / "run_summary.json").write_text(text)


def _load_inputs(args):
    g = load_graph(args.graph)
    costs = None
    if args.labels:
        costs = load_costs(args.labels, g.n, args.cost_spam, args.cost_nonspam)
    return g, costs


def _seed_pages(costs, label: Label, what: str) -> np.ndarray:
    seed = costs.pages_with(label, Split.TRAIN)
    if len(seed) == 0:
        raise FormatError(f"no Train pages labeled {what}; cannot build the seed")
    return seed


def _run_ranking(args) -> int:
    g, costs = _load_inputs(args)
    started = time.perf_counter()
    if args.subcommand == "pagerank":
        graph, z = g, TeleportVector.uniform(g.n)
    elif args.subcommand == "trustrank":
        graph, z = g, TeleportVector(g.n, _seed_pages(costs, Label.NONSPAM,
                                                      "nonspam"))
    else:
        graph = reverse_graph(g)
        z = TeleportVector(g.n, _seed_pages(costs, Label.SPAM, "spam"))
    values, residual, sweeps = _power_iteration(graph, z, args.alpha, args.eps,
                                                args.max_iters)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_file = out_dir / f"{args.subcommand}.txt"
    write_scores(values, out_file)
    _summary(args, {
        "residual": residual,
        "sweeps": sweeps,
        "wall_time_s": time.perf_counter() - started,
        "outputs": [str(out_file)],
    }, out_dir)
    return 0


def _write_policy(sol, path: Path) -> None:
    lines = []
    for i in range(sol.kept_graph.n):
        kept = " ".join(str(int(t)) for t in sol.kept_links(i))
        d = int(sol.kept_degree[i])
        lines.append(f"{i} {d} {kept}".rstrip() + "\n")
    path.write_bytes("".join(lines).encode("ascii"))


def _run_maxrank(args) -> int:
    g, costs = _load_inputs(args)
    params = MaxRankParams(alpha=args.alpha, gamma=args.gamma,
                           teleport_fraction=args.teleport_fraction,
                           eps=args.eps, max_iters=args.max_iters)
    started = time.perf_counter()
    sol = value_iteration(g, costs, params, mode=args.mode,
                          threads=args.threads)
    wall = time.perf_counter() - started
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = []
    for name, vec in (("bias.txt", sol.bias),
                      ("stationary.txt", sol.stationary)):
        if vec is not None:
            write_scores(vec, out_dir / name)
            outputs.append(str(out_dir / name))
    _write_policy(sol, out_dir / "policy.txt")
    outputs.append(str(out_dir / "policy.txt"))
    _summary(args, {
        "lambda": sol.lam,
        "residual": sol.residual,
        "sweeps": sol.sweeps,
        "converged": sol.converged,
        "teleport_count": len(sol.teleport_set),
        "links_removed": int(np.sum(g.out_degrees() - sol.kept_degree)),
        "wall_time_s": wall,
        "outputs": outputs,
    }, out_dir)
    if not sol.converged:
        print("maxrank: iteration budget exhausted before the residual "
              f"dropped below eps (residual {sol.residual:.3e})",
              file=sys.stderr)
        return NONCONVERGENCE
    return 0


def _run_eval(args) -> int:
    n = None
    loaded = []
    for path in args.scores:
        values = read_scores(path)
        if n is None:
            n = len(values)
        elif len(values) != n:
            raise FormatError(f"{path}: expected {n} pages, got {len(values)}")
        loaded.append((Path(path), ScoreVector(values, ScoreKind.REAL)))
    costs = load_costs(args.labels, n, 1.0, -0.2)
    target = Label.SPAM if args.target == "spam" else Label.NONSPAM
    direction = (Direction.HIGHER_IS_SPAM if args.direction == "higher"
                 else Direction.LOWER_IS_SPAM)
    baseline = None
    if args.demote_against:
        baseline = ScoreVector(read_scores(args.demote_against),
                               ScoreKind.DISTRIBUTION)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report = []
    outputs = []
    for path, vec in loaded:
        curve = precision_recall(vec, costs, target, direction,
                                 include_train=args.include_train)
        curve_file = out_dir / f"{path.stem}_curve.csv"
        export_curves(curve, curve_file)
        outputs.append(str(curve_file))
        entry = {"scores": str(path), "points": len(curve),
                 "auc": trapezoid_auc(curve), "curve": str(curve_file)}
        if baseline is not None:
            raw = demotion_table(vec, baseline, TableVariant.RAW)
            norm = demotion_table(vec, baseline, TableVariant.MEAN_NORMALIZED)
            raw_file = out_dir / f"{path.stem}_demotion_raw.csv"
            norm_file = out_dir / f"{path.stem}_demotion_norm.csv"
            export_curves(raw, raw_file)
            export_curves(norm, norm_file)
            outputs += [str(raw_file), str(norm_file)]
            entry["demotion_raw"] = str(raw_file)
            entry["demotion_norm"] = str(norm_file)
        report.append(entry)
    _summary(args, {"curves": report, "outputs": outputs}, out_dir)
    return 0


def _run_oracle(args) -> int:
    g, costs = _load_inputs(args)
    params = MaxRankParams(alpha=args.alpha, gamma=args.gamma,
                           teleport_fraction=args.teleport_fraction)
    best_lambda, policy = enumerate_policies(g, costs, params)
    payload = {
        "best_lambda": best_lambda,
        "policy": [
            {"page": a.page, "teleport_set": list(a.teleport_set),
             "kept_set": list(a.kept_set)}
            for a in policy
        ],
    }
    if args.mc_page is not None:
        mean, stderr = monte_carlo_bias(g, costs.costs, args.alpha,
                                        args.mc_page, args.walks,
                                        args.rng_seed)
        payload["monte_carlo"] = {"page": args.mc_page, "mean": mean,
                                  "stderr": stderr, "walks": args.walks}
    _summary(args, payload, None)
    return 0


_RUNNERS = {
    "pagerank": _run_ranking,
    "trustrank": _run_ranking,
    "antitrustrank": _run_ranking,
    "maxrank": _run_maxrank,
    "eval": _run_eval,
    "oracle": _run_oracle,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, by_name = build_parser()
    _apply_config_file(parser, by_name, argv)
    args = parser.parse_args(argv)
    try:
        return _RUNNERS[args.subcommand](args)
    except (FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        print(f"maxrank: cannot read input: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except FormatError as exc:
        print(f"maxrank: bad input: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except ConvergenceError as exc:
        print(f"maxrank: {exc}", file=sys.stderr)
        return NONCONVERGENCE
    except ValueError as exc:
        print(f"maxrank: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
