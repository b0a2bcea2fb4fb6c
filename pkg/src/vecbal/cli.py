"""Command line harness: ``vecbal <subcommand> [flags] [key=value ...]``.

Exit status is 0 on success, 2 when a run completes but a bound or
certificate check fails, and 1 on usage or sizing errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .core import FiniteScalarDistribution, RandomStream
from .experiments import lowerbound_sweep, orient_sweep, simulate
from .gauss1d import gaussian_measure, symmetric_interval_for_measure
from .metrics import DiscrepancyReport
from .nets import SizingError, build_net
from .tree import InvariantBreach, TreeSpec, balance_tree_1d, random_tree, search_subgaussian_distribution
from .verify import mc_body_measure, mc_gaussian_mgf_check, rosenthal_check, single_w_tail_sweep

EXIT_OK, EXIT_USAGE, EXIT_FAILED = 0, 1, 2
U64_MAX = 2**64 - 1


class UsageError(Exception):
    pass


# -- typed flat config -------------------------------------------------------

def _bool(s):
    if s.lower() in ("1", "true", "yes", "on"):
        return True
    if s.lower() in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _opt_float(s):
    return None if s.lower() in ("", "none") else float(s)


def _list(conv):
    def parse(s):
        return [conv(x) for x in s.split(",") if x.strip()]
    return parse


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "none"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, list):
        return ",".join(_fmt(x) for x in v)
    return str(v)


SCHEMAS = {
    "simulate": {
        "signer": (str, "uniform-random"),
        "adversary": (str, "iid-sampler"),
        "n": (int, "2"),
        "T": (int, "100"),
        "replicates": (int, "100"),
        "c": (_opt_float, "none"),
        "distribution": (str, "sphere"),
        "log_base": (str, "2"),
        "p": (_list(float), "2"),
        "quantile": (float, "0.9"),
        "transcripts": (_bool, "false"),
    },
    "lowerbound": {
        "signers": (_list(str), "uniform-random,greedy,self-balancing-walk"),
        "T_grid": (_list(int), "64,256,1024,4096"),
        "replicates": (int, "200"),
        "c": (_opt_float, "none"),
        "log_base": (str, "2"),
        "quantile": (float, "0.9"),
        "min_slope": (float, "0.1"),
        "max_residual_fraction": (float, "0.25"),
    },
    "tree-balance": {
        "edges": (int, "100"),
        "tree": (str, ""),
        "max_children": (int, "2"),
        "beta": (float, "0.2001"),
        "measure": (_opt_float, "none"),
    },
    "search-distribution": {
        "tree": (str, ""),
        "path": (_list(float), "1"),
        "n_clones": (int, "1"),
        "threshold": (float, "10"),
        "net_epsilon": (float, "0.5"),
        "cap": (int, str(2**24)),
    },
    "verify": {
        "suite": (_list(str), "mgf,tail,body,rosenthal"),
        "lambdas": (_list(float), "0,0.1,0.25"),
        "mgf_samples": (int, "1000000"),
        "C": (float, "8"),
        "tail_N": (_list(int), "16,64,256"),
        "tail_trials": (int, "1000000"),
        "tail_method": (str, "importance"),
        "body_n": (int, "1"),
        "body_delta": (float, "0.5"),
        "body_N": (_list(int), "4,16,64"),
        "body_trials": (int, "10000"),
        "body_net_epsilon": (float, "0.5"),
        "rosenthal_N": (_list(int), "1,2,3,4,5,6,7,8,9,10,11,12"),
        "rosenthal_p": (_list(float), "2,3,4,6"),
        "rosenthal_dists": (_list(str), "rademacher,uniform3"),
    },
    "orient": {
        "vertices": (int, "50"),
        "T_grid": (_list(int), "100,10000"),
        "replicates": (int, "50"),
        "signer": (str, "self-balancing-walk"),
        "c": (_opt_float, "none"),
        "quantile": (float, "0.9"),
    },
}

VERIFY_SUITES = ("mgf", "tail", "body", "rosenthal")
ROSENTHAL_DISTS = {
    "rademacher": FiniteScalarDistribution.uniform([-1.0, 1.0]),
    "uniform3": FiniteScalarDistribution.uniform([-1.0, 0.0, 1.0]),
}


@dataclass
class ExperimentConfig:
    subcommand: str
    params: dict = field(default_factory=dict)
    master_seed: int = 0

    @classmethod
    def build(cls, subcommand, pairs, seed=None):
        """Parse ``(key, raw_value)`` pairs; later pairs win, unknown keys fail."""
        if subcommand not in SCHEMAS:
            raise UsageError(f"unknown subcommand {subcommand!r}")
        schema = SCHEMAS[subcommand]
        raw = {k: d for k, (_, d) in schema.items()}
        raw_seed = "0"
        for key, value in pairs:
            if key == "seed":
                raw_seed = value
            elif key in schema:
                raw[key] = value
            else:
                raise UsageError(f"unknown key {key!r} for {subcommand}; allowed: seed, {', '.join(schema)}")
        params = {}
        for key, text in raw.items():
            try:
                params[key] = schema[key][0](text.strip())
            except ValueError as exc:
                raise UsageError(f"bad value for {key}: {exc}") from None
        try:
            master_seed = int(raw_seed) if seed is None else int(seed)
        except ValueError:
            raise UsageError(f"seed must be an integer, got {raw_seed!r}") from None
        if not 0 <= master_seed <= U64_MAX:
            raise UsageError("seed must lie in [0, 2^64)")
        return cls(subcommand, params, master_seed)

    def echo(self) -> list[str]:
        lines = [f"vecbal {__version__}", f"subcommand={self.subcommand}", f"seed={self.master_seed}"]
        lines += [f"{k}={_fmt(self.params[k])}" for k in sorted(self.params)]
        return lines

    def header(self) -> dict:
        return {"version": __version__, "config": {"subcommand": self.subcommand, "seed": self.master_seed,
                                                    **{k: _fmt(v) for k, v in self.params.items()}}}


def read_config_file(path) -> list[tuple[str, str]]:
    pairs = []
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        k, v = line.split("=", 1)
        pairs.append((k.strip(), v.strip()))
    return pairs


def parse_overrides(items) -> list[tuple[str, str]]:
    out = []
    for item in items:
        if "=" not in item:
            raise UsageError(f"override {item!r} is not key=value")
        k, v = item.split("=", 1)
        out.append((k.strip(), v.strip()))
    return out


# -- output helpers ------------------------------------------------------------

def _write(out: Path, name: str, text: str):
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text)


def _json(cfg: ExperimentConfig, body: dict) -> str:
    doc = cfg.header()
    doc.update(body)
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _csv(cfg, header, rows) -> str:
    fh = io.StringIO()
    for line in cfg.echo():
        fh.write(f"# {line}\n")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(x) if isinstance(x, float) else x for x in r])
    return fh.getvalue()


def _py(x):
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


# -- subcommands ---------------------------------------------------------------

def run_simulate(cfg, out: Path, jobs: int) -> int:
    P = cfg.params
    adv_params = {}
    if P["adversary"] == "iid-sampler":
        adv_params["distribution"] = P["distribution"]
    elif P["adversary"] == "oblivious-block":
        adv_params["log_base"] = P["log_base"]
    if P["signer"] == "tree-certified":
        raise UsageError("tree-certified runs need a certificate; use search-distribution")
    transcripts = simulate(P["signer"], P["adversary"], P["n"], P["T"], P["replicates"], cfg.master_seed,
                           c=P["c"], adv_params=adv_params, jobs=jobs)
    seeds = [f"{cfg.master_seed}:{r}" for r in range(P["replicates"])]
    report = DiscrepancyReport.from_transcripts(transcripts, seeds, ps=tuple(P["p"]), quantile=P["quantile"])
    _write(out, "discrepancy.csv", report.to_csv(cfg.echo()))
    _write(out, "summary.json", report.to_json(cfg.header()))
    if P["transcripts"]:
        for r, tr in enumerate(transcripts):
            _write(out / "transcripts", f"replicate_{r:04d}.csv", tr.to_csv(comments=cfg.echo() + [f"replicate={r}"]))
    return EXIT_OK


def run_lowerbound(cfg, out: Path, jobs: int) -> int:
    P = cfg.params
    if len(P["T_grid"]) < 3:
        raise UsageError("T_grid needs at least 3 horizons for the growth fit")
    rows, fits, ok = [], {}, True
    for s in P["signers"]:
        res = lowerbound_sweep(s, P["T_grid"], P["replicates"], cfg.master_seed, c=P["c"],
                               log_base=P["log_base"], quantile=P["quantile"], jobs=jobs)
        fit = res["fit"]
        fit["slope_ok"] = fit["slope"] > P["min_slope"]
        fit["residual_ok"] = fit["residual"] < P["max_residual_fraction"] * fit["range"]
        ok &= fit["slope_ok"] and fit["residual_ok"]
        for r in res["rows"]:
            r["norm_ok"] = r["norm_error"] <= 1e-9
            ok &= r["match_within_3se"] and r["norm_ok"] and r["boundary_ok"]
            rows.append([s] + [_py(r[k]) for k in LB_COLUMNS])
        fits[s] = {k: _py(v) for k, v in fit.items()}
    _write(out, "lowerbound.csv", _csv(cfg, ["signer"] + list(LB_COLUMNS), rows))
    _write(out, "lowerbound.json", _json(cfg, {"fits": fits, "passed": bool(ok)}))
    print(f"lowerbound: {'pass' if ok else 'fail'}")
    return EXIT_OK if ok else EXIT_FAILED


LB_COLUMNS = ("T", "k", "blocks", "matches", "match_freq", "expected", "se", "match_within_3se",
              "norm_error", "norm_ok", "boundary_ok", "quantile", "mean")


def _load_tree(path):
    try:
        return TreeSpec.from_text(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read tree: {exc}") from None


def run_tree_balance(cfg, out: Path, jobs: int) -> int:
    P = cfg.params
    if P["tree"]:
        tree = _load_tree(P["tree"])
    else:
        tree = random_tree(P["edges"], RandomStream(cfg.master_seed, 0), n=1, max_children=P["max_children"])
    K = None if P["measure"] is None else symmetric_interval_for_measure(P["measure"])
    _write(out, "tree.txt", "".join(f"# {x}\n" for x in cfg.echo()) + tree.to_text())
    try:
        res = balance_tree_1d(tree, P["beta"], K)
    except InvariantBreach as exc:
        _write(out, "report.json", _json(cfg, {"claim1": "fail", "claim2": "fail", "error": str(exc)}))
        print(f"claim1: fail, claim2: fail ({exc})")
        return EXIT_FAILED
    counts = tree.descendant_counts()
    E = tree.n_edges
    rows = []
    for i in tree.canonical_order():
        b = res.bodies[i]
        rows.append([tree.labels[i], "" if i == tree.root else tree.labels[int(tree.parents[i])],
                     float(tree.vectors[i, 0]), int(res.signs[i]), float(res.prefix_sums[i]),
                     float(b.lo), float(b.hi), float(gaussian_measure(b)), float(1.0 - counts[i] / (2.0 * E))])
    _write(out, "balance.csv", _csv(cfg, ["node", "parent", "v", "sign", "prefix_sum", "body_lo", "body_hi",
                                          "body_measure", "claim1_rhs"], rows))
    c1 = "pass" if res.claim1 else "fail"
    c2 = "pass" if res.claim2 else "fail"
    bound = float(max(abs(res.target.lo), abs(res.target.hi)) / res.beta)
    body = {"claim1": c1, "claim2": c2, "claim1_slack": float(res.claim1_slack),
            "claim2_slack": float(res.claim2_slack), "edges": E, "beta": float(res.beta),
            "target_halfwidth": float(res.target.hi), "max_abs_prefix": float(np.max(np.abs(res.prefix_sums))),
            "prefix_bound": bound}
    _write(out, "report.json", _json(cfg, body))
    print(f"claim1: {c1}, claim2: {c2}")
    return EXIT_OK if res.claim1 and res.claim2 else EXIT_FAILED


def run_search(cfg, out: Path, jobs: int) -> int:
    P = cfg.params
    tree = _load_tree(P["tree"]) if P["tree"] else TreeSpec.path([[x] for x in P["path"]])
    net = build_net(tree.dimension, P["net_epsilon"], RandomStream(cfg.master_seed, 0))
    res = search_subgaussian_distribution(tree, P["n_clones"], P["threshold"], net, P["cap"])
    comments = cfg.echo()
    _write(out, "tree.txt", "".join(f"# {x}\n" for x in comments) + tree.to_text())
    name = "certificate.csv" if res.certified else "best_found.csv"
    _write(out, name, res.to_csv(comments))
    body = {"certified": bool(res.certified), "worst_upper": float(res.worst_upper), "explored": int(res.explored),
            "n_clones": int(res.n_clones), "threshold": float(res.threshold), "net_size": len(net),
            "net_epsilon": float(net.epsilon), "file": name}
    _write(out, "report.json", _json(cfg, body))
    print(f"certified: {'yes' if res.certified else 'no'} (worst upper {res.worst_upper:.6g})")
    return EXIT_OK if res.certified else EXIT_FAILED


def run_verify(cfg, out: Path, jobs: int) -> int:
    P = cfg.params
    suites = P["suite"]
    bad = set(suites) - set(VERIFY_SUITES)
    if bad:
        raise UsageError(f"unknown verify suites {sorted(bad)}; choose from {list(VERIFY_SUITES)}")
    base = RandomStream(cfg.master_seed, 0)
    records = []
    if "mgf" in suites:
        for i, lam in enumerate(P["lambdas"]):
            res = mc_gaussian_mgf_check(lam, P["mgf_samples"], base.derive(1, i))
            records.append(res.to_record("mc_gaussian_mgf_check", {"lam": lam, "samples": P["mgf_samples"]}))
    if "tail" in suites:
        results = single_w_tail_sweep(P["C"], P["tail_N"], P["tail_trials"], base.derive(2), P["tail_method"])
        for N, res in zip(P["tail_N"], results):
            records.append(res.to_record("mc_single_w_tail", {"C": P["C"], "N": N, "trials": P["tail_trials"],
                                                              "method": P["tail_method"]}))
        est = [r.estimate for r in results]
        records.append(_plain_record("single_w_tail_decreasing", {"N": P["tail_N"]}, est,
                                     all(a > b for a, b in zip(est, est[1:])), cfg.master_seed))
    if "body" in suites:
        net = build_net(P["body_n"], P["body_net_epsilon"], base.derive(3, 0))
        inside = []
        for i, N in enumerate(P["body_N"]):
            res = mc_body_measure(P["body_n"], N, P["body_delta"], net, P["body_trials"], base.derive(3, i + 1))
            inside.append(res.inside)
            rec = res.as_mc().to_record("mc_body_measure", {"n": P["body_n"], "N": N, "delta": P["body_delta"],
                                                             "trials": P["body_trials"]})
            rec.update({"outside": res.outside, "indeterminate": res.indeterminate})
            records.append(rec)
        records.append(_plain_record("body_measure_nondecreasing", {"N": P["body_N"]}, inside,
                                     all(a <= b for a, b in zip(inside, inside[1:])), cfg.master_seed))
    if "rosenthal" in suites:
        for name in P["rosenthal_dists"]:
            if name not in ROSENTHAL_DISTS:
                raise UsageError(f"unknown rosenthal distribution {name!r}")
            for N in P["rosenthal_N"]:
                for p in P["rosenthal_p"]:
                    r = rosenthal_check(ROSENTHAL_DISTS[name], N, p)
                    records.append({"operation": "rosenthal_check", "params": {"dist": name, "N": N, "p": p},
                                    "estimate": r.lhs, "se": 0.0, "bound": r.rhs, "ratio": r.ratio,
                                    "satisfied": bool(r.satisfied), "seed": None})
    # body frequencies are measurements; only their monotonicity record is a check
    checked = [rec["satisfied"] for rec in records if rec["satisfied"] is not None]
    ok = all(checked)
    _write(out, "verify.json", _json(cfg, {"records": records, "passed": ok}))
    print(f"verify: {sum(checked)}/{len(checked)} checks satisfied")
    return EXIT_OK if ok else EXIT_FAILED


def _plain_record(op, params, values, satisfied, seed):
    return {"operation": op, "params": params, "estimate": values, "se": None, "bound": None,
            "satisfied": bool(satisfied), "seed": seed}


def run_orient(cfg, out: Path, jobs: int) -> int:
    P = cfg.params
    grid = P["T_grid"]
    if len(grid) < 2:
        raise UsageError("T_grid needs at least two horizons")
    rows = orient_sweep(P["signer"], P["vertices"], grid, P["replicates"], cfg.master_seed, c=P["c"],
                        quantile=P["quantile"], jobs=jobs)
    lo, hi = rows[0], rows[-1]
    ratio = hi["quantile"] / lo["quantile"] if lo["quantile"] > 0 else math.inf
    limit = math.sqrt(hi["T"] / lo["T"])
    ok = ratio < limit
    _write(out, "orient.csv", _csv(cfg, ["T", "quantile", "mean", "max"],
                                   [[r["T"], r["quantile"], r["mean"], r["max"]] for r in rows]))
    _write(out, "orient.json", _json(cfg, {"rows": rows, "ratio": ratio, "ratio_limit": limit, "sublinear": ok}))
    print(f"orient: ratio {ratio:.4g} vs sqrt limit {limit:.4g} -> {'pass' if ok else 'fail'}")
    return EXIT_OK if ok else EXIT_FAILED


RUNNERS = {
    "simulate": run_simulate,
    "lowerbound": run_lowerbound,
    "tree-balance": run_tree_balance,
    "search-distribution": run_search,
    "verify": run_verify,
    "orient": run_orient,
}


def run(config: ExperimentConfig, out, jobs: int = 1) -> int:
    """Execute one configured experiment, writing its files under ``out``."""
    return RUNNERS[config.subcommand](config, Path(out), jobs)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="flat key=value config file")
    common.add_argument("--seed", metavar="U64", help="master seed (overrides the config)")
    common.add_argument("--jobs", metavar="N", type=int, default=1, help="worker processes for replicates")
    common.add_argument("--out", metavar="DIR", default="vecbal-out", help="output directory")
    common.add_argument("overrides", nargs="*", metavar="key=value")
    parser = argparse.ArgumentParser(prog="vecbal", description="Online vector balancing experiments.")
    parser.add_argument("--version", action="version", version=f"vecbal {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SCHEMAS:
        keys = ", ".join(["seed"] + list(SCHEMAS[name]))
        sub.add_parser(name, parents=[common], help=f"run {name}", description=f"config keys: {keys}")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        if args.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        pairs = read_config_file(args.config) if args.config else []
        pairs += parse_overrides(args.overrides)
        cfg = ExperimentConfig.build(args.subcommand, pairs, args.seed)
        return run(cfg, args.out, args.jobs)
    except UsageError as exc:
        print(f"vecbal: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantBreach as exc:
        print(f"vecbal: invariant breach: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except SizingError as exc:
        print(f"vecbal: sizing: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"vecbal: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
