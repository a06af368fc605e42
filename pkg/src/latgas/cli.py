"""``latgas`` command-line front end.

Exit codes: 0 success, 1 criterion unsatisfied, 2 input error,
3 capability error, 4 numerical failure, 5 threshold breach.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from latgas import criteria, exact, hypergraph, ks, recursion
from latgas import sitesets as ss
from latgas.errors import (DegreeExceeded, DepthGuardExceeded, EdgeNotIncident, LatgasError,
                           MissingPotential, ModelError, NoConvergence, SupportTooSmall,
                           VanishingDenominator)
from latgas.fileio import load_hypergraph, load_model, load_params

EXIT_OK, EXIT_UNSATISFIED, EXIT_INPUT, EXIT_CAPABILITY, EXIT_NUMERICAL, EXIT_THRESHOLD = range(6)

_CAPABILITY = (MissingPotential, DegreeExceeded, SupportTooSmall, EdgeNotIncident)
_NUMERICAL = (VanishingDenominator, NoConvergence, DepthGuardExceeded)


class CliError(Exception):
    def __init__(self, message: str, code: int, report: dict | None = None):
        super().__init__(message)
        self.code = code
        self.report = report


@dataclass(frozen=True)
class RunConfig:
    command: str
    input_path: str
    output_path: str | None
    seed: int
    tol: float
    threads: int

    def __post_init__(self):
        if not self.tol > 0:
            raise ModelError(f"--tol must be positive, got {self.tol}")
        if self.threads < 1:
            raise ModelError(f"--threads must be at least 1, got {self.threads}")


def _c(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


def _names(labels, mask):
    return [labels[s] for s in ss.sites_of(mask)]


def _strict(obj):
    """JSON has no infinities; non-finite floats become strings."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _strict(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_strict(v) for v in obj]
    return obj


def _emit(report, cfg: RunConfig, rows: list[dict] | None = None, fmt: str = "json") -> None:
    if fmt == "csv" and rows:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        text = buf.getvalue()
    else:
        text = json.dumps(_strict(report), indent=2, allow_nan=False) + "\n"
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_partition(cfg: RunConfig, args) -> int:
    mf = load_model(cfg.input_path)
    m, q = mf.model, mf.query
    if not args.sweep:
        _emit({"Z": _c(exact.partition_function(m, q))}, cfg)
        return EXIT_OK
    rows, sweep, prefix = [], [], 0
    for s in [None] + ss.sites_of(q.volume):
        if s is not None:
            prefix |= 1 << s
        Zv = exact.partition_function(m, exact.PartitionQuery(q.pinned, prefix, q.boundary))
        sweep.append({"volume": _names(m.labels, prefix), "Z": _c(Zv)})
        rows.append({"size": ss.size(prefix), "last": "" if s is None else m.labels[s],
                     "re": Zv.real, "im": Zv.imag})
    _emit({"sweep": sweep}, cfg, rows, args.format)
    return EXIT_OK


def _site_params(args, labels):
    if not args.params:
        raise ModelError(f"--criterion {args.criterion} needs --params")
    return load_params(args.params, labels)


def cmd_check(cfg: RunConfig, args) -> int:
    crit = args.criterion
    if crit in ("galvin", "bencs-buys"):
        h, z = load_hypergraph(cfg.input_path)
        Delta = args.Delta
        if Delta is None:
            Delta = max((h.degree(x) for x in range(h.n) if not h.forbidden(x)), default=0)
        check = hypergraph.galvin_check if crit == "galvin" else hypergraph.bencs_buys_check
        report = check(h, z, Delta)
    else:
        m = load_model(cfg.input_path).model
        if crit == "dobrushin":
            report = criteria.dobrushin(m, _site_params(args, m.labels))
        elif crit == "kp":
            report = criteria.kp_like(m, _site_params(args, m.labels))
        elif crit == "kp-auto":
            report = criteria.kp_auto(m)
        else:
            report = criteria.gms(m)
    _emit(report.to_json(), cfg)
    return EXIT_OK if report.overall else EXIT_UNSATISFIED


def _kappa_table(model, support):
    """``z^X κ(X)`` for every ``X`` inside ``support``, compressed order."""
    return exact._weights(model, support, 0, 0)


def _ks_run(model, volume, support, cfg):
    res = ks.picard_solve(model, volume, support, tol=cfg.tol)
    mu = ks.mu_recover(res.table, volume)
    mu0 = mu.values[0]
    exact._check_denominator(model, mu0, volume)
    dev = float(np.max(np.abs(mu.values / mu0 - _kappa_table(model, support))))
    return res, dev


def cmd_ks_solve(cfg: RunConfig, args) -> int:
    mf = load_model(cfg.input_path)
    m, volume = mf.model, mf.query.volume
    res, dev = _ks_run(m, volume, m.lattice, cfg)
    report = {"volume": _names(m.labels, volume), "iterations": res.iterations,
              "residual": res.residual, "mu_residual": dev,
              "table": res.table.to_json(list(m.labels))}
    rows = [{"subset": " ".join(e["subset"]), "re": e["re"], "im": e["im"]}
            for e in report["table"]["entries"]]
    _emit(report, cfg, rows, args.format)
    return EXIT_OK


def _crosscheck_params(args, m):
    if args.params:
        return load_params(args.params, m.labels)
    return criteria.kp_auto(m).params


def cmd_crosscheck(cfg: RunConfig, args) -> int:
    mf = load_model(cfg.input_path)
    m, volume = mf.model, mf.query.volume
    params = _crosscheck_params(args, m)
    rep = criteria.dobrushin(m, params)
    if not rep.overall:
        bad = rep.failing()[0]
        raise CliError(f"Dobrushin criterion fails at site {m.labels[bad.site]}",
                       EXIT_UNSATISFIED, rep.to_json())
    res, _ = _ks_run(m, volume, m.lattice, cfg)
    rows, worst = [], 0.0
    for x in ss.sites_of(m.lattice & ~volume):
        a = exact.effective_activity(m, x, volume)
        b = recursion.recursive_effective_activity(m, x, volume)
        c = res[1 << x]
        dev = max(abs(a - b), abs(a - c), abs(b - c))
        worst = max(worst, dev)
        rows.append({"site": m.labels[x], "exact_re": a.real, "exact_im": a.imag,
                     "recursion_re": b.real, "recursion_im": b.imag,
                     "ks_re": c.real, "ks_im": c.imag, "deviation": dev})
    report = {"volume": _names(m.labels, volume), "sites": rows, "max_deviation": worst,
              "max_dev": args.max_dev}
    _emit(report, cfg, rows, args.format)
    return EXIT_THRESHOLD if worst > args.max_dev else EXIT_OK


def cmd_recursion_check(cfg: RunConfig, args) -> int:
    mf = load_model(cfg.input_path)
    m, volume, boundary = mf.model, mf.query.volume, mf.query.boundary
    rows, worst = [], 0.0
    for x in ss.sites_of(m.lattice & ~(volume | boundary)):
        trace: list = []
        a = exact.effective_activity(m, x, volume, boundary)
        b = recursion.recursive_effective_activity(m, x, volume, boundary, trace=trace)
        worst = max(worst, abs(a - b))
        rows.append({"site": m.labels[x], "exact_re": a.real, "exact_im": a.imag,
                     "recursion_re": b.real, "recursion_im": b.imag,
                     "deviation": abs(a - b), "calls": len(trace),
                     "depth": max(t.depth for t in trace)})
    report = {"volume": _names(m.labels, volume), "boundary": _names(m.labels, boundary),
              "sites": rows, "max_deviation": worst, "max_dev": args.max_dev}
    _emit(report, cfg, rows, args.format)
    return EXIT_THRESHOLD if worst > args.max_dev else EXIT_OK


def cmd_scan(cfg: RunConfig, args) -> int:
    h, _ = load_hypergraph(cfg.input_path)
    if args.Delta is None:
        raise ModelError("scan needs --Delta")
    if args.samples < 1:
        raise ModelError("--samples must be positive")
    rule = args.rule.replace("-", "_")
    rep = hypergraph.polydisc_scan(h, rule, args.Delta, args.samples, cfg.seed,
                                   workers=cfg.threads)
    _emit(rep.to_json(), cfg)
    return EXIT_OK if rep.ok else EXIT_UNSATISFIED


COMMANDS = {
    "partition": cmd_partition,
    "check": cmd_check,
    "ks-solve": cmd_ks_solve,
    "crosscheck": cmd_crosscheck,
    "scan": cmd_scan,
    "recursion-check": cmd_recursion_check,
}


def _threads_default() -> int:
    raw = os.environ.get("LATGAS_THREADS", "1")
    try:
        return int(raw)
    except ValueError:
        return 0  # rejected by RunConfig


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", required=True)
    common.add_argument("--output")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=1e-12)
    common.add_argument("--threads", type=int, default=None)
    common.add_argument("--format", choices=("json", "csv"), default="json")

    p = argparse.ArgumentParser(prog="latgas", description="Zero-free checks for lattice gases.")
    sub = p.add_subparsers(dest="command", required=True)
    sp = sub.add_parser("partition", parents=[common], help="partition function of the query")
    sp.add_argument("--sweep", action="store_true", help="every prefix of the volume")
    sp = sub.add_parser("check", parents=[common], help="evaluate a criterion")
    sp.add_argument("--criterion", required=True,
                    choices=("dobrushin", "kp", "kp-auto", "gms", "galvin", "bencs-buys"))
    sp.add_argument("--params")
    sp.add_argument("--Delta", type=float)
    sub.add_parser("ks-solve", parents=[common], help="Picard solve of the KS hierarchy")
    sp = sub.add_parser("crosscheck", parents=[common], help="exact vs recursion vs KS")
    sp.add_argument("--params")
    sp.add_argument("--max-dev", type=float, default=1e-9)
    sp = sub.add_parser("recursion-check", parents=[common], help="recursion vs exact")
    sp.add_argument("--max-dev", type=float, default=1e-9)
    sp = sub.add_parser("scan", parents=[common], help="Monte Carlo polydisc scan")
    sp.add_argument("--rule", required=True, choices=("galvin", "bencs-buys"))
    sp.add_argument("--Delta", type=float)
    sp.add_argument("--samples", type=int, default=10_000)
    return p


def _fail(message: str, code: int, report=None) -> int:
    payload = {"error": message, "exit_code": code}
    if report is not None:
        payload["report"] = report
    sys.stderr.write(json.dumps(_strict(payload)) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_INPUT if err.code else EXIT_OK
    try:
        threads = args.threads if args.threads is not None else _threads_default()
        cfg = RunConfig(args.command, args.input, args.output, args.seed, args.tol, threads)
        return COMMANDS[args.command](cfg, args)
    except CliError as err:
        return _fail(str(err), err.code, err.report)
    except NoConvergence as err:
        return _fail(str(err), EXIT_NUMERICAL, {"residuals": err.residuals})
    except VanishingDenominator as err:
        return _fail(str(err), EXIT_NUMERICAL,
                     {"path": [[x, ss.sites_of(v)] for x, v in err.path]})
    except _NUMERICAL as err:
        return _fail(str(err), EXIT_NUMERICAL)
    except _CAPABILITY as err:
        return _fail(str(err), EXIT_CAPABILITY)
    except (ModelError, LatgasError) as err:
        return _fail(str(err), EXIT_INPUT)


if __name__ == "__main__":
    sys.exit(main())
