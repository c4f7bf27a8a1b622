"""Batch front end: JSON job configs in, JSON reports or CSV tables out.

Exit status is 0 on success (unknown verdicts included), 1 when an internal
consistency check fails and 2 when the config cannot be used.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

from .seqspace import DyadicSeq, NormParams, b_norm, besov_sup_norm, n_norm_morrey, n_norm_star
from .phi import phi_from_json
from .verdict import InvariantViolation, SpaceSpec, Verdict, decide
from .witness import (
    WitnessUnavailable,
    build_family_binf,
    build_family_filling,
    build_family_single_cube,
    probe_compactness,
    random_seq,
    select_witness,
)

TASKS = ("verdict", "norms", "sweep", "witness", "selftest")
MAX_J = 60
MAX_SWEEP_POINTS = 100_000


class ConfigError(ValueError):
    pass


def _num(x) -> float:
    if isinstance(x, str) and x.lower() in ("inf", "infinity"):
        return math.inf
    return float(x)


def _dump(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


# --------------------------------------------------------------------- tasks


def _spaces(cfg: dict) -> tuple[SpaceSpec, SpaceSpec]:
    try:
        return SpaceSpec.from_json(cfg["source"]), SpaceSpec.from_json(cfg["target"])
    except KeyError as exc:
        raise ConfigError(f"missing field {exc}") from None


def task_verdict(cfg: dict) -> dict:
    src, tgt = _spaces(cfg)
    return {"source": src.to_json(), "target": tgt.to_json(), "verdict": decide(src, tgt).to_json()}


def task_norms(cfg: dict) -> dict:
    if "sequence" in cfg:
        lam = DyadicSeq.from_json(cfg["sequence"])
    elif "random" in cfg:
        r = cfg["random"]
        lam = random_seq(int(cfg.get("seed", 0)), int(r.get("d", 1)), int(r.get("J", 4)),
                         float(r.get("density", 0.5)), r.get("distribution", "uniform01"))
    else:
        raise ConfigError("norms task needs 'sequence' or 'random'")
    if lam.J > MAX_J:
        raise ConfigError(f"J={lam.J} exceeds the guard {MAX_J}")
    try:
        pdoc = cfg["params"]
        params = NormParams(float(pdoc["s"]), _num(pdoc["p"]), _num(pdoc.get("q", "inf")),
                            phi_from_json(pdoc["phi"], lam.d))
    except KeyError as exc:
        raise ConfigError(f"missing field {exc}") from None
    return {
        "sequence": lam.to_json(),
        "norms": {
            "n_norm_star": n_norm_star(lam, params),
            "n_norm_morrey": n_norm_morrey(lam, params),
            "b_norm": b_norm(lam, params),
            "besov_sup_norm": besov_sup_norm(lam, params.s, params.q),
        },
    }


def _set_param(src: SpaceSpec, tgt: SpaceSpec, name: str, value: float) -> tuple[SpaceSpec, SpaceSpec]:
    side, _, attr = name.partition(".")
    if side not in ("source", "target") or attr not in ("s", "p", "q", "r"):
        raise ConfigError(f"cannot sweep over {name!r}")
    if side == "source":
        return replace(src, **{attr: value}), tgt
    return src, replace(tgt, **{attr: value})


def _sweep_values(sw: dict) -> list[float]:
    start, stop, step = float(sw["start"]), float(sw["stop"]), float(sw["step"])
    if step <= 0 or stop < start:
        raise ConfigError("sweep range must be non-empty with a positive step")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    if n > MAX_SWEEP_POINTS:
        raise ConfigError("sweep has too many points")
    return [round(start + i * step, 12) for i in range(n)]


def _sweep_point(args) -> tuple[float, Verdict]:
    src, tgt, name, value = args
    s, t = _set_param(src, tgt, name, value)
    return value, decide(s, t)


def task_sweep(cfg: dict, jobs: int = 1) -> list[tuple[float, Verdict]]:
    src, tgt = _spaces(cfg)
    sw = cfg.get("sweep")
    if not sw:
        raise ConfigError("sweep task needs a 'sweep' block")
    name = sw.get("param", "target.s")
    work = [(src, tgt, name, v) for v in _sweep_values(sw)]
    _set_param(src, tgt, name, work[0][3])
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_sweep_point, work, chunksize=max(1, len(work) // (4 * jobs))))
    return [_sweep_point(w) for w in work]


def sweep_csv(rows: list[tuple[float, Verdict]], param: str) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([param, "continuous", "compact", "rules"])
    for value, v in rows:
        w.writerow([repr(value), v.continuous.value, v.compact.value, ";".join(v.rules)])
    return buf.getvalue()


def task_witness(cfg: dict):
    src, tgt = _spaces(cfg)
    J = int(cfg.get("J", 40))
    if J > MAX_J:
        raise ConfigError(f"J={J} exceeds the guard {MAX_J}")
    wd = cfg.get("witness", {})
    kind = wd.get("construction", "auto")
    K = int(wd.get("K", 6))
    levels = wd.get("levels", [4 * k for k in range(1, K + 1)])
    try:
        if kind == "auto":
            fam = select_witness(src, tgt, J, K)
        elif kind == "single_cube":
            fam = build_family_single_cube(src, levels, wd.get("scaling", "source_normalized"), tgt, J)
        elif kind == "filling":
            fam = build_family_filling(src, int(wd["j0"]), levels, s2=tgt.s, J=J)
        elif kind == "binf":
            fam = build_family_binf(src, levels, J)
        else:
            raise ConfigError(f"unknown construction {kind!r}")
    except WitnessUnavailable as exc:
        return {"witness": "unavailable", "reason": str(exc)}
    return probe_compactness(fam, src, tgt)


def task_selftest(out=None) -> bool:
    from .acceptance import run_all

    ok = True
    for res in run_all():
        print(res.line(), file=out)
        ok &= res.passed
    return ok


# --------------------------------------------------------------------- driver


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    with os.fdopen(fd, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def run(cfg: dict, fmt: str = "json", jobs: int = 1, out: str | None = None) -> int:
    """Execute one job; returns the process exit status."""
    task = cfg.get("task")
    if task not in TASKS:
        raise ConfigError(f"task must be one of {TASKS}, got {task!r}")
    if task == "selftest":
        return 0 if task_selftest() else 1
    if task == "verdict":
        text = _dump(task_verdict(cfg))
    elif task == "norms":
        text = _dump(task_norms(cfg))
    elif task == "sweep":
        rows = task_sweep(cfg, jobs)
        param = cfg["sweep"].get("param", "target.s")
        if fmt == "csv":
            text = sweep_csv(rows, param)
        else:
            text = _dump([{param: v, **verdict.to_json()} for v, verdict in rows])
    else:
        rep = task_witness(cfg)
        if isinstance(rep, dict):
            text = _dump(rep)
        elif fmt == "csv":
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["k", "source_norm", "gap"])
            w.writerows([(k, repr(a), repr(b)) for k, a, b in rep.csv_rows()])
            text = buf.getvalue()
        else:
            text = _dump(rep.to_json())
    _write(text, out or cfg.get("output"))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="morreyemb", description=__doc__.splitlines()[0])
    ap.add_argument("--config", help="path to a JSON job config")
    ap.add_argument("--out", help="write the report here instead of stdout")
    ap.add_argument("--format", choices=("json", "csv"), default="json")
    ap.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    ap.add_argument("--selftest", action="store_true", help="run the acceptance checks")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.selftest:
        return 0 if task_selftest() else 1
    if not args.config:
        print("error: --config is required unless --selftest is given", file=sys.stderr)
        return 2
    if args.jobs < 1:
        print("error: --jobs must be at least 1", file=sys.stderr)
        return 2
    try:
        with open(args.config) as fh:
            cfg = json.load(fh)
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
        return run(cfg, args.format, args.jobs, args.out)
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError, ValueError, KeyError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
