"""Sweep execution and output writing."""
from __future__ import annotations

import csv
import io
import json
import os
import platform
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import __version__, core, fisher
from .config import OUT_ENV, ScenarioConfig
from .protocols import evaluate


@dataclass
class RunOutput:
    config: ScenarioConfig
    records: list[dict]
    provenance: dict
    csv_path: Path | None = None
    provenance_path: Path | None = None

    @property
    def ok(self) -> bool:
        return not any(r.get("violations") for r in self.records)

    @property
    def n_errors(self) -> int:
        return sum(1 for r in self.records if r.get("error"))


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sample_counts(records: list[dict], shots: int, seed: int) -> None:
    """Multinomial counts from exact distributions, drawn in grid order."""
    rng = np.random.default_rng(seed)
    for rec in records:
        p = rec.get("distribution")
        if p is None or rec.get("error"):
            rec["counts"] = None
            continue
        p = np.clip(np.asarray(p, dtype=float), 0, None)
        rec["counts"] = [int(c) for c in rng.multinomial(shots, p / p.sum())]


def resolve_out_dir(config: ScenarioConfig, out: str | None = None) -> Path:
    """Flag beats environment beats config beats ``./results``."""
    return Path(out or os.environ.get(OUT_ENV) or config.output or "results")


def run(config: ScenarioConfig, out: str | None = None, jobs: int = 1, write: bool = True) -> RunOutput:
    points = config.points()
    params = config.merged_params()
    args = [(config.protocol, p, params, config.seed) for p in points]
    if jobs > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(evaluate, *a) for a in args]
            # merge in grid order whatever the completion order
            records = [f.result() for f in futures]
    else:
        records = [evaluate(*a) for a in args]
    if config.shots is not None:
        sample_counts(records, config.shots, config.seed)

    provenance = {
        "package": "trmetro",
        "version": __version__,
        "numpy": np.__version__,
        "python": platform.python_version(),
        "config": config.as_dict(),
        "effective_params": params,
        "tolerances": {
            "norm": core.NORM_TOL,
            "hermitian": core.HERMITIAN_TOL,
            "psd_floor": core.PSD_FLOOR,
            "fock_tail": core.TAIL_TOL,
            "probability_floor": fisher.PROB_FLOOR,
            "sld_cutoff": fisher.SLD_CUTOFF,
        },
        "n_points": len(records),
        "n_errors": sum(1 for r in records if r.get("error")),
        "violations": [{"index": i, "problems": r["violations"]}
                       for i, r in enumerate(records) if r.get("violations")],
    }
    result = RunOutput(config, records, provenance)
    if write:
        out_dir = resolve_out_dir(config, out)
        result.csv_path = out_dir / f"{config.protocol}.csv"
        result.provenance_path = out_dir / f"{config.protocol}.provenance.json"
        atomic_write(result.csv_path, to_csv(result))
        atomic_write(result.provenance_path, json.dumps(provenance, indent=2, sort_keys=True) + "\n")
    return result


def _columns(result: RunOutput) -> tuple[list[str], list[str]]:
    axes = list(result.config.grid)
    extras = []
    for r in result.records:
        for k in (r.get("extra") or {}):
            if k not in extras:
                extras.append(k)
    return axes, extras


def to_csv(result: RunOutput) -> str:
    axes, extras = _columns(result)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = ["index", *axes, "fi", "qfi", "success_prob", "theoretical_max", *extras, "distribution"]
    if result.config.shots is not None:
        header.append("counts")
    header += ["warnings", "violations", "error"]
    w.writerow(header)
    for i, r in enumerate(result.records):
        ex = r.get("extra") or {}
        dist = r.get("distribution")
        row = [i, *(_fmt(r["point"][a]) for a in axes),
               _fmt(r.get("fi")), _fmt(r.get("qfi")), _fmt(r.get("success_prob")),
               _fmt(r.get("theoretical_max")), *(_fmt(ex.get(k)) for k in extras),
               "" if dist is None else ";".join(repr(x) for x in dist)]
        if result.config.shots is not None:
            c = r.get("counts")
            row.append("" if c is None else ";".join(map(str, c)))
        row += ["; ".join(r.get("warnings") or []), "; ".join(r.get("violations") or []), r.get("error") or ""]
        w.writerow(row)
    return buf.getvalue()


def _short(x) -> str:
    if x is None:
        return "-"
    return f"{x:.6g}"


def table(result: RunOutput) -> str:
    """Human-readable summary, one line per grid point."""
    axes, extras = _columns(result)
    cols = [*axes, "fi", "qfi", "success", *extras, "status"]
    lines = ["  ".join(f"{c:>12}" for c in cols)]
    for r in result.records:
        ex = r.get("extra") or {}
        if r.get("error"):
            status = "ERROR " + r["error"]
        elif r.get("violations"):
            status = "FAIL " + "; ".join(r["violations"])
        else:
            status = "ok" + (" (warned)" if r.get("warnings") else "")
        vals = [*(_short(r["point"][a]) for a in axes), _short(r.get("fi")), _short(r.get("qfi")),
                _short(r.get("success_prob")), *(_short(ex.get(k)) for k in extras)]
        lines.append("  ".join(f"{v:>12}" for v in vals) + "  " + status)
    return "\n".join(lines) + "\n"
