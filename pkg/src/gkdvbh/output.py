"""CSV and metadata writers for simulation runs."""

import json
import platform

import numpy as np

from . import __version__

RUN_COLUMNS = ("t", "l2", "h1_semi", "linf", "u_at_1", "bc_res0", "bc_res1", "bc_res2", "newton_iters")


def _fmt(x):
    # 17 significant digits, locale independent
    return f"{float(x):.16e}"


def run_csv_text(record, failure=None):
    """CSV text of a run record; ``failure`` appends a FAILED sentinel line."""
    lines = [",".join(RUN_COLUMNS)]
    for i in range(len(record)):
        row = [record.times[i], record.l2[i], record.h1_semi[i], record.linf[i], record.u_at_1[i],
               *record.bc_residuals[i]]
        lines.append(",".join(_fmt(v) for v in row) + f",{int(record.newton_iters[i])}")
    if failure is not None:
        t, message = failure
        lines.append(f"FAILED,{_fmt(t)},{message.replace(',', ';')}")
    return "\n".join(lines) + "\n"


def write_run_csv(path, record, failure=None):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(run_csv_text(record, failure))


def write_meta(path, config, status="ok", extra=None):
    meta = {
        "config_hash": config.hash(),
        "gkdvbh_version": __version__,
        "numpy_version": np.__version__,
        "python_version": platform.python_version(),
        "status": status,
        "config": config.echo(),
    }
    if config.law.value == "open":
        meta["note"] = "open loop: u(0)=0, u_x(1)=0, u_xx(1)=0 (all feedback gains zero)"
    if extra:
        meta.update(extra)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")
