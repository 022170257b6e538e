#!/usr/bin/env python3
"""Runs small single and multi grids through the CLI and recomputes aggregate.csv from summary.csv."""

import argparse
import csv
import json
import math
import statistics
import subprocess
import sys
from pathlib import Path

TOL = 1e-9

SINGLE = {
    "optimizer": {"steps": 300, "learning_rate": 0.01},
    "single": {"length": 64, "frequency_steps": 3, "snr_steps": 3, "seed_count": 2},
}
MULTI = {
    "optimizer": {"steps": 200},
    "multi": {"length": 64, "component_counts": [2, 8], "draws": 4},
}


def read_rows(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def close(a, b):
    if math.isnan(a) and math.isnan(b):
        return True
    if math.isinf(a) or math.isinf(b):
        return a == b
    return abs(a - b) <= TOL * max(1.0, abs(b))


def db(x):
    return 10.0 * math.log10(x) if x > 0 else math.nan


def stats(values):
    if not values:
        return math.nan, math.nan
    return statistics.fmean(values), statistics.median(values)


def expected_single(summary, length):
    out = {}
    for snr in dict.fromkeys(r["snr_db"] for r in summary):
        rows = [r for r in summary if r["snr_db"] == snr]
        errs = [float(r["freq_sq_error"]) for r in rows if r["status"] == "ok"]
        m, med = stats(errs)
        s = float(snr)
        if math.isfinite(s):
            eta = 10.0 ** (s / 10.0)
            crlb = db(12.0 / (eta * length * (length * length - 1)))
        else:
            crlb = math.nan
        out[snr] = {"runs": len(rows), "failures": len(rows) - len(errs), "mean_sq_error": m,
                    "median_sq_error": med, "mean_db": db(m), "median_db": db(med),
                    "crlb_db": crlb}
    return out


def expected_multi(summary):
    out = {}
    for key in dict.fromkeys((r["components"], r["model"]) for r in summary):
        rows = [r for r in summary if (r["components"], r["model"]) == key]
        ok = [r for r in rows if r["status"] == "ok"]
        m, med = stats([float(r["spectral_mse_db"]) for r in ok])
        _, med_init = stats([float(r["init_spectral_mse_db"]) for r in ok])
        out[key] = {"runs": len(rows), "failures": len(rows) - len(ok), "mean_db": m,
                    "median_db": med, "median_init_db": med_init}
    return out


def compare(name, expected, aggregate, key_of):
    bad = 0
    if len(expected) != len(aggregate):
        print(f"{name}: {len(aggregate)} aggregate rows, expected {len(expected)}")
        return 1
    for row in aggregate:
        exp = expected.get(key_of(row))
        if exp is None:
            print(f"{name}: unexpected aggregate row {key_of(row)}")
            bad += 1
            continue
        for col, value in exp.items():
            got = float(row[col])
            if not close(got, float(value)):
                print(f"{name} {key_of(row)} {col}: file {got!r}, recomputed {value!r}")
                bad += 1
    return bad


def run(cli, experiment, overrides, work):
    cfg_path = work / f"{experiment}.json"
    out = work / experiment
    cfg_path.write_text(json.dumps(overrides))
    subprocess.run([cli, experiment, "--config", str(cfg_path), "--out", str(out), "--no-traces"],
                   check=True, stdout=subprocess.DEVNULL)
    return out


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--cli", required=True)
    p.add_argument("--work", required=True, type=Path)
    args = p.parse_args()
    args.work.mkdir(parents=True, exist_ok=True)

    bad = 0
    out = run(args.cli, "single", SINGLE, args.work)
    bad += compare("single", expected_single(read_rows(out / "summary.csv"),
                                             SINGLE["single"]["length"]),
                   read_rows(out / "aggregate.csv"), lambda r: r["snr_db"])

    out = run(args.cli, "multi", MULTI, args.work)
    bad += compare("multi", expected_multi(read_rows(out / "summary.csv")),
                   read_rows(out / "aggregate.csv"), lambda r: (r["components"], r["model"]))

    print("aggregates match" if bad == 0 else f"{bad} mismatches")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
