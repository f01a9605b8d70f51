"""CSV/JSON persistence for samples, selection traces and fixtures.

Floats are written with 17 significant digits so every value round-trips
exactly.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from petdensity.errors import DomainError
from petdensity.estimator import SelectionTrace
from petdensity.models import DensityModel, Sample


def fmt(value: float) -> str:
    return format(float(value), ".17g")


def sidecar(path) -> Path:
    return Path(path).with_suffix(".json")


def write_json(path, data) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def write_rows(path, header: list[str], rows) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


def read_rows(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def write_sample(sample: Sample, path) -> Path:
    """Write ``s_1..s_d,u`` rows plus a ``{model, n, seed}`` JSON sidecar."""
    d = sample.model.dim
    header = [f"s_{k + 1}" for k in range(d)] + ["u"]
    rows = ([*s, u] for s, u in zip(sample.directions.tolist(), sample.offsets.tolist()))
    write_rows(path, header, ([float(v) for v in r] for r in rows))
    meta = sidecar(path)
    write_json(meta, {"model": sample.model.to_dict(), "n": len(sample), "seed": sample.seed})
    return meta


def read_sample(path) -> Sample:
    meta = read_json(sidecar(path))
    model = DensityModel.from_dict(meta["model"])
    d = model.dim
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        expected = [f"s_{k + 1}" for k in range(d)] + ["u"]
        if header != expected:
            raise DomainError(f"unexpected sample header {header}, expected {expected}")
        values = [[float(v) for v in row] for row in reader if row]
    arr = np.array(values, dtype=float).reshape(-1, d + 1)
    if arr.shape[0] != int(meta["n"]):
        raise DomainError(f"sample file has {arr.shape[0]} rows, metadata says {meta['n']}")
    return Sample(arr[:, :d], arr[:, d], int(meta["seed"]), model)


TRACE_HEADER = ["m", "f_hat", "mu_hat", "v_hat", "a_hat"]


def write_trace(trace: SelectionTrace, path) -> Path:
    rows = ([r.m, r.f_hat, r.mu_hat, r.v_hat, r.a_hat] for r in trace.per_m)
    write_rows(path, TRACE_HEADER, rows)
    meta = sidecar(path)
    write_json(meta, trace.summary())
    return meta


def read_trace_rows(path) -> list[dict[str, float]]:
    return [{k: float(v) for k, v in row.items()} for row in read_rows(path)]


FIXTURE_HEADER = ["quantity", "params", "value", "tolerance"]


def encode_params(params: dict) -> str:
    return ";".join(f"{k}={v}" for k, v in params.items())


def decode_params(text: str) -> dict[str, str]:
    return dict(item.split("=", 1) for item in text.split(";") if item)


def write_fixtures(path, rows) -> None:
    write_rows(path, FIXTURE_HEADER,
               ([q, encode_params(p), float(v), float(t)] for q, p, v, t in rows))


def read_fixtures(path) -> list[dict]:
    out = []
    for row in read_rows(path):
        out.append({"quantity": row["quantity"], "params": decode_params(row["params"]),
                    "value": float(row["value"]), "tolerance": float(row["tolerance"])})
    return out
