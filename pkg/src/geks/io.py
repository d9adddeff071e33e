"""TSV ingestion and output, and JSON result documents.

Phenotype TSV: header row; column ``y`` holds 0/1 outcomes, column ``s`` the
environment, every other column is a covariate. Genotype TSV: header row of
SNP names, one row per individual, finite dosages. Row and column numbers in
error messages are 1-based and count data rows (the header is not a row).
"""

from __future__ import annotations

import csv
import json
import logging
import math
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ConstantOutcome, DataError, DimensionMismatch, ParseError
from .null_model import Dataset

logger = logging.getLogger(__name__)


def read_tsv(path) -> tuple[list[str], np.ndarray]:
    path = Path(path)
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh, delimiter="\t") if r and any(c.strip() for c in r)]
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror}", path) from None
    if not rows:
        raise ParseError("file is empty; a header row is required", path)
    header = [h.strip() for h in rows[0]]
    values = np.empty((len(rows) - 1, len(header)))
    for i, row in enumerate(rows[1:], start=1):
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, found {len(row)}", path, row=i)
        for j, cell in enumerate(row, start=1):
            try:
                v = float(cell)
            except ValueError:
                raise ParseError(f"non-numeric value {cell!r}", path, row=i, col=j) from None
            if not math.isfinite(v):
                raise ParseError(f"non-finite value {cell!r}", path, row=i, col=j)
            values[i - 1, j - 1] = v
    return header, values


def load_dataset(pheno_path, geno_path) -> Dataset:
    header, pheno = read_tsv(pheno_path)
    for required in ("y", "s"):
        if required not in header:
            raise ParseError(f"phenotype header lacks a {required!r} column", pheno_path)
    snps, Z = read_tsv(geno_path)
    if Z.shape[0] != pheno.shape[0]:
        raise DimensionMismatch(f"genotype file has {Z.shape[0]} rows, phenotype file has {pheno.shape[0]}")
    y = pheno[:, header.index("y")]
    s = pheno[:, header.index("s")]
    bad = np.flatnonzero(~np.isin(y, (0.0, 1.0)))
    if bad.size:
        raise ParseError("outcome must be 0 or 1", pheno_path, row=int(bad[0]) + 1, col=header.index("y") + 1)
    if np.all(y == y[0]):
        raise ConstantOutcome("outcome y has a single value; cases and controls are both required")
    cov_names = [h for h in header if h not in ("y", "s")]
    cols = [np.ones(len(y))] + [pheno[:, header.index(h)] for h in cov_names]
    names = ["intercept"] + cov_names
    env_col = next((j for j in range(1, len(cols)) if np.array_equal(cols[j], s)), None)
    if env_col is None:
        logger.info("environment column s appended to the covariates")
        cols.append(s)
        names.append("s")
        env_col = len(cols) - 1
    try:
        return Dataset(y, np.column_stack(cols), s, Z, env_col, tuple(snps), tuple(names))
    except DimensionMismatch:
        raise
    except DataError as exc:
        raise DataError(f"{pheno_path}: {exc}") from None


def _fmt(v: float) -> str:
    return repr(float(v))


def write_dataset(data: Dataset, pheno_path, geno_path) -> None:
    """Write phenotype and genotype TSVs that :func:`load_dataset` reads back exactly."""
    cov_idx = [j for j in range(1, data.q) if j != data.env_col]
    cov_names = [data.covariate_names[j] for j in cov_idx]
    with open(pheno_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(["y", *cov_names, "s"])
        for i in range(data.n):
            w.writerow([str(int(data.y[i])), *(_fmt(data.X[i, j]) for j in cov_idx), _fmt(data.s[i])])
    write_matrix(data.Z, geno_path, data.snp_names)


def write_matrix(m: np.ndarray, path, names=None) -> None:
    names = names or [f"c{j + 1}" for j in range(m.shape[1])]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(names)
        for row in m:
            w.writerow([_fmt(v) for v in row])


def load_matrix(path) -> np.ndarray:
    return read_tsv(path)[1]


def load_schema(name: str) -> dict:
    return json.loads(resources.files("geks").joinpath("schemas", name).read_text(encoding="utf-8"))


def write_json(doc: dict, path=None) -> str:
    text = json.dumps(doc, indent=2, sort_keys=False)
    if path is None or str(path) == "-":
        print(text)
    else:
        Path(path).write_text(text + "\n", encoding="utf-8")
    return text
