"""CSV ingestion and serialization.

One interchange format: RFC-4180-style comma-separated UTF-8 text with a
single header row.  Chromatogram files carry one sample per row, the first
column holding the sample id; metadata files carry the same ids plus one
categorical column per factor.  Floats are written with 17 significant
digits so a write/read round trip is exact.
"""

import csv

import numpy as np

from .design import DesignSpec, Factor
from .errors import IdMismatch, ParseError, RaggedRows
from .glm import AnovaRow, AnovaTable

__all__ = [
    "read_chromatograms",
    "write_chromatograms",
    "read_metadata",
    "load_dataset",
    "read_complex_matrix",
    "write_complex_matrix",
    "write_anova_csv",
    "read_anova_csv",
    "write_real_matrix_csv",
    "write_jitter_table",
    "read_design_spec",
]

FLOAT_FMT = "{:.17g}"


def _read_rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or len(rows) < 2:
        raise ParseError(f"{path}: expected a header row and at least one data row",
                         line=1)
    return rows


def _parse_float(token, line, column, path):
    try:
        return float(token)
    except ValueError:
        raise ParseError(
            f"{path}: cannot parse '{token}' as a number (line {line}, column {column})",
            line=line, column=column,
        ) from None


def read_chromatograms(path):
    """Read a sample-per-row intensity matrix.

    Returns (ids, axis_labels, values) where values is a real N x M array.
    """
    rows = _read_rows(path)
    header = rows[0]
    width = len(header)
    axis_labels = tuple(header[1:])
    ids, data = [], []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != width:
            raise RaggedRows(
                f"{path}: row {i} has {len(row)} fields, expected {width}", row=i
            )
        ids.append(row[0])
        data.append([_parse_float(tok, i, j + 2, path)
                     for j, tok in enumerate(row[1:])])
    if len(set(ids)) != len(ids):
        dupes = sorted({s for s in ids if ids.count(s) > 1})
        raise ParseError(f"{path}: duplicate sample ids {dupes}")
    return tuple(ids), axis_labels, np.array(data, dtype=float)


def write_chromatograms(path, ids, values, axis_labels=None):
    values = np.asarray(values)
    if axis_labels is None:
        axis_labels = [f"t{j}" for j in range(values.shape[1])]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample", *axis_labels])
        for sid, row in zip(ids, values):
            writer.writerow([sid, *(FLOAT_FMT.format(v) for v in row)])


def read_metadata(path):
    """Read sample ids plus categorical factor columns.

    Returns (ids, factor_names, label_columns) with labels kept as strings.
    """
    rows = _read_rows(path)
    header = rows[0]
    if len(header) < 2:
        raise ParseError(f"{path}: metadata needs an id column and at least one factor",
                         line=1)
    factor_names = tuple(header[1:])
    ids, columns = [], [[] for _ in factor_names]
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise RaggedRows(
                f"{path}: row {i} has {len(row)} fields, expected {len(header)}", row=i
            )
        if any(tok.strip() == "" for tok in row):
            raise ParseError(f"{path}: empty cell on line {i}", line=i)
        ids.append(row[0])
        for j, tok in enumerate(row[1:]):
            columns[j].append(tok)
    if len(set(ids)) != len(ids):
        dupes = sorted({s for s in ids if ids.count(s) > 1})
        raise ParseError(f"{path}: duplicate sample ids {dupes}")
    return tuple(ids), factor_names, [tuple(c) for c in columns]


def read_design_spec(path, ids_order, interactions=()):
    """Build a DesignSpec from a metadata file, aligned to ``ids_order``.

    String labels are mapped to integer codes in sorted label order, with
    the original strings retained as level names.
    """
    meta_ids, names, columns = read_metadata(path)
    missing_meta = [s for s in ids_order if s not in set(meta_ids)]
    missing_data = [s for s in meta_ids if s not in set(ids_order)]
    if missing_meta or missing_data:
        raise IdMismatch(
            f"{path}: sample ids disagree with the data file "
            f"(missing in metadata: {missing_meta[:5]}, "
            f"missing in data: {missing_data[:5]})",
            missing_in_metadata=missing_meta,
            missing_in_data=missing_data,
        )
    position = {s: k for k, s in enumerate(meta_ids)}
    order = [position[s] for s in ids_order]
    factors = []
    for name, col in zip(names, columns):
        aligned = [col[k] for k in order]
        levels = sorted(set(aligned))
        code = {lab: i for i, lab in enumerate(levels)}
        factors.append(Factor.from_labels(
            name, [code[lab] for lab in aligned],
            level_names={i: lab for lab, i in code.items()},
        ))
    return DesignSpec(factors=tuple(factors), interactions=tuple(interactions))


def load_dataset(chromatogram_path, metadata_path, interactions=()):
    """Load intensities and design together, joined on sample id.

    Returns (values, spec, ids): values is complex N x M with zero
    imaginary part, rows in the chromatogram file's order.
    """
    ids, _, values = read_chromatograms(chromatogram_path)
    spec = read_design_spec(metadata_path, ids, interactions=interactions)
    return values.astype(np.complex128), spec, ids


def write_complex_matrix(path, ids, values):
    """Complex matrix as alternating re/im columns per bin."""
    values = np.asarray(values, dtype=np.complex128)
    header = ["sample"]
    for j in range(values.shape[1]):
        header += [f"k{j}_re", f"k{j}_im"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for sid, row in zip(ids, values):
            cells = [sid]
            for v in row:
                cells += [FLOAT_FMT.format(v.real), FLOAT_FMT.format(v.imag)]
            writer.writerow(cells)


def read_complex_matrix(path):
    rows = _read_rows(path)
    header = rows[0]
    if (len(header) - 1) % 2 != 0:
        raise ParseError(f"{path}: expected paired re/im columns", line=1)
    m = (len(header) - 1) // 2
    ids, data = [], []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise RaggedRows(
                f"{path}: row {i} has {len(row)} fields, expected {len(header)}", row=i
            )
        ids.append(row[0])
        vals = [_parse_float(tok, i, j + 2, path) for j, tok in enumerate(row[1:])]
        data.append([complex(vals[2 * k], vals[2 * k + 1]) for k in range(m)])
    return tuple(ids), np.array(data, dtype=np.complex128)


def write_real_matrix_csv(path, column_names, values, row_ids=None):
    """Generic real matrix with named columns (scores, loadings, views)."""
    values = np.asarray(values, dtype=float)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        if row_ids is None:
            writer.writerow(list(column_names))
            for row in values:
                writer.writerow([FLOAT_FMT.format(v) for v in row])
        else:
            writer.writerow(["sample", *column_names])
            for sid, row in zip(row_ids, values):
                writer.writerow([sid, *(FLOAT_FMT.format(v) for v in row)])


def write_anova_csv(path, table):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(table.to_csv())


def read_anova_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        rows = list(reader)
    if not rows or tuple(rows[0]) != AnovaTable.COLUMNS:
        raise ParseError(f"{path}: unexpected header {rows[0] if rows else '(none)'}",
                         line=1)
    parsed = []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(AnovaTable.COLUMNS):
            raise RaggedRows(f"{path}: row {i} has {len(row)} fields", row=i)
        parsed.append(AnovaRow(
            term=row[0],
            sum_sq=_parse_float(row[1], i, 2, path),
            perc_sum_sq=_parse_float(row[2], i, 3, path),
            df=int(row[3]),
            mean_sq=_parse_float(row[4], i, 5, path),
            f=None if row[5] == "" else _parse_float(row[5], i, 6, path),
            p_value=None if row[6] == "" else _parse_float(row[6], i, 7, path),
        ))
    return AnovaTable(rows=tuple(parsed), n_permutations=0)


def write_jitter_table(path, trials):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["jitter", "trial", "z_time", "z_freq"])
        for t in trials:
            writer.writerow([t.jitter, t.trial,
                             FLOAT_FMT.format(t.z_time), FLOAT_FMT.format(t.z_freq)])
