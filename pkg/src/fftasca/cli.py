"""Command-line front end.

Subcommands:

* ``analyze``    ingest data + metadata, run the permutation GLM in the
                 chosen domain, emit the ANOVA table and per-significant-term
                 component artifacts (CSV + SVG).
* ``simulate``   run the drift-sensitivity experiment on synthetic data.
* ``transform``  forward/inverse transform of a matrix file.
* ``impute``     preview of cell-mean replacement on a peak table.

Exit codes: 0 success, 2 configuration errors, 3 data/parse errors,
4 numeric failures.
"""

import argparse
import datetime
import os
import sys

import numpy as np

from . import io as dataio
from . import plots
from .design import encode, interaction_name
from .errors import (
    ConfigInvalid,
    DegenerateFactor,
    DimensionMismatch,
    DomainError,
    EmptySeries,
    EmptySignal,
    FftascaError,
    IdMismatch,
    LengthMismatch,
    NonConvergence,
    ParseError,
    RaggedRows,
    RankExceeded,
    UnknownTerm,
    ZeroResidual,
)
from .glm import (
    fit,
    impute_cell_means,
    pcmr_permutation_test,
    permutation_test,
    zeros_to_missing,
)
from .linalg import mean_center_columns
from .sca import default_components, effect_to_time, loadings_to_time, real_scores, sca_fit
from .spectral import transform_rows
from .synth import SynthConfig, generate, jitter_experiment

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4

_DATA_ERRORS = (ParseError, IdMismatch, RaggedRows, DegenerateFactor,
                DimensionMismatch, UnknownTerm, EmptySignal, LengthMismatch)
_CONFIG_ERRORS = (ConfigInvalid,)
_NUMERIC_ERRORS = (NonConvergence, ZeroResidual, RankExceeded, DomainError,
                   EmptySeries)


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="fftasca",
        description="Frequency-domain ANOVA-simultaneous component analysis "
                    "of multi-sample separations data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="permutation GLM + component analysis")
    pa.add_argument("chromatograms", help="intensity CSV, one sample per row")
    pa.add_argument("metadata", help="factor CSV sharing the sample ids")
    pa.add_argument("--domain", choices=("time", "freq", "mag"), default="freq",
                    help="analyze raw rows, complex spectra, or bin magnitudes")
    pa.add_argument("--center", action="store_true",
                    help="subtract column means before the analysis")
    pa.add_argument("--permutations", type=int, default=1000)
    pa.add_argument("--seed", type=int, default=0)
    pa.add_argument("--pcmr", action="store_true",
                    help="treat zeros as missing and re-impute cell means "
                         "inside every permutation (time domain only)")
    pa.add_argument("--trim", action="store_true",
                    help="refit keeping only terms significant in the first pass")
    pa.add_argument("--components", type=int, default=None,
                    help="component count per effect (default: 95%% of effect ssq)")
    pa.add_argument("--interactions", action="append", default=[],
                    metavar="A:B", help="interaction of two factor names; repeatable")
    pa.add_argument("--alpha", type=float, default=0.05)
    pa.add_argument("--out-dir", default=None,
                    help="directory for CSV/SVG artifacts (default: table to stdout only)")
    pa.add_argument("--no-timestamp", action="store_true")

    ps = sub.add_parser("simulate", help="time vs frequency drift-sensitivity experiment")
    ps.add_argument("--jitter-grid", default="0:10:50", metavar="START:STEP:STOP")
    ps.add_argument("--trials", type=int, default=20)
    ps.add_argument("--permutations", type=int, default=200)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--effect-size", type=float, default=3.0)
    ps.add_argument("--acquisitions", type=int, default=5000)
    ps.add_argument("--peaks", type=int, default=10)
    ps.add_argument("--significant", type=int, default=5)
    ps.add_argument("--replicates", type=int, default=5,
                    help="samples per level of the two-level factor")
    ps.add_argument("--noise-sd", type=float, default=None)
    ps.add_argument("--dataset-out", default=None, metavar="PREFIX",
                    help="also write one generated dataset as PREFIX_chromatograms.csv "
                         "and PREFIX_metadata.csv")
    ps.add_argument("--out-dir", default=".")
    ps.add_argument("--no-timestamp", action="store_true")

    pt = sub.add_parser("transform", help="row-wise forward/inverse transform of a CSV")
    pt.add_argument("input")
    pt.add_argument("--out", required=True)
    pt.add_argument("--inverse", action="store_true")

    pi = sub.add_parser("impute", help="cell-mean replacement preview for a peak table")
    pi.add_argument("peaks")
    pi.add_argument("metadata")
    pi.add_argument("--out", required=True)
    return parser


def _parse_interactions(tokens, spec):
    pairs = []
    for tok in tokens:
        if ":" not in tok:
            raise ConfigInvalid(f"--interactions expects A:B, got '{tok}'")
        a, b = tok.split(":", 1)
        try:
            pairs.append((spec.factor_index(a), spec.factor_index(b)))
        except KeyError as exc:
            raise ConfigInvalid(f"unknown factor '{exc.args[0]}' in --interactions") from None
    return tuple(pairs)


def _parse_grid(token):
    parts = token.split(":")
    if len(parts) != 3:
        raise ConfigInvalid(f"--jitter-grid expects START:STEP:STOP, got '{token}'")
    try:
        start, step, stop = (int(p) for p in parts)
    except ValueError:
        raise ConfigInvalid(f"--jitter-grid must be integers, got '{token}'") from None
    if step <= 0 or stop < start:
        raise ConfigInvalid("--jitter-grid needs a positive step and stop >= start")
    return list(range(start, stop + 1, step))


def _term_filename(term):
    return term.replace(":", "_x_")


def _group_labels(spec, term):
    """Display label per sample for a factor or interaction term."""
    if ":" in term:
        a, b = term.split(":", 1)
        la = _group_labels(spec, a)
        lb = _group_labels(spec, b)
        return [f"{x}/{y}" for x, y in zip(la, lb)]
    f = spec.factors[spec.factor_index(term)]
    names = f.level_names or {}
    return [str(names.get(lab, lab)) for lab in f.labels]


def _scatter_series(scores, labels):
    series = {}
    for lab in sorted(set(labels)):
        idx = [i for i, v in enumerate(labels) if v == lab]
        if scores.shape[1] >= 2:
            series[lab] = (scores[idx, 0], scores[idx, 1])
        else:
            series[lab] = (np.asarray(idx, dtype=float), scores[idx, 0])
    return series


def _masked_center(x, mask):
    """Column-center using observed entries only; masked cells are untouched."""
    counts = (~mask).sum(axis=0)
    sums = np.where(mask, 0.0, x).sum(axis=0)
    means = np.divide(sums, counts, out=np.zeros_like(sums), where=counts > 0)
    out = x - means
    out[mask] = x[mask]
    return out


def _emit_term_artifacts(args, out_dir, term, decomp, dmatrix, spec, ids, source_len):
    effect = decomp.effect(term)
    cap = decomp.dof[term]
    n_comp = args.components or default_components(effect, cap=max(cap, 1))
    model = sca_fit(effect, decomp.residuals, n_comp, term=term)
    stem = _term_filename(term)

    scores = real_scores(model)
    dataio.write_real_matrix_csv(
        os.path.join(out_dir, f"scores_{stem}.csv"),
        [f"pc{r + 1}" for r in range(n_comp)], scores, row_ids=ids,
    )
    labels = _group_labels(spec, term)
    svg = plots.emit_svg(
        _scatter_series(scores, labels), kind="scatter",
        title=f"scores: {term}",
        x_label="component 1" if n_comp >= 2 else "sample index",
        y_label="component 2" if n_comp >= 2 else "component 1",
    )
    with open(os.path.join(out_dir, f"scores_{stem}.svg"), "w", encoding="utf-8") as fh:
        fh.write(svg)

    if args.domain == "freq":
        view = loadings_to_time(model, source_len)
        dataio.write_real_matrix_csv(
            os.path.join(out_dir, f"loadings_time_{stem}.csv"),
            [f"pc{r + 1}" for r in range(n_comp)], view.loadings_time,
        )
        line_series = {f"pc{r + 1}": view.loadings_time[:, r] for r in range(n_comp)}
        svg = plots.emit_svg(line_series, kind="line",
                             title=f"time-domain loadings: {term}",
                             x_label="acquisition", y_label="loading")
        with open(os.path.join(out_dir, f"loadings_time_{stem}.svg"), "w",
                  encoding="utf-8") as fh:
            fh.write(svg)

        eview = effect_to_time(decomp, term)
        dataio.write_real_matrix_csv(
            os.path.join(out_dir, f"effect_time_{stem}.csv"),
            [f"t{j}" for j in range(eview.effect_time.shape[1])],
            eview.effect_time, row_ids=ids,
        )
        level_means = {}
        for lab in sorted(set(labels)):
            idx = [i for i, v in enumerate(labels) if v == lab]
            level_means[lab] = eview.effect_time[idx].mean(axis=0)
        svg = plots.emit_svg(level_means, kind="line",
                             title=f"time-domain effect: {term}",
                             x_label="acquisition", y_label="intensity")
        with open(os.path.join(out_dir, f"effect_time_{stem}.svg"), "w",
                  encoding="utf-8") as fh:
            fh.write(svg)
    else:
        dataio.write_real_matrix_csv(
            os.path.join(out_dir, f"loadings_{stem}.csv"),
            [f"pc{r + 1}" for r in range(n_comp)], model.loadings.real,
        )
        line_series = {f"pc{r + 1}": model.loadings.real[:, r] for r in range(n_comp)}
        svg = plots.emit_svg(line_series, kind="line",
                             title=f"loadings: {term}",
                             x_label="variable", y_label="loading")
        with open(os.path.join(out_dir, f"loadings_{stem}.svg"), "w",
                  encoding="utf-8") as fh:
            fh.write(svg)


def _cmd_analyze(args):
    x, spec, ids = dataio.load_dataset(args.chromatograms, args.metadata)
    interactions = _parse_interactions(args.interactions, spec)
    if interactions:
        spec = type(spec)(factors=spec.factors, interactions=interactions)
    dmatrix = encode(spec)

    mask = None
    if args.pcmr:
        if args.domain != "time":
            raise ConfigInvalid("--pcmr applies to peak tables and requires --domain time")
        values, mask = zeros_to_missing(x.real)
        x = values.astype(np.complex128)

    if args.center:
        x = _masked_center(x, mask) if mask is not None else mean_center_columns(x)

    if args.domain == "time":
        data = x
    else:
        spectra = transform_rows(x)
        data = spectra.values if args.domain == "freq" else np.abs(spectra.values)
    source_len = x.shape[1]

    if mask is not None:
        table = pcmr_permutation_test(data, mask, dmatrix,
                                      n_permutations=args.permutations, seed=args.seed)
        fitted_input = impute_cell_means(data, mask, dmatrix, warn_empty=False)
    else:
        table = permutation_test(data, dmatrix,
                                 n_permutations=args.permutations, seed=args.seed)
        fitted_input = data

    sys.stdout.write(table.to_text())

    if args.out_dir is None:
        return EXIT_OK
    os.makedirs(args.out_dir, exist_ok=True)
    dataio.write_anova_csv(os.path.join(args.out_dir, "anova.csv"), table)
    with open(os.path.join(args.out_dir, "anova.txt"), "w", encoding="utf-8") as fh:
        fh.write(table.to_text())

    significant = [t for t in dmatrix.terms
                   if table.row(t).p_value is not None
                   and table.row(t).p_value <= args.alpha]
    if significant:
        decomp = fit(fitted_input, dmatrix)
        for term in significant:
            _emit_term_artifacts(args, args.out_dir, term, decomp, dmatrix,
                                 spec, ids, source_len)

    if args.trim:
        kept = [t for t in significant if ":" not in t]
        kept += [t for t in significant
                 if ":" in t and all(p in kept for p in t.split(":", 1))]
        if kept:
            factors = tuple(f for f in spec.factors if f.name in kept)
            remap = {f.name: i for i, f in enumerate(factors)}
            trimmed_spec = type(spec)(
                factors=factors,
                interactions=tuple(
                    (remap[spec.factors[a].name], remap[spec.factors[b].name])
                    for a, b in spec.interactions
                    if interaction_name(spec, (a, b)) in kept
                ),
            )
            trimmed_dm = encode(trimmed_spec)
            if mask is not None:
                trimmed = pcmr_permutation_test(
                    data, mask, trimmed_dm,
                    n_permutations=args.permutations, seed=args.seed)
            else:
                trimmed = permutation_test(
                    data, trimmed_dm,
                    n_permutations=args.permutations, seed=args.seed)
            dataio.write_anova_csv(os.path.join(args.out_dir, "anova_trimmed.csv"),
                                   trimmed)
            with open(os.path.join(args.out_dir, "anova_trimmed.txt"), "w",
                      encoding="utf-8") as fh:
                fh.write(trimmed.to_text())
        else:
            sys.stderr.write("trim requested but no term passed the threshold\n")

    _write_summary(args, args.out_dir, extra={
        "domain": args.domain,
        "permutations": str(table.n_permutations),
        "significant": ",".join(significant) or "(none)",
    })
    return EXIT_OK


def _write_summary(args, out_dir, extra):
    lines = []
    if not args.no_timestamp:
        lines.append(f"# generated: {datetime.datetime.now().isoformat()}")
    lines.append(f"command: {args.command}")
    for k, v in extra.items():
        lines.append(f"{k}: {v}")
    with open(os.path.join(out_dir, "summary.txt"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _cmd_simulate(args):
    levels = _parse_grid(args.jitter_grid)
    config = SynthConfig(
        n_acquisitions=args.acquisitions,
        n_peaks=args.peaks,
        n_significant=args.significant,
        replicates_per_level=args.replicates,
        effect_size=args.effect_size,
        noise_sd=args.noise_sd,
        seed=args.seed,
    )
    config.validate()
    if args.dataset_out:
        data = generate(config)
        dataio.write_chromatograms(f"{args.dataset_out}_chromatograms.csv",
                                   data.sample_ids, data.x_time)
        factor = data.design.factors[0]
        with open(f"{args.dataset_out}_metadata.csv", "w", encoding="utf-8") as fh:
            fh.write("sample,group\n")
            for sid, lab in zip(data.sample_ids, factor.labels):
                fh.write(f"{sid},{factor.level_names[lab]}\n")

    trials = jitter_experiment(config, levels, args.trials,
                               n_permutations=args.permutations, seed=args.seed)
    os.makedirs(args.out_dir, exist_ok=True)
    dataio.write_jitter_table(os.path.join(args.out_dir, "jitter_z.csv"), trials)

    mean_time, mean_freq = [], []
    for j in levels:
        zt = [t.z_time for t in trials if t.jitter == j]
        zf = [t.z_freq for t in trials if t.jitter == j]
        mean_time.append(float(np.mean(zt)))
        mean_freq.append(float(np.mean(zf)))
    grid = np.asarray(levels, dtype=float)
    svg = plots.emit_svg(
        {"time domain": (grid, np.asarray(mean_time)),
         "frequency magnitudes": (grid, np.asarray(mean_freq))},
        kind="line", title="drift sensitivity",
        x_label="max jitter (acquisitions)", y_label="mean z",
    )
    with open(os.path.join(args.out_dir, "jitter_z.svg"), "w", encoding="utf-8") as fh:
        fh.write(svg)
    _write_summary(args, args.out_dir, extra={
        "jitter_levels": ",".join(str(j) for j in levels),
        "trials": str(args.trials),
    })
    return EXIT_OK


def _cmd_transform(args):
    if args.inverse:
        ids, values = dataio.read_complex_matrix(args.input)
        back = np.fft.ifft(values, axis=1)
        residue = float(np.max(np.abs(back.imag))) if back.size else 0.0
        scale = float(np.max(np.abs(back.real))) if back.size else 1.0
        if residue > 1e-6 * max(scale, 1.0):
            sys.stderr.write(
                f"warning: discarding imaginary parts up to {residue:.3g}\n")
        dataio.write_chromatograms(args.out, ids, back.real)
    else:
        ids, _, values = dataio.read_chromatograms(args.input)
        spectra = transform_rows(values.astype(np.complex128))
        dataio.write_complex_matrix(args.out, ids, spectra.values)
    return EXIT_OK


def _cmd_impute(args):
    x, spec, ids = dataio.load_dataset(args.peaks, args.metadata)
    values, mask = zeros_to_missing(x.real)
    dmatrix = encode(spec)
    imputed = impute_cell_means(values.astype(np.complex128), mask, dmatrix)
    dataio.write_chromatograms(args.out, ids, imputed.real)
    sys.stdout.write(f"imputed {int(mask.sum())} of {mask.size} entries\n")
    return EXIT_OK


def run_pipeline(argv=None):
    """Parse arguments and run one subcommand; returns the exit code."""
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "analyze": _cmd_analyze,
        "simulate": _cmd_simulate,
        "transform": _cmd_transform,
        "impute": _cmd_impute,
    }
    try:
        return handlers[args.command](args)
    except _CONFIG_ERRORS as exc:
        sys.stderr.write(f"configuration error: {exc}\n")
        return EXIT_CONFIG
    except _DATA_ERRORS as exc:
        sys.stderr.write(f"data error: {exc}\n")
        return EXIT_DATA
    except _NUMERIC_ERRORS as exc:
        sys.stderr.write(f"numeric error: {exc}\n")
        return EXIT_NUMERIC
    except FileNotFoundError as exc:
        sys.stderr.write(f"data error: {exc}\n")
        return EXIT_DATA
    except FftascaError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DATA


def main():
    sys.exit(run_pipeline())


if __name__ == "__main__":
    main()
