import numpy as np
import pytest

from fftasca import io as dataio
from fftasca.cli import EXIT_CONFIG, EXIT_DATA, EXIT_OK, run_pipeline
from fftasca.synth import SynthConfig, generate


@pytest.fixture()
def fixture_files(tmp_path):
    """Strong-effect zero-jitter dataset, 20 samples, written to disk."""
    data = generate(SynthConfig(n_acquisitions=400, n_peaks=3, n_significant=2,
                                replicates_per_level=10, effect_size=10.0,
                                jitter_max=0, seed=8))
    chrom = tmp_path / "chroms.csv"
    meta = tmp_path / "meta.csv"
    dataio.write_chromatograms(chrom, data.sample_ids, data.x_time)
    factor = data.design.factors[0]
    lines = ["sample,group"]
    for sid, lab in zip(data.sample_ids, factor.labels):
        lines.append(f"{sid},{factor.level_names[lab]}")
    meta.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return chrom, meta


def run(*argv):
    return run_pipeline([str(a) for a in argv])


class TestAnalyze:
    def test_freq_mode_finds_the_planted_factor_at_the_floor(
            self, fixture_files, tmp_path, capsys):
        chrom, meta = fixture_files
        out = tmp_path / "out"
        code = run("analyze", chrom, meta, "--domain", "freq", "--center",
                   "--permutations", "1000", "--seed", "42",
                   "--out-dir", out, "--no-timestamp")
        assert code == EXIT_OK
        assert "Pvalue" in capsys.readouterr().out
        table = dataio.read_anova_csv(out / "anova.csv")
        assert table.row("group").p_value == pytest.approx(1 / 1001, abs=1e-12)

    def test_time_mode_matches_freq_mode_p(self, fixture_files, tmp_path):
        chrom, meta = fixture_files
        out_f = tmp_path / "f"
        out_t = tmp_path / "t"
        assert run("analyze", chrom, meta, "--domain", "freq",
                   "--permutations", "500", "--seed", "7",
                   "--out-dir", out_f, "--no-timestamp") == EXIT_OK
        assert run("analyze", chrom, meta, "--domain", "time",
                   "--permutations", "500", "--seed", "7",
                   "--out-dir", out_t, "--no-timestamp") == EXIT_OK
        p_f = dataio.read_anova_csv(out_f / "anova.csv").row("group").p_value
        p_t = dataio.read_anova_csv(out_t / "anova.csv").row("group").p_value
        assert abs(p_f - p_t) <= 1 / 501 + 1e-12

    def test_artifacts_for_significant_terms(self, fixture_files, tmp_path):
        chrom, meta = fixture_files
        out = tmp_path / "out"
        assert run("analyze", chrom, meta, "--domain", "freq",
                   "--permutations", "200", "--seed", "1",
                   "--out-dir", out, "--no-timestamp") == EXIT_OK
        for name in ("anova.csv", "anova.txt", "summary.txt",
                     "scores_group.csv", "scores_group.svg",
                     "loadings_time_group.csv", "loadings_time_group.svg",
                     "effect_time_group.csv", "effect_time_group.svg"):
            assert (out / name).exists(), name

    def test_outputs_deterministic_without_timestamp(self, fixture_files, tmp_path):
        chrom, meta = fixture_files
        outs = []
        for sub in ("a", "b"):
            out = tmp_path / sub
            assert run("analyze", chrom, meta, "--domain", "freq",
                       "--permutations", "100", "--seed", "3",
                       "--out-dir", out, "--no-timestamp") == EXIT_OK
            outs.append(out)
        for name in ("anova.csv", "summary.txt", "scores_group.svg",
                     "loadings_time_group.svg"):
            assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()

    def test_mag_domain_runs(self, fixture_files, tmp_path):
        chrom, meta = fixture_files
        out = tmp_path / "out"
        assert run("analyze", chrom, meta, "--domain", "mag",
                   "--permutations", "100", "--seed", "3",
                   "--out-dir", out, "--no-timestamp") == EXIT_OK
        assert (out / "loadings_group.csv").exists()

    def test_pcmr_requires_time_domain(self, fixture_files):
        chrom, meta = fixture_files
        assert run("analyze", chrom, meta, "--pcmr", "--domain", "freq",
                   "--permutations", "20") == EXIT_CONFIG

    def test_pcmr_peak_table_path(self, tmp_path):
        rng = np.random.default_rng(0)
        peaks = rng.uniform(3.0, 9.0, size=(12, 4))
        peaks[2, 1] = 0.0
        peaks[7, 3] = 0.0
        peaks[:6, 0] += 6.0
        ids = [f"s{i}" for i in range(12)]
        chrom = tmp_path / "peaks.csv"
        meta = tmp_path / "meta.csv"
        dataio.write_chromatograms(chrom, ids, peaks,
                                   axis_labels=[f"peak{j}" for j in range(4)])
        meta.write_text(
            "sample,group\n" + "\n".join(
                f"{sid},{'x' if i < 6 else 'y'}" for i, sid in enumerate(ids)
            ) + "\n", encoding="utf-8")
        out = tmp_path / "out"
        assert run("analyze", chrom, meta, "--pcmr", "--domain", "time",
                   "--permutations", "200", "--seed", "5",
                   "--out-dir", out, "--no-timestamp") == EXIT_OK
        table = dataio.read_anova_csv(out / "anova.csv")
        assert table.row("group").p_value <= 0.05

    def test_missing_file_is_data_error(self, tmp_path):
        assert run("analyze", tmp_path / "nope.csv", tmp_path / "meta.csv") \
            == EXIT_DATA

    def test_single_level_factor_is_data_error(self, fixture_files, tmp_path):
        chrom, _ = fixture_files
        meta = tmp_path / "flat.csv"
        ids, _, _ = dataio.read_chromatograms(chrom)
        meta.write_text("sample,group\n" + "\n".join(f"{s},same" for s in ids)
                        + "\n", encoding="utf-8")
        assert run("analyze", chrom, meta, "--permutations", "10") == EXIT_DATA

    def test_unknown_interaction_factor_is_config_error(self, fixture_files):
        chrom, meta = fixture_files
        assert run("analyze", chrom, meta, "--interactions", "group:nope",
                   "--permutations", "10") == EXIT_CONFIG


class TestSimulate:
    def test_writes_table_and_plot(self, tmp_path):
        out = tmp_path / "sim"
        code = run("simulate", "--jitter-grid", "0:30:30", "--trials", "2",
                   "--permutations", "29", "--seed", "4",
                   "--acquisitions", "1200", "--peaks", "4", "--significant", "2",
                   "--effect-size", "6.0", "--out-dir", out, "--no-timestamp")
        assert code == EXIT_OK
        lines = (out / "jitter_z.csv").read_text(encoding="utf-8").strip().split("\n")
        assert lines[0] == "jitter,trial,z_time,z_freq"
        assert len(lines) == 1 + 4  # 2 levels x 2 trials
        assert (out / "jitter_z.svg").read_text(encoding="utf-8").startswith("<svg")

    def test_dataset_out(self, tmp_path):
        out = tmp_path / "sim"
        prefix = tmp_path / "demo"
        assert run("simulate", "--jitter-grid", "0:10:0", "--trials", "1",
                   "--permutations", "19", "--acquisitions", "1200",
                   "--peaks", "4", "--significant", "2",
                   "--dataset-out", prefix, "--out-dir", out,
                   "--no-timestamp") == EXIT_OK
        x, spec, ids = dataio.load_dataset(f"{prefix}_chromatograms.csv",
                                           f"{prefix}_metadata.csv")
        assert x.shape[0] == len(ids) == 10
        assert spec.factors[0].name == "group"

    def test_bad_grid_is_config_error(self, tmp_path):
        assert run("simulate", "--jitter-grid", "50:10:0",
                   "--out-dir", tmp_path) == EXIT_CONFIG
        assert run("simulate", "--jitter-grid", "abc",
                   "--out-dir", tmp_path) == EXIT_CONFIG


class TestTransformAndImpute:
    def test_transform_round_trip(self, fixture_files, tmp_path):
        chrom, _ = fixture_files
        fwd = tmp_path / "spec.csv"
        back = tmp_path / "back.csv"
        assert run("transform", chrom, "--out", fwd) == EXIT_OK
        assert run("transform", fwd, "--inverse", "--out", back) == EXIT_OK
        _, _, original = dataio.read_chromatograms(chrom)
        _, _, recovered = dataio.read_chromatograms(back)
        assert np.max(np.abs(original - recovered)) < 1e-9

    def test_impute_fills_zeros(self, tmp_path, capsys):
        ids = [f"s{i}" for i in range(6)]
        peaks = np.array([[2.0, 1.0], [4.0, 1.0], [0.0, 1.0],
                          [7.0, 2.0], [8.0, 2.0], [9.0, 2.0]])
        chrom = tmp_path / "peaks.csv"
        meta = tmp_path / "meta.csv"
        dataio.write_chromatograms(chrom, ids, peaks)
        meta.write_text("sample,group\n" + "\n".join(
            f"{s},{'a' if i < 3 else 'b'}" for i, s in enumerate(ids)) + "\n",
            encoding="utf-8")
        out = tmp_path / "imputed.csv"
        assert run("impute", chrom, meta, "--out", out) == EXIT_OK
        _, _, values = dataio.read_chromatograms(out)
        assert values[2, 0] == pytest.approx(3.0)
        assert "imputed 1 of 12" in capsys.readouterr().out
