"""
Tests for the command-line interface.
"""

import csv
import json
import os
import subprocess
import sys
import unittest
from pathlib import Path

import pytest

from mle_decoder.cli import CSV_COLUMNS, create_decoder_config, main, parse_args
from mle_decoder.dem import dump_model, load_model
from mle_decoder.simulator.generators import gen_random_ldpc, gen_repetition_code
from mle_decoder.simulator.sampling import sample_shot, shot_rng
from mle_decoder.utils.config import DecoderKind
from mle_decoder.utils.shot_io import ShotFormat, format_b01, format_dets, read_syndromes

SRC_DIR = Path(__file__).resolve().parent.parent / "src"

STATS_KEYS = {
    "shots",
    "errors",
    "low_confidence",
    "per_shot",
    "per_round",
    "ci90_per_shot",
    "ci90_per_round",
    "nodes_expanded_total",
    "wall_time_us_total",
}


class TestDecoderConfig(unittest.TestCase):
    """Test cases for create_decoder_config."""

    def config_for(self, *flags):
        return create_decoder_config(parse_args(["decode", "--dem", "x", "--in", "y", *flags]))

    def test_default_is_exact_astar(self):
        """Test that no flags give an exact A* decoder."""
        config = self.config_for()
        self.assertEqual(config.kind, DecoderKind.ASTAR)
        self.assertTrue(config.search.is_exact)

    def test_inf_bounds(self):
        """Test that inf leaves beam and queue limit unbounded."""
        config = self.config_for("--beam", "inf", "--pqlimit", "inf")
        self.assertIsNone(config.search.beam)
        self.assertIsNone(config.search.pqlimit)

    def test_explicit_flags(self):
        """Test that search flags reach the configuration."""
        config = self.config_for("--beam", "5", "--pqlimit", "100", "--no-revisit", "--at-most-two")
        self.assertEqual(config.search.beam, 5)
        self.assertEqual(config.search.pqlimit, 100)
        self.assertTrue(config.search.no_revisit)
        self.assertTrue(config.search.at_most_two)

    def test_preset_with_override(self):
        """Test that explicit flags override preset values."""
        config = self.config_for("--preset", "short-beam", "--pqlimit", "5000")
        self.assertEqual(config.kind, DecoderKind.ENSEMBLE)
        self.assertEqual(config.ensemble.max_beam, 15)
        self.assertEqual(config.ensemble.base_config.pqlimit, 5000)
        self.assertTrue(config.ensemble.base_config.no_revisit)

    def test_beam_climbing_flag(self):
        """Test that --beam-climbing selects an ensemble with B + 1 attempts."""
        config = self.config_for("--beam-climbing", "3")
        self.assertEqual(config.kind, DecoderKind.ENSEMBLE)
        self.assertEqual(config.ensemble.max_beam, 3)
        self.assertEqual(config.ensemble.num_orderings, 4)

    def test_negative_bound_rejected(self):
        """Test that negative limits are refused by the parser."""
        with self.assertRaises(SystemExit):
            parse_args(["decode", "--dem", "x", "--in", "y", "--beam", "-2"])


@pytest.fixture
def rep_dem(tmp_path):
    """A distance-3 repetition code DEM file."""
    path = tmp_path / "rep.dem"
    argv = ["gen", "--family", "rep", "--distance", "3", "--p", "0.1", "--out", str(path)]
    assert main(argv) == 0
    return path


def test_gen_repetition(rep_dem):
    """Test that gen writes three error lines over two detectors."""
    lines = rep_dem.read_text().splitlines()
    assert len(lines) == 3
    assert all(line.startswith("error(0.1)") for line in lines)
    model = load_model(rep_dem)
    assert model == gen_repetition_code(3, 0.1)


def test_gen_random_is_reproducible(tmp_path):
    """Test that gen random with one seed writes identical files."""
    outputs = []
    for name in ("a.dem", "b.dem"):
        path = tmp_path / name
        args = ["gen", "--family", "random", "--num-errors", "12", "--num-detectors", "6"]
        args += ["--p-min", "0.01", "--p-max", "0.2", "--seed", "7", "--out", str(path)]
        assert main(args) == 0
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1]
    assert load_model(tmp_path / "a.dem") == gen_random_ldpc(12, 6, 3, (0.01, 0.2), 7)


def test_gen_invalid_distance(tmp_path):
    """Test that an unsupported distance exits with status 2."""
    argv = ["gen", "--family", "surface", "--distance", "4", "--out", str(tmp_path / "s.dem")]
    assert main(argv) == 2


def test_decode_dets(rep_dem, tmp_path):
    """Test decoding a dets file, including an empty shot."""
    shots = tmp_path / "shots.dets"
    shots.write_text("\nD0\nD0 D1\nD1\n")
    out = tmp_path / "pred.01"
    assert main(["decode", "--dem", str(rep_dem), "--in", str(shots), "--out", str(out)]) == 0
    assert out.read_text().splitlines() == ["0", "1", "0", "0"]


def test_decode_b01_matches_dets(rep_dem, tmp_path):
    """Test that both shot formats give the same predictions."""
    dets = tmp_path / "shots.dets"
    dets.write_text("\nD0\nD0 D1\nD1\n")
    b01 = tmp_path / "shots.b01"
    b01.write_text("00\n10\n11\n01\n")
    out_dets = tmp_path / "a.01"
    out_b01 = tmp_path / "b.01"
    assert main(["decode", "--dem", str(rep_dem), "--in", str(dets), "--out", str(out_dets)]) == 0
    args = ["decode", "--dem", str(rep_dem), "--in", str(b01), "--in-format", "b01"]
    assert main([*args, "--out", str(out_b01)]) == 0
    assert out_dets.read_text() == out_b01.read_text()


def test_decode_low_confidence(rep_dem, tmp_path):
    """Test that a queue limit of one marks nonempty shots low-confidence."""
    shots = tmp_path / "shots.dets"
    shots.write_text("\nD0\n")
    out = tmp_path / "pred.01"
    stats = tmp_path / "stats.json"
    args = ["decode", "--dem", str(rep_dem), "--in", str(shots), "--out", str(out)]
    assert main([*args, "--pqlimit", "1", "--stats", str(stats)]) == 0
    assert out.read_text().splitlines() == ["0", "LOW_CONFIDENCE"]
    record = json.loads(stats.read_text())
    assert set(record) == STATS_KEYS
    assert record["low_confidence"] == 1
    assert record["errors"] is None
    assert record["wall_time_us_total"] is None


def test_decode_with_observables(rep_dem, tmp_path):
    """Test that true observables produce error counts and rates."""
    shots = tmp_path / "shots.dets"
    shots.write_text("D0\nD0 D1\nD1\nD0\n")
    truth = tmp_path / "obs.01"
    truth.write_text("1\n1\n0\n0\n")
    stats = tmp_path / "stats.json"
    args = ["decode", "--dem", str(rep_dem), "--in", str(shots), "--out", str(tmp_path / "p.01")]
    assert main([*args, "--obs-in", str(truth), "--stats", str(stats), "--timing"]) == 0
    record = json.loads(stats.read_text())
    assert record["shots"] == 4
    assert record["errors"] == 2
    assert record["per_shot"] == 0.5
    assert record["per_round"] == record["per_shot"]
    assert record["wall_time_us_total"] >= 0


def test_decode_bad_dem(tmp_path):
    """Test that a malformed DEM exits with status 2."""
    dem = tmp_path / "bad.dem"
    dem.write_text("error(0.1) D0\nerror(1.5) D1\n")
    shots = tmp_path / "shots.dets"
    shots.write_text("D0\n")
    assert main(["decode", "--dem", str(dem), "--in", str(shots)]) == 2


def test_decode_missing_file(rep_dem, tmp_path):
    """Test that a missing shot file exits with status 2."""
    assert main(["decode", "--dem", str(rep_dem), "--in", str(tmp_path / "none.dets")]) == 2


def test_decode_bad_shot_line(rep_dem, tmp_path):
    """Test that a detector beyond the model exits with status 2."""
    shots = tmp_path / "shots.dets"
    shots.write_text("D0\nD9\n")
    assert main(["decode", "--dem", str(rep_dem), "--in", str(shots)]) == 2


def test_sample_is_deterministic(rep_dem, capsys):
    """Test that sampling twice with one seed prints identical output."""
    outputs = []
    for threads in ("1", "8", "1"):
        args = ["sample", "--dem", str(rep_dem), "--shots", "500", "--seed", "3"]
        assert main([*args, "--threads", threads]) == 0
        outputs.append(capsys.readouterr().out)
    assert outputs[0] == outputs[1] == outputs[2]
    record = json.loads(outputs[0])
    assert set(record) == STATS_KEYS
    assert record["shots"] == 500
    assert record["per_round"] == record["per_shot"]
    assert record["ci90_per_round"] == record["ci90_per_shot"]


def test_sample_oracles_agree(rep_dem, capsys):
    """Test that every oracle choice reports the same errors for the same shots."""
    errors = set()
    for oracle in ("brute", "dijkstra", "astar"):
        args = ["sample", "--dem", str(rep_dem), "--shots", "2000", "--seed", "5"]
        assert main([*args, "--oracle", oracle]) == 0
        errors.add(json.loads(capsys.readouterr().out)["errors"])
    assert len(errors) == 1


def test_sample_csv(rep_dem, tmp_path, capsys):
    """Test that sample appends CSV rows under a single header."""
    table = tmp_path / "results.csv"
    for _ in range(2):
        args = ["sample", "--dem", str(rep_dem), "--shots", "200", "--rounds", "3"]
        assert main([*args, "--csv", str(table), "--label", "rep3"]) == 0
    capsys.readouterr()
    with open(table, newline="") as f:
        rows = list(csv.DictReader(f))
    assert list(rows[0]) == CSV_COLUMNS
    assert len(rows) == 2
    assert rows[0]["model"] == "rep3"
    assert float(rows[0]["p"]) == 0.1
    assert rows[0]["shots"] == "200"


def test_sample_preset(tmp_path, capsys):
    """Test sampling a surface code with the short-beam preset."""
    dem = tmp_path / "surface.dem"
    argv = ["gen", "--family", "surface", "--distance", "3", "--p", "0.05", "--out", str(dem)]
    assert main(argv) == 0
    assert main(["sample", "--dem", str(dem), "--shots", "100", "--preset", "short-beam"]) == 0
    record = json.loads(capsys.readouterr().out)
    assert record["shots"] == 100
    assert record["low_confidence"] == 0


def test_module_entry_point(tmp_path):
    """Test running the package with python -m."""
    env = {**os.environ, "PYTHONPATH": str(SRC_DIR)}
    result = subprocess.run(
        [sys.executable, "-m", "mle_decoder", "gen", "--family", "rep", "--distance", "5"],
        capture_output=True,
        text=True,
        env=env,
        check=False,
    )
    assert result.returncode == 0
    assert len(result.stdout.splitlines()) == 5


def test_sampled_shot_files_round_trip(tmp_path):
    """Test that sampled shots written in either format decode to the same predictions."""
    model = gen_random_ldpc(12, 7, 3, (0.05, 0.3), 4)
    dem = tmp_path / "random.dem"
    dump_model(model, dem)
    shots = [sample_shot(model, shot_rng(4, i)) for i in range(50)]
    dets = tmp_path / "shots.dets"
    dets.write_text("".join(format_dets(s.syndrome) + "\n" for s in shots))
    b01 = tmp_path / "shots.b01"
    b01.write_text("".join(format_b01(s.syndrome, model.num_detectors) + "\n" for s in shots))
    assert read_syndromes(dets.read_text(), ShotFormat.DETS, model.num_detectors) == [
        s.syndrome for s in shots
    ]

    outputs = []
    for path, fmt in ((dets, "dets"), (b01, "b01")):
        out = tmp_path / f"{fmt}.01"
        args = ["decode", "--dem", str(dem), "--in", str(path), "--in-format", fmt]
        assert main([*args, "--out", str(out)]) == 0
        outputs.append(out.read_text())
    assert outputs[0] == outputs[1]
    assert len(outputs[0].splitlines()) == 50


def test_decode_threads_give_identical_files(tmp_path):
    """Test that decode writes byte-identical predictions and stats for 1 and 8 threads."""
    model = gen_random_ldpc(14, 8, 3, (0.05, 0.3), 6)
    dem = tmp_path / "random.dem"
    dump_model(model, dem)
    shots = [sample_shot(model, shot_rng(6, i)) for i in range(200)]
    dets = tmp_path / "shots.dets"
    dets.write_text("".join(format_dets(s.syndrome) + "\n" for s in shots))
    outputs = []
    for threads in ("1", "8"):
        out = tmp_path / f"pred{threads}.01"
        stats = tmp_path / f"stats{threads}.json"
        args = ["decode", "--dem", str(dem), "--in", str(dets), "--out", str(out)]
        assert main([*args, "--stats", str(stats), "--threads", threads, "--beam", "1"]) == 0
        outputs.append((out.read_bytes(), stats.read_bytes()))
    assert outputs[0] == outputs[1]


def test_sample_preset_threads_identical(tmp_path, capsys):
    """Test that an ensemble preset prints the same record for 1 and 8 threads."""
    dem = tmp_path / "surface.dem"
    argv = ["gen", "--family", "surface", "--distance", "3", "--p", "0.08", "--out", str(dem)]
    assert main(argv) == 0
    outputs = []
    for threads in ("1", "8"):
        args = ["sample", "--dem", str(dem), "--shots", "300", "--seed", "9"]
        assert main([*args, "--preset", "short-beam", "--threads", threads]) == 0
        outputs.append(capsys.readouterr().out)
    assert outputs[0] == outputs[1]


def test_sample_writes_decodable_shots(rep_dem, tmp_path, capsys):
    """Test that shots written by sample decode to the error count sample reported."""
    shots = tmp_path / "shots.b01"
    truth = tmp_path / "obs.01"
    args = ["sample", "--dem", str(rep_dem), "--shots", "400", "--seed", "12"]
    args += ["--shots-out", str(shots), "--shots-out-format", "b01", "--obs-out", str(truth)]
    assert main(args) == 0
    sampled = json.loads(capsys.readouterr().out)
    assert len(shots.read_text().splitlines()) == 400

    stats = tmp_path / "stats.json"
    args = ["decode", "--dem", str(rep_dem), "--in", str(shots), "--in-format", "b01"]
    assert main([*args, "--obs-in", str(truth), "--stats", str(stats)]) == 0
    assert json.loads(stats.read_text())["errors"] == sampled["errors"]
