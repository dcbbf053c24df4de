"""
Tests for CSV, gnuplot and manifest outputs.
"""

import json

import pandas as pd
import pytest

from data.writer import (
    RunManifest,
    WriterError,
    load_manifest,
    sha256_file,
    write_csv,
    write_gnuplot,
    write_result,
)


@pytest.fixture
def frame():
    return pd.DataFrame(
        {
            "theta_db": [-10.0, 0.0, -10.0, 0.0],
            "arch": ["monostatic", "monostatic", "multistatic", "multistatic"],
            "mc": [0.01, 0.5, 0.001, 0.2],
            "bound": [0.02, 0.6, float("nan"), 0.25],
        }
    )


class TestWriteCsv:
    """Tests for write_csv."""

    def test_format(self, frame, tmp_path):
        """Header, fixed scientific floats and 'nan' for missing values."""
        path = write_csv(frame, tmp_path / "out" / "curve.csv")
        lines = path.read_text().splitlines()
        assert lines[0] == "theta_db,arch,mc,bound"
        assert lines[1] == "-1.000000000e+01,monostatic,1.000000000e-02,2.000000000e-02"
        assert lines[3].endswith(",nan")
        assert len(lines) == 5

    def test_identical_frames_identical_bytes(self, frame, tmp_path):
        """Writing twice gives byte-identical files."""
        a = write_csv(frame, tmp_path / "a.csv")
        b = write_csv(frame.copy(), tmp_path / "b.csv")
        assert a.read_bytes() == b.read_bytes()

    def test_no_temporary_files_left(self, frame, tmp_path):
        """Atomic writes leave only the target."""
        write_csv(frame, tmp_path / "curve.csv")
        assert [p.name for p in tmp_path.iterdir()] == ["curve.csv"]


class TestWriteGnuplot:
    """Tests for write_gnuplot."""

    def test_one_block_per_series(self, frame, tmp_path):
        """Blocks are separated by two blank lines and labelled."""
        text = write_gnuplot(frame, tmp_path / "curve.dat", "theta_db", ["arch"]).read_text()
        blocks = text.strip("\n").split("\n\n\n")
        assert len(blocks) == 2
        first = blocks[0].splitlines()
        assert first[0] == "# arch=monostatic"
        assert first[1] == "# theta_db mc bound"
        assert first[2].split() == ["-1.000000000e+01", "1.000000000e-02", "2.000000000e-02"]
        assert blocks[1].startswith("# arch=multistatic")

    def test_without_series(self, frame, tmp_path):
        """No series columns gives a single block."""
        text = write_gnuplot(frame[["theta_db", "mc"]], tmp_path / "c.dat", "theta_db", []).read_text()
        assert "\n\n\n" not in text
        assert text.splitlines()[0] == "# theta_db mc"

    def test_missing_column(self, frame, tmp_path):
        """Unknown columns raise WriterError."""
        with pytest.raises(WriterError):
            write_gnuplot(frame, tmp_path / "c.dat", "snr_db", ["arch"])


class TestManifest:
    """Tests for RunManifest and write_result."""

    def test_write_result_records_digests(self, frame, tmp_path):
        """CSV and .dat are written and hashed into the manifest."""
        manifest = RunManifest(command="outage", config={"tags": 3}, seed=1)
        paths = write_result(frame, tmp_path, "outage", "theta_db", ["arch"], manifest)
        assert [p.name for p in paths] == ["outage.csv", "outage.dat"]
        assert manifest.outputs == {p.name: sha256_file(p) for p in paths}

    def test_round_trip(self, tmp_path):
        """Manifests are written as sorted JSON and read back."""
        manifest = RunManifest(command="ber", config={"sweep": ["inf"]}, seed=42, wall_time_s=1.5)
        path = manifest.write(tmp_path)
        data = json.loads(path.read_text())
        assert list(data) == sorted(data)
        restored = load_manifest(path)
        assert restored == manifest

    def test_malformed_manifest(self, tmp_path):
        """Unknown fields and broken JSON raise WriterError."""
        bad = tmp_path / "bad.json"
        bad.write_text('{"command": "ber", "unexpected": 1}')
        with pytest.raises(WriterError):
            load_manifest(bad)
        bad.write_text("{")
        with pytest.raises(WriterError):
            load_manifest(bad)
