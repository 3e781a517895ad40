import struct

import numpy as np
import pytest

from hullcert import (build_hull_approximation, read_fvec, read_hull,
                      read_lvec, read_matrix, write_fvec, write_hull,
                      write_lvec)
from hullcert.errors import MalformedFile, NonFiniteValue
from hullcert.formats import read_scores_csv, write_scores_csv
from hullcert.reports import make_report, render_report, write_report


class TestFvec:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "m.fvec"
        M = np.array([[1.0, 2.0], [3.0, 4.0]])
        write_fvec(path, M)
        out = read_fvec(path)
        np.testing.assert_array_equal(out, M)
        # write-read-write is byte idempotent
        path2 = tmp_path / "m2.fvec"
        write_fvec(path2, out)
        assert path.read_bytes() == path2.read_bytes()

    def test_header_layout(self, tmp_path):
        path = tmp_path / "m.fvec"
        write_fvec(path, np.zeros((3, 5)))
        blob = path.read_bytes()
        assert blob[:4] == b"FVEC"
        assert struct.unpack("<III", blob[4:16]) == (1, 3, 5)
        assert len(blob) == 16 + 4 * 15

    def test_truncated_rejected(self, tmp_path):
        path = tmp_path / "m.fvec"
        write_fvec(path, np.zeros((4, 4)))
        path.write_bytes(path.read_bytes()[:-8])
        with pytest.raises(MalformedFile):
            read_fvec(path)

    def test_oversized_declaration_rejected(self, tmp_path):
        path = tmp_path / "m.fvec"
        blob = b"FVEC" + struct.pack("<III", 1, 1000, 1000) + b"\0" * 16
        path.write_bytes(blob)
        with pytest.raises(MalformedFile):
            read_fvec(path)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "m.fvec"
        path.write_bytes(b"NOPE" + b"\0" * 12)
        with pytest.raises(MalformedFile):
            read_fvec(path)

    def test_non_finite_rejected(self, tmp_path):
        path = tmp_path / "m.fvec"
        with pytest.raises(NonFiniteValue):
            write_fvec(path, np.array([[np.inf]]))


class TestLvec:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "l.lvec"
        labels = np.array([0, 1, 2, -1, 100])
        write_lvec(path, labels)
        np.testing.assert_array_equal(read_lvec(path), labels)

    def test_length_check(self, tmp_path):
        path = tmp_path / "l.lvec"
        write_lvec(path, [1, 2, 3])
        path.write_bytes(path.read_bytes() + b"\0\0")
        with pytest.raises(MalformedFile):
            read_lvec(path)


class TestHullFile:
    def test_round_trip_bitwise(self, tmp_path):
        rng = np.random.default_rng(149)
        # float32 grid so the single precision payload is lossless
        X = rng.uniform(size=(20, 3)).astype(np.float32).astype(np.float64)
        hull = build_hull_approximation(X)
        path = tmp_path / "h.hul1"
        write_hull(hull, path)
        out = read_hull(path)
        assert np.array_equal(out.points, hull.points)
        assert out.epsilon == hull.epsilon
        assert out.source_rows == hull.source_rows

    def test_truncated_rejected(self, tmp_path):
        rng = np.random.default_rng(151)
        hull = build_hull_approximation(rng.uniform(size=(10, 2)))
        path = tmp_path / "h.hul1"
        write_hull(hull, path)
        path.write_bytes(path.read_bytes()[:-4])
        with pytest.raises(MalformedFile):
            read_hull(path)

    def test_nonpositive_epsilon_rejected(self, tmp_path):
        rng = np.random.default_rng(157)
        hull = build_hull_approximation(rng.uniform(size=(10, 2)))
        path = tmp_path / "h.hul1"
        write_hull(hull, path)
        blob = bytearray(path.read_bytes())
        blob[8:16] = struct.pack("<d", -1.0)
        path.write_bytes(bytes(blob))
        with pytest.raises(MalformedFile):
            read_hull(path)


class TestCsv:
    def test_basic_matrix(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("1.5,2.0\n3.0,4.0\n")
        M = read_matrix(path)
        np.testing.assert_array_equal(M, [[1.5, 2.0], [3.0, 4.0]])

    def test_header_flag(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("a,b\n1,2\n")
        M = read_matrix(path, header=True)
        np.testing.assert_array_equal(M, [[1.0, 2.0]])

    def test_ragged_rejected(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("1,2\n3\n")
        with pytest.raises(MalformedFile):
            read_matrix(path)

    def test_csv_fvec_parity(self, tmp_path):
        # CSV parses to nearest float32, so both routes agree bitwise
        vals = [[0.1, 0.2], [1.0 / 3.0, 2.0 / 3.0]]
        csv_path = tmp_path / "m.csv"
        csv_path.write_text("\n".join(",".join(repr(v) for v in row) for row in vals))
        fvec_path = tmp_path / "m.fvec"
        write_fvec(fvec_path, np.array(vals))
        np.testing.assert_array_equal(read_matrix(csv_path), read_fvec(fvec_path))


class TestScoresCsv:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "s.csv"
        write_scores_csv(path, [0.5, 1.25, 3.0], "tu")
        name, vals = read_scores_csv(path)
        assert name == "tu"
        np.testing.assert_allclose(vals, [0.5, 1.25, 3.0], rtol=1e-9)


class TestReports:
    def test_deterministic_bytes(self, tmp_path):
        rep = make_report("demo", {"x": 1.0 / 3.0, "n": 5})
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        write_report(rep, p1)
        write_report(rep, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_nine_significant_digits(self):
        text = render_report({"v": 1.0 / 3.0})
        assert "0.333333333" in text

    def test_non_finite_refused(self):
        with pytest.raises(NonFiniteValue):
            render_report({"v": float("inf")})

    def test_explicit_nulls(self):
        text = render_report({"mean_exterior_tu": None})
        assert '"mean_exterior_tu": null' in text
