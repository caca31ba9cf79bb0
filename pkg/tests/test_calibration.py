import pytest

from favardkit.calibration import KNOWN_CONSTANTS, CalibrationRecord, measure_constant
from favardkit.errors import ConfigError


class TestRecord:
    def test_missing_file_loads_empty(self, tmp_path):
        rec = CalibrationRecord.load(tmp_path / "none.json")
        assert rec.get("C_pigeonhole", None) is None

    def test_set_once_roundtrip(self, tmp_path):
        path = tmp_path / "cal.json"
        rec = CalibrationRecord.load(path)
        rec.set_once("C_pigeonhole", 1.5, "random", {"profiles": 2000})
        rec.save(path)
        back = CalibrationRecord.load(path)
        assert back.get("C_pigeonhole") == 1.5

    def test_second_write_rejected(self, tmp_path):
        rec = CalibrationRecord.load(tmp_path / "cal.json")
        rec.set_once("C_favar", 1.0, "cantor", {})
        with pytest.raises(ConfigError):
            rec.set_once("C_favar", 2.0, "cantor", {})

    def test_known_constant_names_cover_measurers(self):
        assert "C_pigeonhole" in KNOWN_CONSTANTS
        assert "C_favard_lower" in KNOWN_CONSTANTS


class TestMeasurement:
    def test_pigeonhole_constant_frozen(self):
        a, run_a = measure_constant("C_pigeonhole", "random")
        b, _ = measure_constant("C_pigeonhole", "random")
        assert a == b
        assert a == pytest.approx(1.5267, abs=2e-3)
        assert a <= 4.0
        assert run_a["trials"] == 2000

    def test_beta_route_constant(self):
        got, _ = measure_constant("C_rect_beta", "cantor")
        assert got == pytest.approx(0.25, abs=1e-12)

    def test_unknown_name_rejected(self):
        with pytest.raises(ConfigError):
            measure_constant("C_bogus", "cantor")
