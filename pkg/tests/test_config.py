"""Tests for scenario parsing and validation"""

import json
from pathlib import Path

import pytest

from beamlink.config import dump_config, parse_config, parse_config_text, with_overrides
from beamlink.errors import ConfigurationError


def _parse(data: dict):
    return parse_config_text(json.dumps(data))


class TestDefaults:
    """Minimal scenarios"""

    def test_minimal(self, reference):
        data = reference()
        del data["loads"], data["interface"]
        config = _parse(data)
        assert config.characteristic_length == pytest.approx(2.0)
        assert config.analysis.refinement_levels == 1
        assert config.analysis.solve and config.analysis.stability
        assert config.interface.face_set == "-z"
        assert config.beam.axis_origin is None

    def test_explicit_length_kept(self, reference):
        data = reference()
        data["characteristic_length"] = 0.5
        assert _parse(data).characteristic_length == 0.5

    def test_material_conversion(self, reference):
        material = _parse(reference()).solid.material.to_material()
        assert material.mu == pytest.approx(1000.0 / 2.6)


class TestValidation:
    """Rejected inputs name the offending key"""

    def test_incompressible(self, reference):
        data = reference()
        data["solid"]["material"]["poisson_ratio"] = 0.5
        with pytest.raises(ConfigurationError) as exc:
            _parse(data)
        assert exc.value.key == "solid.material.poisson_ratio"

    def test_unknown_key(self, reference):
        data = reference()
        data["beam"]["colour"] = "red"
        with pytest.raises(ConfigurationError) as exc:
            _parse(data)
        assert exc.value.key == "beam.colour"

    def test_both_material_pairs(self, reference):
        data = reference()
        data["solid"]["material"].update(lame_lambda=1.0, lame_mu=1.0)
        with pytest.raises(ConfigurationError) as exc:
            _parse(data)
        assert exc.value.key == "solid.material"

    def test_incomplete_section(self, reference):
        data = reference()
        del data["beam"]["section"]["height"]
        with pytest.raises(ConfigurationError) as exc:
            _parse(data)
        assert exc.value.key == "beam.section"

    def test_explicit_section_constants(self, reference):
        data = reference()
        data["beam"]["section"] = {
            "youngs_modulus": 1000.0, "shear_modulus": 400.0, "area": 0.04,
            "shear_area_1": 0.03, "shear_area_2": 0.03, "inertia_1": 1e-4,
            "inertia_2": 2e-4, "torsion_constant": 1.5e-4,
        }
        section = _parse(data).beam.section.to_section()
        assert section.I2 == 2e-4 and section.G == 400.0

    def test_zero_axis(self, reference):
        data = reference()
        data["beam"]["axis_direction"] = [0.0, 0.0, 0.0]
        with pytest.raises(ConfigurationError) as exc:
            _parse(data)
        assert exc.value.key == "beam.axis_direction"

    @pytest.mark.parametrize("text", ["{not json", "[1, 2]"])
    def test_not_a_json_object(self, text):
        with pytest.raises(ConfigurationError):
            parse_config_text(text)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError):
            parse_config(tmp_path / "absent.json")


class TestRoundTrip:
    """Canonical dump"""

    def test_dump_parses_back(self, reference):
        config = _parse(reference(refinement_levels=2))
        assert parse_config_text(dump_config(config)) == config

    def test_shipped_scenario(self):
        config = parse_config(Path(__file__).parents[1] / "scenarios" / "reference.json")
        assert config.analysis.refinement_levels == 3

    def test_file(self, reference, scenario_file):
        config = parse_config(scenario_file(reference()))
        assert config.loads.tractions[0].face_set == "+z"


class TestOverrides:
    """Command-line overrides"""

    def test_none_ignored(self, reference):
        config = _parse(reference(refinement_levels=3))
        new = with_overrides(config, refinement_levels=None, solve=False, directory="out")
        assert new.analysis.refinement_levels == 3
        assert new.analysis.solve is False
        assert new.output.directory == "out"
        assert config.analysis.solve is True
