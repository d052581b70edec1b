"""Shared scenario builders"""

import json

import numpy as np
import pytest

from beamlink.beam.section import BeamSection
from beamlink.geometry.beam_model import build_beam
from beamlink.geometry.interface import extract_interface
from beamlink.geometry.mesh import build_block_mesh
from beamlink.saddle.system import assemble_system
from beamlink.solid.material import SolidMaterial
from beamlink.utils.live_metrics import live

E = 1000.0
NU = 0.3


@pytest.fixture(autouse=True)
def _fresh_metrics():
    live.reset()
    yield


@pytest.fixture
def material():
    return SolidMaterial.from_engineering(E, NU)


@pytest.fixture
def section():
    return BeamSection.rectangular(0.2, 0.2, E, NU)


@pytest.fixture
def block():
    """Unit cube with its bottom face centered on the origin."""
    return build_block_mesh((1.0, 1.0, 1.0), (2, 2, 2), origin=(-0.5, -0.5, 0.0))


@pytest.fixture
def sigma(block):
    return extract_interface(block, "-z")


@pytest.fixture
def beam(section):
    return build_beam(2.0, 4, section, axis_origin=(0.0, 0.0, -2.0))


@pytest.fixture
def system(block, beam, sigma, material):
    return assemble_system(block, beam, sigma, material)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def scenario_dict(**analysis) -> dict:
    """Reference scenario as a plain dict."""
    data = {
        "solid": {
            "dimensions": [1.0, 1.0, 1.0],
            "divisions": [2, 2, 2],
            "origin": [-0.5, -0.5, 0.0],
            "material": {"youngs_modulus": E, "poisson_ratio": NU},
        },
        "beam": {
            "length": 2.0,
            "elements": 4,
            "section": {"youngs_modulus": E, "poisson_ratio": NU, "width": 0.2, "height": 0.2},
        },
        "interface": {"face_set": "-z"},
        "loads": {"tractions": [{"face_set": "+z", "traction": [1.0, 0.0, 0.0]}]},
    }
    if analysis:
        data["analysis"] = analysis
    return data


@pytest.fixture
def scenario_file(tmp_path):
    def write(data: dict, name: str = "scenario.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return path
    return write


@pytest.fixture(scope="session")
def reference():
    """Builder of the reference scenario dict; keyword arguments fill ``analysis``."""
    return scenario_dict
