import warnings

import pytest

from fullshift.presets import preset_pair
from fullshift.spectrum import GridSpec, phase_transitions, spectrum_curve

warnings.filterwarnings("ignore", message=".*roundoff.*")

PRESET_GRIDS = {
    "zero-transitions": GridSpec(points=512, q_min=-6.0, q_max=8.0),
    "one-transition": GridSpec(points=257, q_min=-6.0, q_max=8.0),
    "two-transitions": GridSpec(points=257, q_min=-4.0, q_max=8.0),
    "three-transitions": GridSpec(points=257, q_min=-4.0, q_max=8.0),
    "minkowski": GridSpec(points=257, q_min=-4.0, q_max=12.0),
    "infinite-transitions": GridSpec(points=97, q_min=-4.0, q_max=6.0),
}


@pytest.fixture(scope="session")
def pairs():
    return {name: preset_pair(name) for name in PRESET_GRIDS}


@pytest.fixture(scope="session")
def curves(pairs):
    """Each preset's spectrum curve and transition report, computed once."""
    out = {}
    for name, pair in pairs.items():
        grid = PRESET_GRIDS[name]
        curve = spectrum_curve(pair, grid)
        report = phase_transitions(pair, curve, grid)
        out[name] = (grid, curve, report)
    return out
