from pytest import fixture, FixtureRequest

from src.isomeasure.utils.data_model import ConfigModel
from src.isomeasure.utils.measure import DiscreteMeasure, LiftedMeasure, lift


@fixture
def lifted_simplex2(simplex2: DiscreteMeasure) -> LiftedMeasure:
    """Fixture that lifts the planar simplex measure to S^2."""
    return lift(simplex2)


@fixture
def lifted_cross3(cross3: DiscreteMeasure) -> LiftedMeasure:
    """Fixture that lifts the octahedral measure to S^3."""
    return lift(cross3)


@fixture
def default_dict_config() -> dict:
    """Fixture, that creates and returns the default dict config."""
    return ConfigModel().model_dump()


@fixture
def custom_dict_config() -> dict:
    """Fixture, that creates and returns a dict config with every block set."""

    return {
        "log_level": "DEBUG",
        "tolerances": {
            "constructed": 1e-11,
            "solver": 1e-8,
            "equality": 1e-9,
            "lift": 1e-10,
        },
        "sampling": {
            "samples": 20_000,
            "chunk_size": 5_000,
            "threads": 2,
        },
        "generator": {"max_attempts": 10, "drop_weight": 1e-10},
    }


@fixture
def invalid_dict_config() -> dict:
    """Fixture, that returns a dict config with too few chain samples."""

    return {
        "log_level": "WARNING",
        "sampling": {"samples": 100, "chunk_size": 5_000, "threads": 1},
    }


@fixture
def mock_dict_config(request: FixtureRequest) -> dict:
    """Fixture, that returns value of fixture for provided name."""
    return request.getfixturevalue(request.param)
