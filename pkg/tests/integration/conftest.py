import os
import tempfile
import json

from pytest import fixture, FixtureRequest
from typing import Generator
from pathlib import Path

from src.isomeasure.utils.container import Container, build_container
from src.isomeasure.utils.generators import (
    cross_polytope_measure,
    regular_simplex_measure,
)


def _temporary_file(content: str, suffix: str) -> Generator[Path, None, None]:
    """Write content to a temporary file, yield its path, then remove it."""
    with tempfile.NamedTemporaryFile(
        mode="w+", suffix=suffix, delete=False
    ) as temp_file:
        temp_file.write(content)
        temp_file.close()
        try:
            yield Path(temp_file.name)
        finally:
            os.remove(temp_file.name)


@fixture
def valid_config() -> Generator[Path, None, None]:
    """Fixture that creates temporary yaml config file and
    yields a file path with a complete configuration.

    Yields:
        Path: Path to the configuration file.
    """

    config_data = """
    log_level: INFO

    tolerances:
        constructed: 1.0e-10
        solver: 1.0e-7
        equality: 1.0e-9
        lift: 1.0e-10

    sampling:
        samples: 20000
        chunk_size: 5000
        threads: 2

    generator:
        max_attempts: 20
        drop_weight: 1.0e-9
    """
    yield from _temporary_file(config_data, ".yaml")


@fixture
def partial_config() -> Generator[Path, None, None]:
    """Fixture that creates temporary yaml config file and
    yields a file path with only the sampling block set.

    Yields:
        Path: Path to the configuration file.
    """

    config_data = """
    sampling:
        samples: 10000
        chunk_size: 2000
    """
    yield from _temporary_file(config_data, ".yaml")


@fixture
def invalid_config() -> Generator[Path, None, None]:
    """Fixture that creates temporary yaml config file and
    yields a file path with invalid configuration settings.

    Yields:
        Path: Path to the invalid configuration file.
    """

    config_data = """
    log_level: LOUD

    sampling:
        samples: 10
    """
    yield from _temporary_file(config_data, ".yaml")


@fixture
def mock_yaml_config(request: FixtureRequest) -> Path:
    """Fixture, that returns value of fixture for provided name."""
    return request.getfixturevalue(request.param)


@fixture
def container(valid_config: Path) -> Container:
    """Fixture that returns a Container built from the valid config file.

    Args:
        valid_config (Path): Path to the configuration file.

    Returns:
        Container: The Container object with the file configuration.
    """
    return build_container(valid_config)


@fixture
def simplex3_path() -> Generator[Path, None, None]:
    """Fixture, that creates temporary json file with the tetrahedral
    measure and yields path to that file.

    Yields:
        Path: Path to temporary json file.
    """
    data = regular_simplex_measure(3).to_model().model_dump()
    yield from _temporary_file(json.dumps(data), ".json")


@fixture
def cross2_path() -> Generator[Path, None, None]:
    """Fixture, that creates temporary json file with the planar cross
    measure and yields path to that file.

    Yields:
        Path: Path to temporary json file.
    """
    data = cross_polytope_measure(2).to_model().model_dump()
    yield from _temporary_file(json.dumps(data), ".json")


@fixture
def ortho3_path() -> Generator[Path, None, None]:
    """Fixture, that creates temporary json file with an orthonormal basis
    of unit weights and yields path to that file.

    Yields:
        Path: Path to temporary json file.
    """
    data = {
        "dim": 3,
        "atoms": [
            {"u": [1.0, 0.0, 0.0], "c": 1.0},
            {"u": [0.0, 1.0, 0.0], "c": 1.0},
            {"u": [0.0, 0.0, 1.0], "c": 1.0},
        ],
    }
    yield from _temporary_file(json.dumps(data), ".json")


@fixture
def skewed_path() -> Generator[Path, None, None]:
    """Fixture, that creates temporary json file with a measure that is not
    isotropic and yields path to that file.

    Yields:
        Path: Path to temporary json file.
    """
    data = {
        "dim": 2,
        "atoms": [
            {"u": [1.0, 0.0], "c": 1.0},
            {"u": [-1.0, 0.0], "c": 1.0},
            {"u": [0.0, 1.0], "c": 0.2},
            {"u": [0.0, -1.0], "c": 0.2},
        ],
    }
    yield from _temporary_file(json.dumps(data), ".json")


@fixture
def values_path() -> Generator[Path, None, None]:
    """Fixture, that creates temporary json file with the values 1, 2, 3
    and yields path to that file.

    Yields:
        Path: Path to temporary json file.
    """
    yield from _temporary_file(json.dumps([1.0, 2.0, 3.0]), ".json")


@fixture
def text_path() -> Generator[Path, None, None]:
    """Fixture, that creates temporary text file and yields path to that
    file.

    Yields:
        Path: Path to temporary text file.
    """
    yield from _temporary_file("abcd", ".txt")


@fixture
def out_path() -> Generator[Path, None, None]:
    """Fixture, that yields a path in a temporary directory for command
    output, removed after the test.

    Yields:
        Path: Path of a not yet existing json file.
    """
    with tempfile.TemporaryDirectory() as directory:
        yield Path(directory) / "out.json"
