import numpy as np
import pytest

from pathlib import Path
from unittest.mock import Mock, patch

from src.isomeasure.utils.input_handler import InputHandler
from src.isomeasure.utils.measure import DiscreteMeasure

MEASURE_DATA = {
    "dim": 2,
    "atoms": [
        {"u": [1.0, 0.0], "c": 0.5},
        {"u": [-1.0, 0.0], "c": 0.5},
        {"u": [0.0, 1.0], "c": 0.5},
        {"u": [0.0, -1.0], "c": 0.5},
    ],
}


def _json_path() -> Mock:
    mock_path = Mock(spec=Path)
    mock_path.exists.return_value = True
    mock_path.suffix = ".json"
    return mock_path


def test_input_handler_init() -> None:
    """Test that the InputHandler is initialized correctly.

    Asserts:
        The InputHandler is initialized correctly without raising an error.
        The `path` attribute is of correct type.
    """
    mock_path = Mock(spec=Path)
    input_handler = InputHandler(path=mock_path)
    assert isinstance(input_handler.path, Path)


def test_load_measure_non_existent_file() -> None:
    """Test that `load_measure` handles non existent file correctly.

    Asserts:
        FileExistsError is raised.
    """
    mock_path = Mock(spec=Path)
    mock_path.exists.return_value = False
    input_handler = InputHandler(path=mock_path)
    with pytest.raises(FileExistsError):
        input_handler.load_measure()


def test_load_measure_invalid_suffix() -> None:
    """Test that `load_measure` handles invalid suffix correctly.

    Asserts:
        ValueError is raised.
    """
    mock_path = Mock(spec=Path)
    mock_path.exists.return_value = True
    mock_path.suffix = ".npy"
    input_handler = InputHandler(path=mock_path)
    with pytest.raises(ValueError):
        input_handler.load_measure()


def test_load_measure_json() -> None:
    """Test that `load_measure` reads a measure file correctly.

    Asserts:
        The mocked open function is called once with correct data.
        The mocked json load function is called once.
        The result is the sorted cross measure.
    """
    mock_path = _json_path()
    input_handler = InputHandler(path=mock_path)
    with (
        patch("builtins.open") as mocked_open,
        patch("json.load", return_value=MEASURE_DATA) as mocked_json,
    ):
        measure = input_handler.load_measure()
        mocked_open.assert_called_once_with(mock_path, encoding="utf-8")
        mocked_json.assert_called_once()
    assert isinstance(measure, DiscreteMeasure)
    assert measure.size == 4
    np.testing.assert_allclose(measure.directions[0], [-1.0, 0.0])


def test_load_measure_invalid_schema() -> None:
    """Test that `load_measure` refuses content violating the schema.

    Asserts:
        TypeError is raised.
    """
    input_handler = InputHandler(path=_json_path())
    with (
        patch("builtins.open"),
        patch("json.load", return_value={"dim": 2, "atoms": "none"}),
    ):
        with pytest.raises(TypeError):
            input_handler.load_measure()


def test_load_values() -> None:
    """Test that `load_values` returns a float array.

    Asserts:
        The values are returned in file order as floats.
    """
    input_handler = InputHandler(path=_json_path())
    with patch("builtins.open"), patch("json.load", return_value=[1, 2.5]):
        values = input_handler.load_values()
    np.testing.assert_array_equal(values, [1.0, 2.5])
    assert values.dtype == float


@pytest.mark.parametrize(
    "content", [[[1.0, 2.0]], {"values": [1.0]}, [True, 1.0], ["1.0"]]
)
def test_load_values_invalid(content: object) -> None:
    """Test that `load_values` accepts only flat numeric lists.

    Asserts:
        TypeError is raised.
    """
    input_handler = InputHandler(path=_json_path())
    with patch("builtins.open"), patch("json.load", return_value=content):
        with pytest.raises(TypeError):
            input_handler.load_values()
