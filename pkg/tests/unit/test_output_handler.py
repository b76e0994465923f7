import pytest

from pathlib import Path
from unittest.mock import Mock, patch, mock_open

from src.isomeasure.utils.output_handler import (
    JSONOutputHandler,
    OutputHandler,
)


def test_output_handler_init() -> None:
    """Test that the handlers are initialized correctly.

    Assert:
        JSONOutputHandler is initialized without raising an error.
        The abstract OutputHandler cannot be instantiated.
    """
    JSONOutputHandler()
    with pytest.raises(TypeError):
        OutputHandler()


def test_json_dumps_is_deterministic() -> None:
    """Test the text produced for a payload.

    Asserts:
        Keys are sorted, indentation is fixed, a newline ends the text.
    """
    text = JSONOutputHandler().dumps({"b": 1, "a": [1.5, 2]})
    assert text == '{\n  "a": [\n    1.5,\n    2\n  ],\n  "b": 1\n}\n'


def test_json_handler_save_to_file() -> None:
    """Test that `save` of JSONOutputHandler handles file saving correctly.

    Asserts:
        The mocked_json_dumps is called once with correct arguments.
        The mocked_open is called once with correct arguments.
        The mocked_open().write is called once with correct arguments.
    """
    mock_data = {"volume": 4.0}
    mock_path = Mock(spec=Path)
    json_handler = JSONOutputHandler()
    with (
        patch("json.dumps", return_value="{}") as mocked_json_dumps,
        patch("builtins.open", mock_open()) as mocked_open,
    ):
        json_handler.save(mock_data, mock_path)
        mocked_json_dumps.assert_called_once_with(
            mock_data, sort_keys=True, indent=2
        )
        mocked_open.assert_called_once_with(
            mock_path, "w", encoding="utf-8"
        )
        mocked_open().write.assert_called_once_with("{}\n")


def test_json_handler_save_to_stdout(capsys: pytest.CaptureFixture) -> None:
    """Test that `save` without a path writes to stdout.

    Asserts:
        The payload is printed and nothing is opened.
    """
    with patch("builtins.open") as mocked_open:
        JSONOutputHandler().save([1, 2])
        mocked_open.assert_not_called()
    assert capsys.readouterr().out == "[\n  1,\n  2\n]\n"
