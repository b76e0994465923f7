import json
import sys

from abc import ABC, abstractmethod
from pathlib import Path


class OutputHandler(ABC):
    """Abstract class for handling output."""

    @abstractmethod
    def save(self, data: dict | list, path: Path | None = None) -> None:
        """Writes data to a file, or to stdout when path is None.

        This method must be implemented by subclasses.

        Args:
            data (dict | list): JSON serializable payload.
            path (Path | None): Target file.
        """
        pass


class JSONOutputHandler(OutputHandler):
    """Deterministic UTF-8 JSON: sorted keys, fixed indentation."""

    def dumps(self, data: dict | list) -> str:
        """Serialize data as indented JSON with sorted keys.

        Args:
            data (dict | list): JSON compatible data.

        Returns:
            str: The JSON text ending with a newline.
        """
        return json.dumps(data, sort_keys=True, indent=2) + "\n"

    def save(self, data: dict | list, path: Path | None = None) -> None:
        """Transform data into JSON and write it to path or stdout."""
        text = self.dumps(data)
        if path is None:
            sys.stdout.write(text)
            return
        with open(path, "w", encoding="utf-8") as json_file:
            json_file.write(text)
