import json
import numpy as np

from pathlib import Path
from pydantic import ValidationError

from src.isomeasure.utils.data_model import MeasureModel
from src.isomeasure.utils.measure import DiscreteMeasure


class InputHandler:
    """Class to handle load of measures and value files.

    Measures are stored as JSON objects {"dim": n, "atoms": [{"u": ..., "c":
    ...}]}. Value files hold a JSON list with one positive value per atom.

    Attributes:
        path (Path): Path to the input file.
    """

    def __init__(self, path: Path):
        """Initializes the InputHandler.

        Args:
            path (Path): Path to the input file.
        """
        self.path = path

    def _read_json(self) -> object:
        """Check the file and parse its JSON content.

        Raises:
            FileExistsError: If file at provided path does not exist.
            ValueError: If suffix of the file is not .json.
        """
        if not self.path.exists():
            raise FileExistsError(f"File {self.path} does not exist.")
        if self.path.suffix != ".json":
            raise ValueError("Unsupported file format. Use .json file.")
        with open(self.path, encoding="utf-8") as json_file:
            return json.load(json_file)

    def load_measure(self) -> DiscreteMeasure:
        """Load a measure file.

        Returns:
            DiscreteMeasure: Normalized, merged and sorted measure.

        Raises:
            FileExistsError: If file at provided path does not exist.
            ValueError: If suffix of the file is not .json.
            TypeError: If the content does not match the measure schema.
        """
        data = self._read_json()
        try:
            model = MeasureModel.model_validate(data)
        except ValidationError as error:
            raise TypeError(f"Measure file is not correct: {error}")
        return DiscreteMeasure.from_model(model)

    def load_values(self) -> np.ndarray:
        """Load a flat list of atom values.

        Raises:
            FileExistsError: If file at provided path does not exist.
            ValueError: If suffix of the file is not .json.
            TypeError: If the content is not a flat list of numbers.
        """
        data = self._read_json()
        if not isinstance(data, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool)
            for v in data
        ):
            raise TypeError("Values file must hold a flat list of numbers.")
        return np.array(data, dtype=float)
