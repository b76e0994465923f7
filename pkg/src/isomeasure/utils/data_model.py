import yaml

from pydantic import BaseModel, Field, ValidationError, model_validator
from typing import List, Literal, Optional


class ToleranceConfig(BaseModel):
    """
    Tolerances shared by all checks.

    Attributes:
        constructed (float):
            Isotropy tolerance for closed-form measures.
        solver (float):
            Isotropy tolerance for measures whose weights were solved for.
        equality (float):
            Relative tolerance for equality detection.
        lift (float):
            Tolerance of the three lifted-measure checks.
    """

    constructed: float = Field(1e-10, gt=0)
    solver: float = Field(1e-7, gt=0)
    equality: float = Field(1e-9, gt=0)
    lift: float = Field(1e-10, gt=0)


class SamplingConfig(BaseModel):
    """
    Configuration of Monte Carlo sampling.

    Attributes:
        samples (int):
            Default number of samples for chain checks. At least 10**4.
        chunk_size (int):
            Samples per random stream. Results depend on it, not on the
            number of threads.
        threads (int):
            Maximal number of worker threads.
    """

    samples: int = Field(100_000, ge=10_000)
    chunk_size: int = Field(50_000, ge=1_000)
    threads: int = Field(1, ge=1)


class GeneratorConfig(BaseModel):
    """
    Configuration of the random measure generator.

    Attributes:
        max_attempts (int):
            Resampling attempts before giving up.
        drop_weight (float):
            Weights at or below this value are dropped.
    """

    max_attempts: int = Field(50, ge=1)
    drop_weight: float = Field(1e-9, gt=0)


class ConfigModel(BaseModel):
    """
    Runtime configuration of the isomeasure CLI.

    Attributes:
        log_level (Literal["DEBUG", "INFO", "WARNING", "ERROR"]):
            Level of the root logger.
        tolerances (ToleranceConfig):
            Tolerances shared by all checks.
        sampling (SamplingConfig):
            Monte Carlo settings.
        generator (GeneratorConfig):
            Random generator settings.
    """

    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "WARNING"
    tolerances: ToleranceConfig = Field(default_factory=ToleranceConfig)
    sampling: SamplingConfig = Field(default_factory=SamplingConfig)
    generator: GeneratorConfig = Field(default_factory=GeneratorConfig)


class ConfigValidator:
    """Config file validator for correct schema of yaml file.

    Attributes:
        `model` (type[BaseModel]): Pydantic model of the configuration.
    """

    def __init__(self, model: type[BaseModel]) -> None:
        """Initializes the ConfigValidator.

        Args:
            model (type[BaseModel]): Pydantic model of the configuration.
        """
        self.model = model

    def validate_data(self, config_path: str) -> BaseModel:
        """Validates the file at config_path against the model.

        Args:
            config_path (str): Path to config yaml file.

        Returns:
            BaseModel: The validated configuration.

        Raises:
            TypeError: If data is not validated correctly.
        """
        with open(config_path, "r") as yaml_file:
            data = yaml.safe_load(yaml_file) or {}
        try:
            return self.model(**data)
        except (ValidationError, TypeError):
            raise TypeError("Config file is not correct.")


class AtomModel(BaseModel):
    """One atom of a measure: direction `u` and weight `c`."""

    u: List[float]
    c: float = Field(..., gt=0)


class MeasureModel(BaseModel):
    """
    JSON schema of a finitely supported measure.

    Attributes:
        dim (int): Ambient dimension.
        atoms (List[AtomModel]): Atoms sorted lexicographically by `u`.
    """

    dim: int = Field(..., ge=2)
    atoms: List[AtomModel] = Field(..., min_length=1)

    @model_validator(mode="after")
    def check_lengths(self) -> "MeasureModel":
        for atom in self.atoms:
            if len(atom.u) != self.dim:
                raise ValueError(
                    f"Atom direction has {len(atom.u)} entries, "
                    f"expected {self.dim}."
                )
        return self


class HalfspaceModel(BaseModel):
    """Halfspace a.x <= b."""

    a: List[float]
    b: float


class PolytopeModel(BaseModel):
    """JSON schema shared by both polytope representations."""

    dim: int = Field(..., ge=2)
    vertices: List[List[float]]
    halfspaces: List[HalfspaceModel]


class VerificationReport(BaseModel):
    """
    Outcome of checking one of the two volume inequalities.

    Attributes:
        theorem (Literal["T1", "T2"]):
            T1 bounds the polar body from above, T2 the body from below.
        n (int):
            Dimension.
        computed_volume (float):
            Volume of the polar body (T1) or of the body (T2).
        bound (float):
            Closed-form bound for dimension n.
        gap (float):
            bound - volume for T1, volume - bound for T2.
        inequality_holds (bool):
            gap >= -1e-9 * bound.
        equality_flag (bool):
            Whether the support is a regular simplex; then |gap| must not
            exceed equality_gap_relative * bound.
        tolerances (dict):
            Every threshold used to build the report.
    """

    theorem: Literal["T1", "T2"]
    n: int
    computed_volume: float = Field(..., serialization_alias="volume")
    bound: float
    gap: float
    inequality_holds: bool = Field(..., serialization_alias="holds")
    equality_flag: bool = Field(..., serialization_alias="equality")
    tolerances: dict

    @model_validator(mode="after")
    def check_consistency(self) -> "VerificationReport":
        tol = self.tolerances.get("holds_relative", 1e-9)
        if self.inequality_holds != (self.gap >= -tol * self.bound):
            raise ValueError("inequality_holds disagrees with the gap.")
        equality_tol = self.tolerances.get("equality_gap_relative", 1e-7)
        if self.equality_flag and abs(self.gap) > equality_tol * self.bound:
            raise ValueError(
                "equality_flag is set but the gap is not negligible."
            )
        return self

    def to_json(self) -> dict:
        return self.model_dump(by_alias=True)


class CheckModel(BaseModel):
    """
    One named check of a chain report.

    Attributes:
        name (str): What was checked.
        passed (bool): Outcome.
        details (dict): Every quantity the outcome was decided on.
    """

    name: str
    passed: bool
    details: dict = Field(default_factory=dict)


class ChainReport(BaseModel):
    """
    Report of a pointwise and integral check of one proof chain.

    Attributes:
        theorem (Literal["T1", "T2"]): Which chain was followed.
        n (int): Dimension.
        samples (int): Monte Carlo sample count.
        seed (int): Seed of every random stream.
        probes (int): Number of pointwise probes.
        checks (List[CheckModel]): All checks, in evaluation order.
    """

    theorem: Literal["T1", "T2"]
    n: int
    samples: int
    seed: int
    probes: int
    checks: List[CheckModel]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def check(self, name: str) -> Optional[CheckModel]:
        """Look up a check by name.

        Args:
            name (str): Name of the check.

        Returns:
            Optional[CheckModel]: The check, or None when it is absent.
        """
        return next((c for c in self.checks if c.name == name), None)

    def to_json(self) -> dict:
        data = self.model_dump()
        data["passed"] = self.passed
        return data
