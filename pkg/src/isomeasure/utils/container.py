import os

from dependency_injector import containers, providers
from pathlib import Path

from src.isomeasure.utils.chain import chain_verify_thm1, chain_verify_thm2
from src.isomeasure.utils.data_model import ConfigModel, ConfigValidator
from src.isomeasure.utils.generators import (
    perturb_and_repair,
    random_isotropic_measure,
)
from src.isomeasure.utils.input_handler import InputHandler
from src.isomeasure.utils.output_handler import JSONOutputHandler
from src.isomeasure.utils.sampling import THREADS_ENV, default_threads
from src.isomeasure.utils.verifier import (
    verify_both,
    verify_theorem1,
    verify_theorem2,
)

DEFAULT_CONFIG_PATH = "config.yaml"


class Container(containers.DeclarativeContainer):
    """
    Dependency injection container wiring the library functions to the
    runtime configuration.

    Attributes:
        `config` (providers.Configuration):
            Configuration settings loaded from `config.yaml`.

        `config_validator` (providers.Singleton):
            ConfigValidator for the ConfigModel schema.

        `random_measure` (providers.Callable):
            `random_isotropic_measure` with the configured attempt count,
            drop threshold and solver tolerance. Called with n, m and seed.

        `perturbed_measure` (providers.Callable):
            `perturb_and_repair` with the configured solver tolerance.

        `verifier` (providers.Selector):
            Select the theorem check(s) based on `config.verify_which`.

        `chain_runner` (providers.Selector):
            Select the chain check based on `config.chain_theorem`, with the
            configured chunk size and thread count.

        `input_handler` (providers.Factory):
            InputHandler, called with the path to read.

        `output_handler` (providers.Singleton):
            JSONOutputHandler.
    """

    config = providers.Configuration(yaml_files=[DEFAULT_CONFIG_PATH])

    config_validator = providers.Singleton(
        ConfigValidator, model=providers.Object(ConfigModel)
    )

    random_measure = providers.Callable(
        random_isotropic_measure,
        max_attempts=config.generator.max_attempts,
        tol=config.tolerances.solver,
        drop=config.generator.drop_weight,
    )

    perturbed_measure = providers.Callable(
        perturb_and_repair,
        tol=config.tolerances.solver,
        drop=config.generator.drop_weight,
    )

    verifier = providers.Selector(
        config.verify_which,
        t1=providers.Callable(verify_theorem1, tol=config.tolerances.solver),
        t2=providers.Callable(verify_theorem2, tol=config.tolerances.solver),
        both=providers.Callable(verify_both, tol=config.tolerances.solver),
    )

    chain_runner = providers.Selector(
        config.chain_theorem,
        t1=providers.Callable(
            chain_verify_thm1,
            chunk_size=config.sampling.chunk_size,
            threads=config.sampling.threads,
            tol=config.tolerances.solver,
        ),
        t2=providers.Callable(
            chain_verify_thm2,
            chunk_size=config.sampling.chunk_size,
            threads=config.sampling.threads,
            tol=config.tolerances.solver,
        ),
    )

    input_handler = providers.Factory(InputHandler)

    output_handler = providers.Singleton(JSONOutputHandler)


def build_container(config_path: str | Path | None = None) -> Container:
    """Create a container from a validated configuration file.

    Without a path, `config.yaml` in the working directory is used when it
    exists and the schema defaults otherwise. A set ISOMEASURE_THREADS
    overrides `sampling.threads`.

    Raises:
        FileExistsError: If an explicit config_path does not exist.
        TypeError: If the configuration does not match the schema.
    """
    container = Container()
    if config_path is not None and not Path(config_path).exists():
        raise FileExistsError(f"Config file {config_path} does not exist.")
    path = Path(config_path or DEFAULT_CONFIG_PATH)
    if path.exists():
        model = container.config_validator().validate_data(str(path))
    else:
        model = ConfigModel()
    container.config.from_dict(model.model_dump())
    if os.environ.get(THREADS_ENV):
        container.config.sampling.threads.from_value(default_threads())
    return container
