"""
Experiment configuration files

A config file is a flat JSON object whose keys are exactly the fields of
ExperimentConfig. Missing keys take the defaults below, unknown keys are
rejected.
"""
import os
from typing import List, NamedTuple, Optional

import jsonpickle

import network_aggregation.globals as GV
from network_aggregation.errors import InvalidConfig
from network_aggregation.solver.logistic_solver import FitOptions
from network_aggregation.utils.file_utils import config_hash

KIND_HARD = "hard"
KIND_CUSTOM = "custom-graph-file"
KINDS = (KIND_HARD, KIND_CUSTOM)
# Keys that do not change computed values
OUTPUT_ONLY_KEYS = ("output_dir", "replicates", "dump_logits")


class ConfigFile:
    """The "ConfigFile" object. Internally based on ``jsonpickle``."""

    def __init__(self, name: str):
        self.name = name
        self.load_from_file()

    def load_from_file(self):
        """
        Load config from file

        Raises:
            InvalidConfig: the file is missing or is not a JSON object
        """
        try:
            with open(self.name, 'r', encoding="utf-8") as config_file:
                self._db = jsonpickle.decode(config_file.read(), safe=True)
        except FileNotFoundError as exception_handle:
            raise InvalidConfig(
                f"Config file {self.name} does not exist"
            ) from exception_handle
        except ValueError as exception_handle:
            raise InvalidConfig(
                f"Config file {self.name} is not valid JSON: "
                f"{exception_handle}") from exception_handle
        if not isinstance(self._db, dict):
            raise InvalidConfig(
                f"Config file {self.name} must hold a JSON object")

    def get(self, key, *args):
        """Retrieves a config entry."""
        return self._db.get(str(key), *args)

    def __contains__(self, item):
        return str(item) in self._db

    def __getitem__(self, item):
        return self._db[str(item)]

    def __len__(self):
        return len(self._db)

    def all(self):
        """Returns entire config dictionary"""
        return self._db


class ExperimentConfig(NamedTuple):
    """
    Everything a subcommand needs

    kind selects the data source: "hard" samples hard instances for every
    seed, "custom-graph-file" reads `dataset_path` and `graph_path`.
    graph_depth is the cyclic path length D used by run (defaults to 4k),
    window the coverage window M reported by run (defaults to k, or to the
    smallest covering window of a custom path). The verify_* keys size the
    verification suites, relevance_ridge is the penalty of the relevance
    suite fits.
    """
    kind: str = KIND_HARD
    k: int = 4
    n: int = 10000
    seeds: List[int] = [0]
    dataset_path: Optional[str] = None
    graph_path: Optional[str] = None
    graph_depth: Optional[int] = None
    window: Optional[int] = None
    grad_tol: Optional[float] = None
    max_iters: int = GV.DEFAULT_MAX_ITERS
    ridge: float = 0.0
    backtrack: float = GV.DEFAULT_BACKTRACK
    initial_step: float = GV.DEFAULT_INITIAL_STEP
    fit_intercept: bool = False
    depths: List[int] = [8, 16, 32, 64, 128]
    windows: List[int] = []
    passes: List[int] = []
    output_dir: str = str(GV.DEFAULT_OUTPUT_DIR)
    replicates: int = 1
    dump_logits: bool = False
    verify_k: int = 4
    verify_n: int = 100000
    verify_depth: int = 16
    verify_seed: int = 0
    pinsker_pairs: int = 10000
    noise_samples: int = 1000000
    relevance_n: int = 200000
    relevance_ridge: float = 2e-3

    @classmethod
    def from_file(cls, path: str) -> "ExperimentConfig":
        """
        Load and validate a config file
        """
        return cls.from_dict(ConfigFile(path).all())

    @classmethod
    def from_dict(cls, config_dict: dict) -> "ExperimentConfig":
        """
        Build a validated config from a dictionary of field values

        Raises:
            InvalidConfig: unknown keys, wrong types or invalid values
        """
        unknown = sorted(set(config_dict) - set(cls._fields))
        if unknown:
            raise InvalidConfig(f"Unknown config keys: {unknown}")
        values = {}
        for key, raw_value in config_dict.items():
            values[key] = _coerce(key, raw_value, cls._field_defaults[key])
        return cls(**values).validate()

    def with_overrides(self, output_dir: Optional[str] = None,
                       seed: Optional[int] = None) -> "ExperimentConfig":
        """
        Apply the --out and --seed CLI flags
        """
        config = self
        if output_dir is not None:
            config = config._replace(output_dir=output_dir)
        if seed is not None:
            config = config._replace(seeds=[seed])
        return config.validate()

    def validate(self) -> "ExperimentConfig":
        """
        Raises:
            InvalidConfig: a value is out of range, a grid is empty, seeds
                repeat or a referenced file does not exist
        """
        if self.kind not in KINDS:
            raise InvalidConfig(f"kind must be one of {KINDS}, got "
                                f"'{self.kind}'")
        if self.kind == KIND_HARD and self.k < 2:
            raise InvalidConfig(f"Hard instances need k >= 2, got {self.k}")
        if self.n < 1:
            raise InvalidConfig(f"n must be >= 1, got {self.n}")
        if not self.seeds:
            raise InvalidConfig("seeds must not be empty")
        if len(set(self.seeds)) != len(self.seeds):
            raise InvalidConfig(f"seeds must be distinct, got {self.seeds}")
        if any(not 0 <= seed < 2 ** 64 for seed in self.seeds):
            raise InvalidConfig("seeds must be unsigned 64-bit integers")
        if self.kind == KIND_CUSTOM:
            for key in ("dataset_path", "graph_path"):
                if getattr(self, key) is None:
                    raise InvalidConfig(f"kind '{KIND_CUSTOM}' needs {key}")
        for key in ("dataset_path", "graph_path"):
            path = getattr(self, key)
            if path is not None and not os.path.isfile(path):
                raise InvalidConfig(f"{key} '{path}' does not exist")
        if not self.depths and not self.passes:
            raise InvalidConfig("depths and passes must not both be empty")
        for key in ("depths", "windows", "passes"):
            if any(value < 1 for value in getattr(self, key)):
                raise InvalidConfig(f"{key} entries must be >= 1")
        for key in ("graph_depth", "window"):
            value = getattr(self, key)
            if value is not None and value < 1:
                raise InvalidConfig(f"{key} must be >= 1, got {value}")
        if self.replicates < 1:
            raise InvalidConfig(
                f"replicates must be >= 1, got {self.replicates}")
        for key in ("verify_k",):
            if getattr(self, key) < 2:
                raise InvalidConfig(f"{key} must be >= 2")
        for key in ("verify_n", "verify_depth", "pinsker_pairs",
                    "relevance_n"):
            if getattr(self, key) < 1:
                raise InvalidConfig(f"{key} must be >= 1")
        if self.noise_samples < 2:
            raise InvalidConfig("noise_samples must be >= 2")
        if self.relevance_ridge < 0:
            raise InvalidConfig(
                f"relevance_ridge must be >= 0, got {self.relevance_ridge}")
        try:
            self.fit_options()
        except ValueError as exception_handle:
            raise InvalidConfig(str(exception_handle)) from exception_handle
        return self

    def fit_options(self, grad_tol: Optional[float] = None) -> FitOptions:
        """
        Solver options, `grad_tol` (when given) replaces the solver default
            if the config does not set one
        """
        if self.grad_tol is not None:
            tolerance = self.grad_tol
        elif grad_tol is not None:
            tolerance = grad_tol
        else:
            tolerance = GV.DEFAULT_GRAD_TOL
        return FitOptions(grad_tol=tolerance, max_iters=self.max_iters,
                          ridge=self.ridge, backtrack=self.backtrack,
                          initial_step=self.initial_step,
                          fit_intercept=self.fit_intercept).validate()

    @property
    def scan_windows(self) -> List[int]:
        return list(self.windows) if self.windows else [self.k]

    @property
    def scan_depths(self) -> List[int]:
        """
        Union of `depths` and k * `passes`, ascending
        """
        return sorted(set(self.depths) | {self.k * p for p in self.passes})

    @property
    def run_depth(self) -> int:
        if self.graph_depth is not None:
            return self.graph_depth
        return 4 * self.k

    def to_dict(self) -> dict:
        return {key: (list(value) if isinstance(value, list) else value)
                for key, value in self._asdict().items()}

    def hash(self) -> str:
        """
        16 hex digit fingerprint written into every output row, covers
            only the keys that change computed values
        """
        return config_hash({key: value for key, value in self.to_dict().items()
                            if key not in OUTPUT_ONLY_KEYS})


def _coerce(key: str, value, default):
    # bool is a subclass of int, check it first
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise InvalidConfig(f"{key} must be a boolean, got {value!r}")
        return value
    if isinstance(default, list):
        if not isinstance(value, list) or any(
                isinstance(item, bool) or not isinstance(item, int)
                for item in value):
            raise InvalidConfig(f"{key} must be a list of integers")
        return [int(item) for item in value]
    if value is None:
        if default is None:
            return None
        raise InvalidConfig(f"{key} must not be null")
    if key in ("grad_tol", "ridge", "backtrack", "initial_step",
               "relevance_ridge"):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise InvalidConfig(f"{key} must be a number, got {value!r}")
        return float(value)
    if key in ("kind", "dataset_path", "graph_path", "output_dir"):
        if not isinstance(value, str):
            raise InvalidConfig(f"{key} must be a string, got {value!r}")
        return value
    if isinstance(value, bool) or not isinstance(value, int):
        raise InvalidConfig(f"{key} must be an integer, got {value!r}")
    return value
