from enum import Enum


class ExperimentStatus(Enum):
    success: int = 0
    failure: int = 1
    suite_failure: int = 2
