from network_aggregation.experiments.experiment_response import (
    ExperimentResponse)
from network_aggregation.experiments.experiment_status import (
    ExperimentStatus)


def test_serialization():
    response = ExperimentResponse(ExperimentStatus.suite_failure,
                                  {"passed": False, "suites": []},
                                  "Failing suites: ['pinsker']")
    assert ExperimentResponse.from_bytes(response.to_bytes()) == response
    assert response.exit_code == 2


def test_failure_drops_result():
    response = ExperimentResponse(ExperimentStatus.failure, {"rows": 3},
                                  "Traceback ...")
    restored = ExperimentResponse.from_str(response.to_str())
    assert restored.result is None
    assert restored.message == "Traceback ..."
    assert restored.exit_code == 1
    assert ExperimentResponse(ExperimentStatus.success, {}, "").exit_code == 0
