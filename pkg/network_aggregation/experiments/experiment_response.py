import json
from typing import NamedTuple, Optional

import jsonpickle

from network_aggregation.experiments.experiment_status import (
    ExperimentStatus)


class ExperimentResponse(NamedTuple):
    """
    A class wrapping the results of one CLI subcommand
    """

    status: ExperimentStatus
    result: Optional[dict]
    message: str

    @property
    def exit_code(self) -> int:
        return self.status.value

    def to_dict(self):
        """
        Convert the ExperimentResponse into a serializable dictionary
        """
        response_dict: dict = {}

        response_dict["status"] = self.status.value
        if self.status == ExperimentStatus.failure:
            response_dict["result"] = None
        else:
            response_dict["result"] = self.result
        response_dict["message"] = jsonpickle.encode(self.message)
        return response_dict

    def to_str(self):
        """
        Convert the ExperimentResponse into a str
        """
        response_dict = self.to_dict()
        return json.dumps(response_dict, allow_nan=False)

    def to_bytes(self):
        """
        Convert the ExperimentResponse into a byte-stream
        """
        return self.to_str().encode("utf-8")

    @classmethod
    def from_bytes(cls, response: bytes):
        """
        Create an ExperimentResponse from bytes

        Args:
            response (bytes): bytes to turn into ExperimentResponse

        Returns:
            ExperimentResponse: new ExperimentResponse object
        """

        return cls.from_str(response.decode("utf-8"))

    @classmethod
    def from_str(cls, response: str):
        """
        Create an ExperimentResponse from a serialized dictionary stored as
            string
        """

        response_dict = json.loads(response)
        return cls.from_dict(response_dict)

    @classmethod
    def from_dict(cls, response: dict):
        """
        Create an ExperimentResponse from a dictionary
        """

        status = ExperimentStatus(int(response["status"]))
        message = jsonpickle.decode(response["message"])

        return ExperimentResponse(status, response["result"], message)
