from typing import Any, Mapping

from pydantic import BaseModel, Field, computed_field

from core.commons.enums import OperationStatus


class HandlerResponse(BaseModel):
    operation_command: str
    operation_status: OperationStatus
    output_dir: str
    outputs: list[str] = Field(default_factory=list)
    response_payload: Mapping[str, Any] = Field(default_factory=dict)
    message: str = ""

    @computed_field  # type: ignore[misc]
    @property
    def generated_message(self) -> str:
        return f"{self.operation_command} {self.operation_status.name} in {self.output_dir}"
