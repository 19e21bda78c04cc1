"""Pydantic model type configuration."""

from pydantic import BaseModel, ConfigDict


class BaseModelStrict(BaseModel):
    """Base model with strict validation and immutable instances."""

    model_config = ConfigDict(
        frozen=True,
        validate_default=True,
        extra="forbid",
        arbitrary_types_allowed=False,
        str_max_length=65536,
    )
