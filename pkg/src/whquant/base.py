from pydantic import BaseModel, ConfigDict


class ConfiguredBase(BaseModel):
    """Configured base model for user-facing configuration"""

    model_config = ConfigDict(populate_by_name=True, extra="forbid")


class ArrayModel(BaseModel):
    """
    Immutable base model for numerical results.

    Arrays are stored read-only (see :mod:`whquant.types.common`),
    and the model itself is frozen, so results can be shared between threads.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True, extra="forbid")
