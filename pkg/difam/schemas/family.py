"""The JSON document a family is read from and written to."""

from pydantic import BaseModel, ConfigDict, Field, field_validator

from difam.services.group import GroupError, parse_group_literal


class FamilyDocument(BaseModel):
    """Blocks over a group. Parameters are recomputed; ``lambda`` is only cross-checked."""

    model_config = ConfigDict(populate_by_name=True)

    name: str | None = None
    group: list[int] = Field(min_length=1)
    blocks: list[list[list[int]]] = Field(min_length=1)
    lam: int | None = Field(default=None, alias="lambda")
    gs_mode: bool = False

    @field_validator("group", mode="before")
    @classmethod
    def group_may_be_a_literal(cls, value: object) -> object:
        if isinstance(value, str):
            try:
                return list(parse_group_literal(value).orders)
            except GroupError as exc:
                raise ValueError(str(exc)) from exc
        return value
