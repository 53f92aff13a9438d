"""Base-regressor specifications shared by every estimator."""

import math
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, PositiveInt

ModelKind = Literal["ridge", "forest", "net"]


class RidgeParams(BaseModel):
    """Closed-form ridge. The intercept is never penalized."""

    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)

    lam: float = Field(default=1.0, ge=0.0, alias="lambda", description="L2 penalty")


class ForestParams(BaseModel):
    """Bagged variance-reduction CART trees."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    n_trees: int = Field(default=100, ge=1)
    max_depth: int = Field(default=10, ge=1)
    min_leaf: int = Field(default=5, ge=1)
    mtry: int | None = Field(
        default=None, ge=1, description="Features tried per split; None means ceil(p/3)"
    )
    bootstrap: bool = Field(default=True, description="Resample rows for every tree")

    def resolve_mtry(self, p: int) -> int:
        if self.mtry is None:
            return max(1, math.ceil(p / 3))
        return self.mtry


class NetParams(BaseModel):
    """Fully connected tanh network trained by full-batch gradient descent."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    hidden_widths: tuple[PositiveInt, ...] = Field(default=(64, 64))
    epochs: int = Field(default=300, ge=0)
    step_size: float = Field(default=1e-3, gt=0.0)
    shared_rep: bool = Field(
        default=False,
        description="One shared trunk with a treated and a control head",
    )


class ModelSpec(BaseModel):
    """Which base regressor to use and its hyperparameters.

    Only the block matching ``kind`` is read; the others keep their defaults.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: ModelKind = "ridge"
    ridge: RidgeParams = Field(default_factory=RidgeParams)
    forest: ForestParams = Field(default_factory=ForestParams)
    net: NetParams = Field(default_factory=NetParams)

    @property
    def tag(self) -> str:
        return self.kind

    @property
    def uses_heads(self) -> bool:
        """True when arms share one two-head network."""
        return self.kind == "net" and self.net.shared_rep
