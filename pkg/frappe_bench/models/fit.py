"""
Solver outputs: the fitted weights plus a per-iteration trace.
"""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from frappe_bench.models.dataset import WeightVector

TRACE_COLUMNS = ("v", "t", "objective", "weight_change", "density_estimate", "elapsed", "weight_norm")


class TraceRecord(BaseModel):
    """One inner iteration. Baselines have a single outer loop (v = 1) and no density."""

    model_config = ConfigDict(frozen=True)

    v: int
    t: int
    objective: float
    weight_change: float
    density_estimate: Optional[float] = None
    elapsed: float = 0.0
    weight_norm: float = Field(ge=0)


class FitResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    weights: WeightVector
    trace: List[TraceRecord] = Field(default_factory=list)
    noise_draws: int = 0
    diagnostics: Dict[str, Any] = Field(default_factory=dict)
