"""
Pydantic domain types shared by solvers, data generators and the bench.
"""

from frappe_bench.models.dataset import Dataset, WeightVector
from frappe_bench.models.privacy import EVEN_SPLIT, NoiseScales, PrivacyBudget, Stage
from frappe_bench.models.solver_config import (
    AlgorithmName,
    BandwidthSchedule,
    BaselineConfig,
    BaselineOverrides,
    FrappeConfig,
    KernelName,
)

__all__ = [
    "AlgorithmName",
    "BandwidthSchedule",
    "BaselineConfig",
    "BaselineOverrides",
    "Dataset",
    "EVEN_SPLIT",
    "FrappeConfig",
    "KernelName",
    "NoiseScales",
    "PrivacyBudget",
    "Stage",
    "WeightVector",
]
