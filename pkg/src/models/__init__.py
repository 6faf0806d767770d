from src.models.experiment import ExperimentConfig
from src.models.params import ModelParams, SphereAngle
from src.models.results import ExtractionResult, IdentityCheck, PeakRecord, PeakTrack

__all__ = [
    "ExperimentConfig",
    "ModelParams",
    "SphereAngle",
    "ExtractionResult",
    "IdentityCheck",
    "PeakRecord",
    "PeakTrack",
]
