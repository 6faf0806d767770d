from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, model_validator


class PeakRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    center_n: int
    height: float
    n_start: int
    n_end: int
    threshold: float

    @model_validator(mode="after")
    def _check_extent(self) -> "PeakRecord":
        if not self.n_start <= self.center_n <= self.n_end:
            raise ValueError(
                f"center {self.center_n} outside extent ({self.n_start}, {self.n_end})"
            )
        if self.height < self.threshold:
            raise ValueError(f"height {self.height} below threshold {self.threshold}")
        return self

    @property
    def extent(self) -> Tuple[int, int]:
        return (self.n_start, self.n_end)


class PeakTrack(BaseModel):
    """First and second peak centers of one echo curve."""

    model_config = ConfigDict(frozen=True)

    k: float
    first: Optional[PeakRecord] = None
    second: Optional[PeakRecord] = None
    n_peaks: int = 0


class IdentityCheck(BaseModel):
    """
    Both sides of the observable-difference identity at one time.

    rhs = primed_sum - correction, where correction = (1 - M_kk) A_kk^{H0}
    restores the single (k, k) term the primed sum leaves out.
    """

    model_config = ConfigDict(frozen=True)

    n: int
    lhs: float
    rhs: float
    absdiff: float
    primed_sum: float
    correction: float


class ExtractionResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    magnitude: float
    phase: float
    residual_rms: float
