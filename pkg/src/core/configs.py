from typing import Optional

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    app_name: str = "echo-lab"
    description: str = "Fidelity and echo simulations of the kicked two-component BEC"
    version: str = "1.0.0"

    log_level: str = "INFO"
    use_colors: Optional[bool] = None
    workers: int = 1
    output_dir: str = "."

    # Numerical contracts
    unitarity_tol: float = 1e-12
    hermitian_tol: float = 1e-12
    norm_drift_tol: float = 1e-10
    probability_tol: float = 1e-10
    expectation_imag_tol: float = 1e-10

    # Peak detection
    peak_threshold_frac: float = 0.1
    peak_min_gap: int = 20

    # Interference grid
    grid_points: int = 2048
    grid_half_span: float = 10.0

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="ECHO_LAB_",
        case_sensitive=False,
        extra="ignore",
    )


settings = Settings()
