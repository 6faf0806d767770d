import sys
from pathlib import Path
from typing import IO, Any, Dict, List, Optional

import pandas as pd

from src.core.configs import settings
from src.models.experiment import ExperimentConfig
from src.utils.logging import get_logger

logger = get_logger(__name__)


def header_lines(config: ExperimentConfig, summary: Optional[Dict[str, Any]] = None) -> List[str]:
    """'#'-prefixed provenance: tool version, every resolved key, seed and summary."""
    lines = [f"# {settings.app_name} {settings.version}", f"# kind: {config.kind}"]
    if config.recipe:
        lines.append(f"# recipe: {config.recipe}")
    for key, value in config.provenance().items():
        if key in ("kind", "recipe"):
            continue
        lines.append(f"# {key} = {value}")
    lines.append(f"# seed: {config.seed}")
    if summary:
        lines.append("# summary: " + ", ".join(f"{key}={value}" for key, value in summary.items()))
    return lines


def default_path(config: ExperimentConfig) -> str:
    name = config.recipe or config.kind
    return str(Path(settings.output_dir) / f"{name}.csv")


def _write(handle: IO, frame: pd.DataFrame, lines: List[str]) -> None:
    handle.write("\n".join(lines) + "\n")
    frame.to_csv(handle, index=False, float_format="%.15g", lineterminator="\n")


def write_csv(
    frame: pd.DataFrame,
    config: ExperimentConfig,
    summary: Optional[Dict[str, Any]] = None,
) -> str:
    """
    Write frame with its provenance header.

    Args:
        frame: Dataset in the kind's column schema
        config: Resolved config echoed into the header
        summary: Optional scalar results appended as a summary line

    Returns:
        str: the path written, or "-" for stdout
    """
    path = config.out or default_path(config)
    lines = header_lines(config, summary)
    if path == "-":
        _write(sys.stdout, frame, lines)
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as handle:
            _write(handle, frame, lines)
        logger.info(f"Wrote {len(frame)} rows to {path}")
    return path
