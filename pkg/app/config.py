"""
Configuration module for stabring
"""
import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Mapping, Optional

from dotenv import load_dotenv

from app.errors import UsageError

# Load environment variables
load_dotenv()

# Project paths
PROJECT_ROOT = Path(__file__).parent.parent

# Enumeration guard: a-priori box cells before an enumeration is refused
CELL_LIMIT = int(os.getenv("CE_CELL_LIMIT", "100000000"))

# Worker pool width (1 = run in-process)
JOBS = int(os.getenv("CE_JOBS", "1"))

# Output
OUTPUT_FORMAT = os.getenv("CE_OUTPUT_FORMAT", "json").lower()
OUTPUT_FORMATS = ("json", "csv", "text")

# Logging
LOG_LEVEL = os.getenv("CE_LOG_LEVEL", "WARNING").upper()
LOG_FILE = os.getenv("CE_LOG_FILE", "")

# Largest integer JSON readers handle exactly; bigger values are emitted as strings
JSON_SAFE_INT = 2 ** 53

# Default degree bounds of the locus check, keyed by ell
LOCUS_DEGREE_BOUNDS = {3: 4, 4: 3}

# Enumeration caps for the almost-Gorenstein checks, keyed by ell
AGOR_ENUMERATION_CAPS = {3: 7, 4: 5, 5: 3}


@dataclass(frozen=True)
class RunConfig:
    """
    Settings of one CLI run.

    Exactly one graph source (cycle length or graph file) is allowed.
    """
    cycle: Optional[int] = None
    graph_path: Optional[str] = None
    ell: Optional[int] = None
    level: Optional[int] = None
    degree: Optional[int] = None
    max_degree: Optional[int] = None
    max_dilation: Optional[int] = None
    output_format: str = OUTPUT_FORMAT
    jobs: Optional[int] = None
    cell_limit: Optional[int] = None

    @classmethod
    def from_mapping(cls, values: Mapping[str, Any]) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(values) - known)
        if unknown:
            raise UsageError(f"unknown configuration keys: {', '.join(unknown)}")
        config = cls(**{k: v for k, v in values.items() if v is not None})
        config.validate()
        return config

    def validate(self):
        if self.cycle is not None and self.graph_path is not None:
            raise UsageError("give either --cycle or --graph, not both")
        if self.output_format not in OUTPUT_FORMATS:
            raise UsageError(f"unknown output format: {self.output_format}")
        for name in ("max_degree", "max_dilation", "jobs", "cell_limit"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise UsageError(f"{name.replace('_', '-')} must be positive")
        if self.degree is not None and self.degree < 0:
            raise UsageError("degree must be nonnegative")
        if self.ell is not None and self.ell < 1:
            raise UsageError("ell must be positive")

    @property
    def has_graph(self) -> bool:
        return self.cycle is not None or self.graph_path is not None

    def require_graph(self):
        if not self.has_graph:
            raise UsageError("a graph source is required: --cycle N or --graph PATH")
