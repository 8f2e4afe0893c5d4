from enum import Enum
from pathlib import Path
from pydantic import BaseModel, field_validator, model_validator
from typing import Any, Dict, List, Optional, Union

from exceptions import ConfigError
from settings import settings

ECHO_EXCLUDED = {"threads", "out", "log_level"}

class FormSource(str, Enum):
    DELTA = "delta"
    FILE = "file"
    ONES = "ones"

class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"

def _split_list(value: Any) -> Any:
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    return value

class ExperimentConfig(BaseModel):
    """One run of the runner: flags over the `key = value` config file over settings."""
    source: FormSource = FormSource.DELTA
    table: Optional[str] = None
    ells: List[int] = [1]
    xs: List[float] = [1000.0]
    z: Optional[float] = None
    c: Optional[float] = None
    cutoff_exponent: float = settings.cutoff_exponent
    level_exponent: float = settings.sieve_level_exponent
    out: str = "."
    threads: int = settings.threads
    output_format: OutputFormat = OutputFormat.CSV
    log_level: str = settings.log_level
    n: Optional[int] = None
    level: Optional[float] = None
    limit: Optional[int] = None
    ab_scan: bool = False
    qs: List[int] = [3, 5, 7]
    r_grid: List[float] = [float(r) for r in range(1, 13)]
    w_grid: List[float] = [0.1, 1.0, 10.0]

    @field_validator("qs", "r_grid", "w_grid", mode="before")
    def _parse_lists(cls, value: Any) -> Any:
        return _split_list(value)

    @field_validator("xs", mode="before")
    def _parse_grid(cls, value: Any) -> Any:
        # "1e3" is a valid grid point
        return [float(item) if isinstance(item, str) else item for item in _split_list(value)]

    @field_validator("ells", mode="before")
    def _parse_shifts(cls, value: Any) -> Any:
        return [int(float(item)) if isinstance(item, str) else item for item in _split_list(value)]

    @model_validator(mode="after")
    def _check_config(self) -> "ExperimentConfig":
        if not self.ells or any(ell == 0 for ell in self.ells):
            raise ConfigError(f"Shifts must be non-zero, got {self.ells}")
        if not self.xs or min(self.xs) < 1:
            raise ConfigError(f"x grid must be non-empty with x >= 1, got {self.xs}")
        self.xs = sorted(self.xs)
        if self.source == FormSource.FILE and not self.table:
            raise ConfigError("source = file needs --table")
        if self.z is not None and self.c is not None:
            raise ConfigError("Give either z or c, not both")
        if self.threads < 1:
            raise ConfigError(f"threads must be positive, got {self.threads}")
        return self

    @staticmethod
    def read_file(path: Union[str, Path]) -> Dict[str, str]:
        """`key = value` lines; `#` starts a comment, dashes in keys read as underscores."""
        values = {}
        try:
            lines = Path(path).read_text(encoding="utf-8").splitlines()
        except OSError as error:
            raise ConfigError(f"Cannot read config file {path}: {error}")
        for line_number, line in enumerate(lines, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}, line {line_number}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key.replace("-", "_")] = value
        return values

    @classmethod
    def create(cls, flags: Dict[str, Any], config_file: Optional[Union[str, Path]] = None) -> "ExperimentConfig":
        values = cls.read_file(config_file) if config_file else {}
        unknown = set(values) - set(cls.model_fields)
        if unknown:
            raise ConfigError(f"Unknown config keys: {', '.join(sorted(unknown))}")
        values.update({key: value for key, value in flags.items() if value is not None})
        return cls(**values)

    def echo(self) -> Dict[str, Any]:
        return self.model_dump(mode="json", exclude=ECHO_EXCLUDED)
