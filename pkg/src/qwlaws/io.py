"""Experiment configuration and deterministic CSV / JSON output."""

from __future__ import annotations

import json
import math
from collections.abc import Iterable, Sequence
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .initial_state import (
    DEFAULT_GRID_SIZE,
    DEFAULT_TAIL_TOL,
    WEIGHT_KINDS,
    InitCoin,
    WeightSpec,
    load_tabulated,
)

__all__ = ["ExperimentConfig", "ConfigError", "fmt", "write_csv", "write_json"]


class ConfigError(ValueError):
    pass


def fmt(value) -> str:
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    return format(float(value), ".17g")


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    Path(path).write_bytes(("\n".join(lines) + "\n").encode("ascii"))


def write_json(path: Path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", newline="\n")


def _pair(value, name: str) -> tuple[float, float]:
    try:
        re, im = value
        return float(re), float(im)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a [re, im] pair, got {value!r}") from None


@dataclass
class ExperimentConfig:
    theta: float = math.pi / 4
    alpha: tuple[float, float] = (1 / math.sqrt(2), 0.0)
    beta: tuple[float, float] = (0.0, 1 / math.sqrt(2))
    weight: str = "unit"
    sigma: float | None = None
    weight_csv: str | None = None
    t_list: list[int] = field(default_factory=lambda: [100])
    r_list: list[int] = field(default_factory=lambda: list(range(9)))
    grid_size: int = DEFAULT_GRID_SIZE
    tail_tol: float = DEFAULT_TAIL_TOL
    output_dir: str = "out"

    @classmethod
    def from_dict(cls, data: dict) -> ExperimentConfig:
        data = dict(data)
        known = set(cls.__dataclass_fields__) | {"r_max"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "r_max" in data:
            data["r_list"] = list(range(int(data.pop("r_max")) + 1))
        cfg = cls(**data)
        cfg.validate()
        return cfg

    @classmethod
    def from_file(cls, path: str | Path) -> ExperimentConfig:
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def validate(self) -> None:
        self.theta = float(self.theta)
        self.alpha = _pair(self.alpha, "alpha")
        self.beta = _pair(self.beta, "beta")
        norm = sum(v * v for v in (*self.alpha, *self.beta))
        if abs(norm - 1) > 1e-9:
            raise ConfigError(f"|alpha|^2 + |beta|^2 = {norm!r}, must be 1 within 1e-9")
        if self.weight not in WEIGHT_KINDS:
            raise ConfigError(f"weight must be one of {WEIGHT_KINDS}, got {self.weight!r}")
        if self.weight == "tabulated" and not self.weight_csv:
            raise ConfigError("tabulated weight needs weight_csv")
        if self.sigma is not None and not float(self.sigma) > 0:
            raise ConfigError("sigma must be positive")
        self.t_list = [int(t) for t in self.t_list]
        if not self.t_list or any(b <= a for a, b in zip(self.t_list, self.t_list[1:])):
            raise ConfigError("t_list must be non-empty and strictly ascending")
        if self.t_list[0] < 0:
            raise ConfigError("t_list entries must be non-negative")
        self.r_list = [int(r) for r in self.r_list]
        if any(r < 0 for r in self.r_list):
            raise ConfigError("moment orders must be non-negative")

    @property
    def resolved_sigma(self) -> float | None:
        if self.weight != "gaussian":
            return self.sigma
        return float(self.sigma) if self.sigma is not None else 0.25 * abs(math.cos(self.theta))

    def coin(self) -> InitCoin:
        # accepted within 1e-9 above; renormalize to the 1e-12 the walk expects
        return InitCoin.normalized(complex(*self.alpha), complex(*self.beta))

    def weight_spec(self) -> WeightSpec:
        if self.weight == "tabulated":
            return load_tabulated(self.weight_csv, self.theta)
        if self.weight == "gaussian":
            return WeightSpec.gaussian(self.theta, self.resolved_sigma)
        return WeightSpec(self.weight, self.theta)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["alpha"] = list(self.alpha)
        out["beta"] = list(self.beta)
        out["sigma"] = self.resolved_sigma
        return out
