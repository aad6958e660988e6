"""JSON model configuration parsing."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .aggregate import AggregateModel
from .claims import ClaimDistribution, ExponentialClaim
from .counting import CountingModel
from .ruin import RiskModel

__all__ = ["ConfigError", "ModelConfig", "load_config"]

_CLAIM_KEYS = ("y1", "y2", "y3", "y4")


class ConfigError(ValueError):
    """Raised for malformed or invalid model configuration."""


def _require_number(obj: dict, key: str, where: str) -> float:
    if key not in obj:
        raise ConfigError(f"{where}: missing field '{key}'")
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: field '{key}' must be a number, got {value!r}")
    return float(value)


def _parse_claim(fragment, where: str) -> ClaimDistribution:
    if not isinstance(fragment, dict):
        raise ConfigError(f"{where}: claim fragment must be an object")
    kind = fragment.get("type")
    if kind != "exponential":
        raise ConfigError(f"{where}: unsupported claim type {kind!r} (expected 'exponential')")
    mean = _require_number(fragment, "mean", where)
    if mean <= 0:
        raise ConfigError(f"{where}: claim mean must be positive, got {mean}")
    return ExponentialClaim(mean)


@dataclass(frozen=True)
class ModelConfig:
    """Parsed model parameters ready to build a RiskModel."""

    lambda0: float
    lambda1: float
    lambda2: float
    claims: tuple[ClaimDistribution, ClaimDistribution, ClaimDistribution, ClaimDistribution]
    premium_rate: float
    initial_capital: float

    @classmethod
    def from_dict(cls, data: dict) -> "ModelConfig":
        if not isinstance(data, dict):
            raise ConfigError("config root must be a JSON object")
        rates = {k: _require_number(data, k, "config") for k in ("lambda0", "lambda1", "lambda2")}
        for name, rate in rates.items():
            if rate < 0:
                raise ConfigError(f"config: {name} must be nonnegative, got {rate}")
        if sum(rates.values()) <= 0:
            raise ConfigError("config: at least one event rate must be positive")
        claims_obj = data.get("claims")
        if not isinstance(claims_obj, dict):
            raise ConfigError("config: missing 'claims' object")
        missing = [k for k in _CLAIM_KEYS if k not in claims_obj]
        if missing:
            raise ConfigError(f"config: claims object missing {missing}")
        claims = tuple(_parse_claim(claims_obj[k], f"claims.{k}") for k in _CLAIM_KEYS)
        premium = _require_number(data, "premium_rate", "config")
        if premium <= 0:
            raise ConfigError(f"config: premium_rate must be positive, got {premium}")
        capital = _require_number(data, "initial_capital", "config")
        if capital < 0:
            raise ConfigError(f"config: initial_capital must be nonnegative, got {capital}")
        return cls(
            lambda0=rates["lambda0"],
            lambda1=rates["lambda1"],
            lambda2=rates["lambda2"],
            claims=claims,
            premium_rate=premium,
            initial_capital=capital,
        )

    def build_model(self) -> RiskModel:
        counting = CountingModel(
            lambda0=self.lambda0, lambda1=self.lambda1, lambda2=self.lambda2
        )
        aggregate = AggregateModel(
            counting=counting,
            y1=self.claims[0],
            y2=self.claims[1],
            y3=self.claims[2],
            y4=self.claims[3],
        )
        return RiskModel(
            aggregate=aggregate,
            premium_rate=self.premium_rate,
            initial_capital=self.initial_capital,
        )


def load_config(path: str | Path) -> ModelConfig:
    """Parse a JSON config file; parse errors keep their line context."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"config {path} is not valid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})"
        ) from exc
    return ModelConfig.from_dict(data)
