"""
Configuration management for simulation parameters and CLI runs.
"""

import json
import math
import os
from dataclasses import dataclass, field, fields, replace
from typing import Any, Dict, List, Optional

from dataclasses_json import dataclass_json

from .errors import ConfigError

RESONANCE_TOLERANCE = 1e-12

PROTOCOLS = ("evolve", "verify", "epr", "exchange", "transfer", "feedback")
OUTPUT_FORMATS = ("csv", "json")
PICTURES = ("schrodinger", "interaction")


@dataclass_json
@dataclass(frozen=True)
class PhysicalParams:
    """Coupling g, dipole-dipole alpha, Zeeman beta and field frequency omega (hbar = 1)."""

    g: float = 1.0
    alpha: float = 0.0
    beta: float = 1.0
    omega: float = 1.0

    def __post_init__(self):
        """Validate parameter values."""
        for name in ("g", "alpha", "beta", "omega"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ConfigError(name, f"must be a finite real number, got {value!r}")
        if self.g <= 0:
            raise ConfigError("g", f"coupling must be positive, got {self.g}")

    @property
    def is_resonant(self) -> bool:
        """True when omega equals beta within 1e-12 relative tolerance."""
        scale = max(abs(self.omega), abs(self.beta), 1.0)
        return abs(self.omega - self.beta) <= RESONANCE_TOLERANCE * scale

    def with_g(self, g: float) -> 'PhysicalParams':
        return replace(self, g=g)

    def with_alpha(self, alpha: float) -> 'PhysicalParams':
        return replace(self, alpha=alpha)


@dataclass_json
@dataclass(frozen=True)
class DriftModel:
    """Per-cycle relative drift of the true coupling plus phenomenological damping."""

    g_drift_rate: float = 0.0
    damping_gamma: float = 0.0
    seed: int = 7

    def __post_init__(self):
        if not abs(self.g_drift_rate) < 1:
            raise ConfigError("g_drift_rate", f"must satisfy |rate| < 1, got {self.g_drift_rate}")
        if self.damping_gamma < 0:
            raise ConfigError("damping_gamma", f"cannot be negative, got {self.damping_gamma}")


@dataclass_json
@dataclass
class RunConfig:
    """Resolved configuration of one CLI run; every output embeds it."""

    protocol: str = "epr"
    params: PhysicalParams = field(default_factory=PhysicalParams)

    # Time grid in dimensionless gt
    grid_start: float = 0.0
    grid_stop: float = 10.0
    grid_steps: int = 1001
    t: Optional[float] = None

    # Protocol-specific settings
    initial: str = "0,1,-1"
    exchange_input: str = "0,-1"
    picture: str = "schrodinger"
    n_period: int = 1
    c1: List[float] = field(default_factory=lambda: [1.0, 0.0])
    c2: List[float] = field(default_factory=lambda: [0.0, 0.0])
    cycles: int = 20
    drift_rate: float = 0.0
    gamma: float = 0.0
    seed: int = 7
    tolerance: float = 1e-10

    # Output
    output: Optional[str] = None
    format: str = "json"
    parallel: bool = False

    def __post_init__(self):
        """Validate configuration."""
        if isinstance(self.params, dict):
            self.params = PhysicalParams(**self.params)
        if self.protocol not in PROTOCOLS:
            raise ConfigError("protocol", f"unknown protocol '{self.protocol}'; expected one of {PROTOCOLS}")
        if self.format not in OUTPUT_FORMATS:
            raise ConfigError("format", f"must be one of {OUTPUT_FORMATS}, got '{self.format}'")
        if self.picture not in PICTURES:
            raise ConfigError("picture", f"must be one of {PICTURES}, got '{self.picture}'")
        if int(self.grid_steps) != self.grid_steps or self.grid_steps < 1:
            raise ConfigError("grid_steps", f"must be an integer >= 1, got {self.grid_steps}")
        if self.grid_stop < self.grid_start:
            raise ConfigError("grid_stop", f"must be >= grid_start ({self.grid_start}), got {self.grid_stop}")
        if self.n_period < 0:
            raise ConfigError("n_period", f"cannot be negative, got {self.n_period}")
        if self.protocol in ("epr", "feedback") and self.n_period < 1:
            raise ConfigError("n_period", f"must be at least 1 for {self.protocol}, got {self.n_period}")
        if self.cycles < 1:
            raise ConfigError("cycles", f"must be at least 1, got {self.cycles}")
        if self.tolerance <= 0:
            raise ConfigError("tolerance", f"must be positive, got {self.tolerance}")
        for name in ("c1", "c2"):
            value = getattr(self, name)
            if len(value) != 2:
                raise ConfigError(name, f"complex numbers are [re, im] pairs, got {value!r}")
        self._validate_basis_labels()
        # DriftModel validates drift_rate and gamma
        self.drift_model()

    def _validate_basis_labels(self):
        # deferred: both modules import this one through models
        from .protocols import EXCHANGE_SECTORS
        from .state_space import conserved_number, parse_basis_state

        try:
            parse_basis_state(self.initial)
        except ValueError as e:
            raise ConfigError("initial", str(e))
        try:
            exchange_input = parse_basis_state(self.exchange_input)
        except ValueError as e:
            raise ConfigError("exchange_input", str(e))
        sector = conserved_number(exchange_input)
        if sector not in EXCHANGE_SECTORS:
            raise ConfigError(
                "exchange_input",
                f"conserved number {sector} outside the exchange sectors {EXCHANGE_SECTORS}",
            )

    def drift_model(self) -> DriftModel:
        try:
            return DriftModel(g_drift_rate=self.drift_rate, damping_gamma=self.gamma, seed=self.seed)
        except ConfigError as e:
            name = {"g_drift_rate": "drift_rate", "damping_gamma": "gamma"}.get(e.field, e.field)
            raise ConfigError(name, e.reason)

    def time_grid(self) -> List[float]:
        """Grid points in gt units; a single explicit t overrides the grid."""
        if self.t is not None:
            return [float(self.t)]
        if self.grid_steps == 1:
            return [float(self.grid_start)]
        step = (self.grid_stop - self.grid_start) / (self.grid_steps - 1)
        return [self.grid_start + i * step for i in range(self.grid_steps)]

    def coefficients(self) -> tuple:
        return complex(*self.c1), complex(*self.c2)

    def with_overrides(self, **overrides: Any) -> 'RunConfig':
        """Return a copy with every non-None override applied; physical keys go to params."""
        param_names = {f.name for f in fields(PhysicalParams)}
        param_updates = {k: v for k, v in overrides.items() if k in param_names and v is not None}
        run_updates = {k: v for k, v in overrides.items() if k not in param_names and v is not None}
        params = replace(self.params, **param_updates) if param_updates else self.params
        return replace(self, params=params, **run_updates)

    @classmethod
    def from_environment(cls) -> 'RunConfig':
        """Create configuration from ZEEMAN_* environment variables."""
        params = PhysicalParams(
            g=float(os.getenv('ZEEMAN_G', '1.0')),
            alpha=float(os.getenv('ZEEMAN_ALPHA', '0.0')),
            beta=float(os.getenv('ZEEMAN_BETA', '1.0')),
            omega=float(os.getenv('ZEEMAN_OMEGA', '1.0')),
        )
        return cls(params=params, seed=int(os.getenv('ZEEMAN_SEED', '7')))

    @classmethod
    def from_file(cls, path: str, base: Optional['RunConfig'] = None) -> 'RunConfig':
        """Load a JSON config file on top of ``base``; errors name the field and line."""
        with open(path, 'r', encoding='utf-8') as handle:
            text = handle.read()
        try:
            data: Dict[str, Any] = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError("<file>", f"invalid JSON: {e.msg}", line=e.lineno)
        if not isinstance(data, dict):
            raise ConfigError("<file>", "top level must be a JSON object", line=1)

        known = {f.name for f in fields(cls)}
        for key in data:
            if key not in known:
                raise ConfigError(key, "unknown configuration field", line=_line_of(text, key))

        base = base or cls()
        params = data.pop("params", None)
        try:
            if params is not None:
                if not isinstance(params, dict):
                    raise ConfigError("params", "must be an object")
                unknown = set(params) - {f.name for f in fields(PhysicalParams)}
                if unknown:
                    raise ConfigError(f"params.{sorted(unknown)[0]}", "unknown physical parameter")
                data["params"] = replace(base.params, **params)
            return replace(base, **data)
        except ConfigError as e:
            raise ConfigError(e.field, e.reason, line=_line_of(text, e.field.split('.')[-1]))
        except TypeError as e:
            raise ConfigError("<file>", f"invalid value: {e}")


def _line_of(text: str, key: str) -> Optional[int]:
    needle = f'"{key}"'
    for number, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return number
    return None
