"""
Shared configuration, value types and helpers for all analyses.
"""
import os
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from pathlib import Path
from typing import Any

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator

load_dotenv()

# Paths
PROJECT_ROOT = Path(__file__).parent.parent
CONFIG_PATH = PROJECT_ROOT / "config.yaml"


def load_config() -> dict:
    """Load configuration from config.yaml."""
    if not CONFIG_PATH.exists():
        raise FileNotFoundError(f"Config file not found at {CONFIG_PATH}")
    with open(CONFIG_PATH, "r", encoding="utf-8") as f:
        return yaml.safe_load(f) or {}


# Global Config Object
try:
    CONFIG = load_config()
except Exception as e:
    print(f"Warning: Could not load config.yaml: {e}")
    CONFIG = {}


# Environment helpers
def get_env(key: str, default: str | None = None, required: bool = False) -> str | None:
    """Get environment variable with optional requirement check."""
    value = os.getenv(key, default)
    if required and not value:
        raise ValueError(f"Required environment variable {key} is not set")
    return value


def get_cache_dir() -> Path:
    """Cache directory: IWALK_CACHE_DIR if set, else config.yaml, else .tmp/cache."""
    cache_cfg = CONFIG.get("cache", {})
    env_key = cache_cfg.get("env_key", "IWALK_CACHE_DIR")
    configured = get_env(env_key)
    if configured:
        d = Path(configured)
    else:
        d = PROJECT_ROOT / cache_cfg.get("dir", ".tmp/cache")
    d.mkdir(parents=True, exist_ok=True)
    return d


# --- Errors ---

class PreconditionError(ValueError):
    """An input violates the documented precondition of an operation."""


class CapExceededError(PreconditionError):
    """A size cap (table, distribution, oracle) would be exceeded."""


class IdentityCheckError(AssertionError):
    """An exact identity that must always hold was found broken."""


class MemoConflictError(RuntimeError):
    """A memo key was re-inserted with a different value."""


class CacheCorruptError(ValueError):
    """A cache file is unreadable or disagrees with its own name."""


# --- Caps ---

DEFAULT_CAPS = {
    "full_table_n": 20,
    "single_partition_n": 40,
    "exact_distribution_n": 8,
    "oracle_n": 8,
    "enumeration_oracle_n": 6,
}


def get_cap(name: str) -> int:
    """Read a size cap from config.yaml, falling back to the built-in default."""
    return int(CONFIG.get("caps", {}).get(name, DEFAULT_CAPS[name]))


def check_cap(name: str, n: int, unsafe: bool = False) -> None:
    """Raise CapExceededError when n is above the named cap (unless unsafe)."""
    cap = get_cap(name)
    if n > cap and not unsafe:
        raise CapExceededError(f"n={n} exceeds cap {name}={cap} (pass --unsafe-caps to override)")


def get_default(key: str, fallback: Any = None) -> Any:
    return CONFIG.get("defaults", {}).get(key, fallback)


# --- Rationals ---

def parse_rational(value: Any) -> Fraction:
    """
    Parse an exact rational from "num/den", an integer, a decimal string or a Fraction.

    Floats are accepted only through their decimal string form so that
    "0.1" means 1/10 exactly.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise PreconditionError(f"invalid rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        value = repr(value)
    if not isinstance(value, str):
        raise PreconditionError(f"invalid rational: {value!r}")

    text = value.strip()
    try:
        if "/" in text:
            num, den = text.split("/", 1)
            if int(den) == 0:
                raise PreconditionError(f"invalid rational {text!r}: zero denominator")
            return Fraction(int(num), int(den))
        return Fraction(Decimal(text))
    except (ValueError, InvalidOperation):
        raise PreconditionError(f"invalid rational: {text!r}") from None


def format_rational(q: Fraction | int) -> str:
    """Render an exact rational as "num/den" (integers get "/1")."""
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


# --- Shared value types ---

class WalkParams(BaseModel):
    """Even group degree n and exact laziness parameter p in [0, 1]."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int
    p: Fraction

    @field_validator("p", mode="before")
    @classmethod
    def _parse_p(cls, v: Any) -> Fraction:
        q = parse_rational(v)
        if not 0 <= q <= 1:
            raise PreconditionError(f"p must lie in [0, 1], got {format_rational(q)}")
        return q

    @field_validator("n")
    @classmethod
    def _check_n(cls, v: int) -> int:
        if v < 2 or v % 2:
            raise PreconditionError(f"n must be even and >= 2, got {v}")
        return v

    @field_serializer("p")
    def _dump_p(self, p: Fraction) -> str:
        return format_rational(p)

    @property
    def half(self) -> int:
        return self.n // 2


class Hypothesis(BaseModel):
    name: str
    satisfied: bool


class CheckResult(BaseModel):
    """One line item of a verification report."""
    name: str
    passed: bool
    status: str = "pass"  # pass | fail | expected-fail | unexpected-pass | report
    detail: dict = Field(default_factory=dict)

    @property
    def asserted_failure(self) -> bool:
        return self.status in ("fail", "unexpected-pass")
