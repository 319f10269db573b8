"""Scrubbing configuration, validation and unit conversion.

Rates enter in the units engineers quote them in (upsets per bit per day,
accesses per second, sweep periods in seconds) and are converted once into
the canonical internal unit, which is days.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

SECONDS_PER_DAY = 86_400.0
BYTES_PER_MEGABYTE = 2**20


class ConfigError(ValueError):
    """Raised for an invalid or incomplete scrubbing configuration."""


class Model(str, enum.Enum):
    PROBABILISTIC = "probabilistic"
    DETERMINISTIC = "deterministic"
    MIXED = "mixed"

    @classmethod
    def parse(cls, value: "Model | str") -> "Model":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            names = ", ".join(m.value for m in cls)
            raise ConfigError(f"unknown model {value!r}; expected one of {names}") from None

    @property
    def uses_access_scrub(self) -> bool:
        return self in (Model.PROBABILISTIC, Model.MIXED)

    @property
    def uses_sweep(self) -> bool:
        return self in (Model.DETERMINISTIC, Model.MIXED)


@dataclass(frozen=True)
class ScrubConfig:
    """Full parameter set of a scrubbed SEC-DED memory.

    Attributes
    ----------
    lambda_per_bit_day : float
        Transient upset rate of a single bit, in upsets/bit/day.
    data_bits, check_bits : int
        Word layout; a word holds ``data_bits + check_bits`` physical bits.
    memory_words : int
        Number of independent words in the memory.
    scrub_period_seconds : float or None
        Interval of the hardware sweep. ``math.inf`` disables the sweep.
    scrub_rate_per_second : float or None
        Rate of access-driven scrubbing. ``0`` disables it.
    model : Model
    """

    lambda_per_bit_day: float
    data_bits: int
    check_bits: int
    memory_words: int
    scrub_period_seconds: float | None = None
    scrub_rate_per_second: float | None = None
    model: Model = Model.PROBABILISTIC

    def __post_init__(self) -> None:
        object.__setattr__(self, "model", Model.parse(self.model))
        self.validate()

    def validate(self) -> None:
        if not (math.isfinite(self.lambda_per_bit_day) and self.lambda_per_bit_day >= 0):
            raise ConfigError(f"lambda_per_bit_day must be finite and >= 0, got {self.lambda_per_bit_day}")
        if int(self.data_bits) != self.data_bits or self.data_bits < 1:
            raise ConfigError(f"data_bits must be an integer >= 1, got {self.data_bits}")
        if int(self.check_bits) != self.check_bits or self.check_bits < 0:
            raise ConfigError(f"check_bits must be an integer >= 0, got {self.check_bits}")
        if int(self.memory_words) != self.memory_words or self.memory_words < 1:
            raise ConfigError(f"memory_words must be an integer >= 1, got {self.memory_words}")
        if self.data_bits + self.check_bits < 2:
            raise ConfigError(
                "degenerate word: data_bits + check_bits must be >= 2 "
                "(a single-bit word can never hold two co-existing errors)"
            )
        if self.model.uses_sweep:
            if self.scrub_period_seconds is None:
                raise ConfigError(f"{self.model.value} scrubbing requires scrub_period_seconds")
            if not self.scrub_period_seconds > 0:
                raise ConfigError(f"scrub_period_seconds must be > 0, got {self.scrub_period_seconds}")
        if self.model.uses_access_scrub:
            if self.scrub_rate_per_second is None:
                raise ConfigError(f"{self.model.value} scrubbing requires scrub_rate_per_second")
            rate = self.scrub_rate_per_second
            if not (math.isfinite(rate) and rate >= 0):
                raise ConfigError(f"scrub_rate_per_second must be finite and >= 0, got {rate}")

    @property
    def total_bits(self) -> int:
        return int(self.data_bits + self.check_bits)

    def replace(self, **changes) -> "ScrubConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class CanonicalRates:
    """Rates in per-day units, periods in days."""

    lambda_day: float
    mu_day: float | None
    period_days: float | None
    total_bits_n: int


def sec_ded_check_bits(data_bits: int) -> int:
    """Smallest extended-Hamming check-bit count for ``data_bits`` data bits.

    Returns the least ``c`` with ``2**(c - 1) >= data_bits + c``.
    """
    if int(data_bits) != data_bits or data_bits < 1:
        raise ConfigError(f"data_bits must be an integer >= 1, got {data_bits}")
    c = 1
    while 2 ** (c - 1) < data_bits + c:
        c += 1
    return c


def words_from_megabytes(megabytes: int, data_bits: int, allow_partial: bool = False) -> int:
    """Number of ``data_bits``-wide words holding ``megabytes`` MiB of data.

    Check bits are overhead and do not count toward capacity. With
    ``allow_partial`` a trailing fragment that does not fill a word is dropped
    instead of rejected.
    """
    if int(megabytes) != megabytes or megabytes < 1:
        raise ConfigError(f"megabytes must be a positive integer, got {megabytes}")
    if int(data_bits) != data_bits or data_bits < 1:
        raise ConfigError(f"data_bits must be a positive integer, got {data_bits}")
    bits = int(megabytes) * BYTES_PER_MEGABYTE * 8
    if bits % int(data_bits) and not allow_partial:
        raise ConfigError(f"{megabytes} MB is not a whole number of {data_bits}-bit words")
    return bits // int(data_bits)


def canonicalize(config: ScrubConfig) -> CanonicalRates:
    config.validate()
    mu_day = None
    period_days = None
    if config.model.uses_access_scrub:
        mu_day = config.scrub_rate_per_second * SECONDS_PER_DAY
    if config.model.uses_sweep:
        period_days = config.scrub_period_seconds / SECONDS_PER_DAY
    return CanonicalRates(
        lambda_day=float(config.lambda_per_bit_day),
        mu_day=mu_day,
        period_days=period_days,
        total_bits_n=config.total_bits,
    )
