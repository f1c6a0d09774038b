"""Seeded synthetic listings generator.

Price model: base_price(model) * rate_year^age * rate_hours^(hours/1000)
             * series_premium * location_premium * exp(N(0, noise_sigma^2))

The generator can inject labeled duplicates, missing working-hours cells, and
10x price outliers so the cleaning pipeline has verifiable work to do.
Injection labels ride on source_id prefixes; see is_injected_duplicate /
is_injected_outlier. Output is a pure function of the config (seed included).
"""

import datetime
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .dataset import Dataset, Listing
from .errors import InvalidConfig

# ages and observation dates are measured against a fixed reference year so
# generation never depends on the wall clock
OBSERVATION_YEAR = 2024

BRANDS = ("Alfa", "Bravo", "Cobalt", "Dyna", "Echo")

OUTLIER_FACTOR = 10.0

_DUP_PREFIX = "synth:dup:"
_OUTLIER_PREFIX = "synth:outlier:"


def _default_series():
    return {"C": 0.82, "D": 1.0, "E": 1.22}


def _default_locations():
    return {"BE": 0.88, "DE": 1.0, "FR": 1.08, "NL": 1.18}


@dataclass(frozen=True)
class SynthConfig:
    n_rows: int
    n_models: int = 10
    seed: int = 0
    base_price_range: tuple[float, float] = (20000.0, 160000.0)
    hours_per_year_range: tuple[float, float] = (300.0, 1400.0)
    year_range: tuple[int, int] = (2004, 2023)
    depreciation_rate_year: float = 0.94
    depreciation_rate_hours: float = 0.97  # per 1000 hours
    series_premiums: Mapping[str, float] = field(default_factory=_default_series)
    location_premiums: Mapping[str, float] = field(default_factory=_default_locations)
    noise_sigma: float = 0.08
    duplicate_frac: float = 0.0
    missing_hours_frac: float = 0.0
    outlier_frac: float = 0.0

    def __post_init__(self):
        if self.n_rows < 1:
            raise InvalidConfig("n_rows must be >= 1")
        if self.n_models < 1:
            raise InvalidConfig("n_models must be >= 1")
        for name in ("duplicate_frac", "missing_hours_frac", "outlier_frac"):
            v = getattr(self, name)
            if not 0.0 <= v < 1.0:
                raise InvalidConfig(f"{name} must be in [0, 1): {v}")
        if self.noise_sigma < 0.0:
            raise InvalidConfig(f"noise_sigma must be >= 0: {self.noise_sigma}")
        for name in ("depreciation_rate_year", "depreciation_rate_hours"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise InvalidConfig(f"{name} must be in (0, 1]: {v}")
        lo, hi = self.base_price_range
        if not 0.0 < lo <= hi:
            raise InvalidConfig(f"base_price_range must be positive and ordered: {self.base_price_range}")
        lo, hi = self.hours_per_year_range
        if not 0.0 <= lo <= hi:
            raise InvalidConfig(f"hours_per_year_range must be ordered and >= 0: {self.hours_per_year_range}")
        y0, y1 = self.year_range
        if not (1950 <= y0 <= y1 < OBSERVATION_YEAR):
            raise InvalidConfig(f"year_range must sit in [1950, {OBSERVATION_YEAR}): {self.year_range}")
        if not self.location_premiums:
            raise InvalidConfig("location_premiums must not be empty")
        for premiums in (self.series_premiums, self.location_premiums):
            if any(v <= 0 for v in premiums.values()):
                raise InvalidConfig("premiums must be positive")


def is_injected_duplicate(listing: Listing) -> bool:
    return listing.source_id.startswith(_DUP_PREFIX)


def is_injected_outlier(listing: Listing) -> bool:
    return listing.source_id.startswith(_OUTLIER_PREFIX)


def synth_generate(cfg: SynthConfig) -> Dataset:
    """Generate cfg.n_rows base listings plus round(duplicate_frac * n) copies."""
    rng = np.random.default_rng(cfg.seed)
    n = cfg.n_rows

    base_prices = rng.uniform(*cfg.base_price_range, size=cfg.n_models)
    models = [f"M{i:02d}" for i in range(cfg.n_models)]
    series_keys = sorted(cfg.series_premiums)
    location_keys = sorted(cfg.location_premiums)

    rows: list[Listing] = []
    for i in range(n):
        m = int(rng.integers(0, cfg.n_models))
        year = int(rng.integers(cfg.year_range[0], cfg.year_range[1] + 1))
        age = OBSERVATION_YEAR - year
        usage = float(rng.uniform(*cfg.hours_per_year_range))
        hours = usage * age
        series = str(rng.choice(series_keys)) if series_keys else None
        location = str(rng.choice(location_keys))
        noise = float(rng.normal(0.0, cfg.noise_sigma))
        price = (
            base_prices[m]
            * cfg.depreciation_rate_year ** age
            * cfg.depreciation_rate_hours ** (hours / 1000.0)
            * (cfg.series_premiums[series] if series is not None else 1.0)
            * cfg.location_premiums[location]
            * float(np.exp(noise))
        )
        observed = datetime.date(OBSERVATION_YEAR, 1, 1) + datetime.timedelta(
            days=int(rng.integers(0, 365)))
        rows.append(Listing(
            brand=BRANDS[m % len(BRANDS)],
            model=models[m],
            series=series,
            construction_year=year,
            working_hours=hours,
            location=location,
            price=float(price),
            source_id=f"synth:{i:06d}",
            observed_at=observed,
        ))

    n_missing = int(round(cfg.missing_hours_frac * n))
    missing_idx = rng.choice(n, size=n_missing, replace=False) if n_missing else np.array([], dtype=int)
    for i in missing_idx:
        rows[i] = _replace(rows[i], working_hours=None)

    n_out = int(round(cfg.outlier_frac * n))
    pool = np.setdiff1d(np.arange(n), missing_idx)
    out_idx = rng.choice(pool, size=n_out, replace=False) if n_out else np.array([], dtype=int)
    for i in out_idx:
        rows[i] = _replace(rows[i],
                           price=rows[i].price * OUTLIER_FACTOR,
                           source_id=f"{_OUTLIER_PREFIX}{i:06d}")

    n_dup = int(round(cfg.duplicate_frac * n))
    dup_rows: list[Listing] = []
    for k in range(n_dup):
        src = int(rng.integers(0, n))
        later = rows[src].observed_at + datetime.timedelta(days=int(rng.integers(1, 90)))
        dup_rows.append(_replace(rows[src],
                                 source_id=f"{_DUP_PREFIX}{src:06d}:{k}",
                                 observed_at=later))

    return Dataset(rows=tuple(rows + dup_rows), provenance="synthetic")


def _replace(listing: Listing, **kw) -> Listing:
    import dataclasses
    return dataclasses.replace(listing, **kw)
