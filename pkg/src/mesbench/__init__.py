"""mesbench: benchmark manual and automated regression pipelines on price data
and score them with a weighted multi-criteria method evaluation score."""

__version__ = "0.1.0"
