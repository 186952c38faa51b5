"""Figure regeneration for sgfluxon CSV/JSON artifacts."""

__version__ = "0.1.0"
