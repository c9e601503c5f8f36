from .api import create_app
from .config import AppConfig, ConfigError, load_config
from .csvio import export_csv, export_rows, parse_csv, rows_from_parsed
from .pipeline import PipelineResult, ingest_feeds, rerun_filters, run_pipeline
from .store import ReviewDecision, Store, StoreError, TrendSeries, UnknownGroupError

__all__ = [
    "AppConfig", "ConfigError", "PipelineResult", "ReviewDecision", "Store",
    "StoreError", "TrendSeries", "UnknownGroupError", "create_app",
    "export_csv", "export_rows", "ingest_feeds", "load_config", "parse_csv",
    "rerun_filters", "rows_from_parsed", "run_pipeline",
]
