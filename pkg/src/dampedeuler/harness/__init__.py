"""Sweep orchestration: blow-up detection, exponent fits, persistence and reports."""
from .config import DetectorConfig, SweepConfig, load_config, parse_config
from .detect import BlowupDetector, detect_blowup
from .fit import FitResult, confirm, fit_exponent, predicted_exponent
from .records import RecordLog, RunRecord, read_records
from .sweep import SweepResult, run_sweep, summarize, summarize_all

__all__ = ["DetectorConfig", "SweepConfig", "load_config", "parse_config", "BlowupDetector",
           "detect_blowup", "FitResult", "confirm", "fit_exponent", "predicted_exponent",
           "RecordLog", "RunRecord", "read_records", "SweepResult", "run_sweep", "summarize",
           "summarize_all"]
