"""Trace-driven simulator for SLC/MLC hybrid SSDs with adaptive hot-data migration."""

from .ahdm import AhdmClassifier, AhdmConfig, Decision, Watermark, WriteDecision
from .engine import Hybrid, PureMLC, PureSLC, Simulator, default_modes, replay_deterministic, run
from .flash import FlashDevice, TierConfig, TierFull, Unmapped
from .metrics import PriceModel, SimReport, access_time_gain, emit_report, lifespan_gain, price
from .trace import (
    Op,
    SyntheticSpec,
    TraceRecord,
    generate_synthetic,
    parse_csv,
    parse_msr,
    write_csv,
)

__all__ = [
    "AhdmClassifier", "AhdmConfig", "Decision", "Watermark", "WriteDecision",
    "Hybrid", "PureMLC", "PureSLC", "Simulator", "default_modes", "replay_deterministic", "run",
    "FlashDevice", "TierConfig", "TierFull", "Unmapped",
    "PriceModel", "SimReport", "access_time_gain", "emit_report", "lifespan_gain", "price",
    "Op", "SyntheticSpec", "TraceRecord", "generate_synthetic", "parse_csv", "parse_msr", "write_csv",
]

__version__ = "0.1.0"
