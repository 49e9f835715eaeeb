"""检测：阈值推导与检测状态机"""

from .models import (
    FULL_MITIGATION,
    DetectionEvent,
    DetectorConfig,
    DetectorState,
    EventKind,
    MitigationAction,
    Phase,
    TriggerMode,
    validate_mitigation_actions,
)
from .thresholds import default_absolute_threshold, derive_reading_threshold
from .engine import INITIAL_STATE, DetectorEngine, detector_run, detector_step, is_suspicious

__all__ = [
    "FULL_MITIGATION",
    "DetectionEvent",
    "DetectorConfig",
    "DetectorState",
    "EventKind",
    "MitigationAction",
    "Phase",
    "TriggerMode",
    "validate_mitigation_actions",
    "default_absolute_threshold",
    "derive_reading_threshold",
    "INITIAL_STATE",
    "DetectorEngine",
    "detector_run",
    "detector_step",
    "is_suspicious",
]
