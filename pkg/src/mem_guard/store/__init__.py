"""持久化：采样日志、事件日志、黑名单与实验记录"""

from .files import create_name_with_time, read_json, write_json_atomic
from .reading_log import SCHEMA_VERSION, ReadingLog, ReadingLogHeader, append_reading, load_readings, read_header
from .events import append_events, event_line, load_events, save_events
from .blacklist import BlacklistStore, blacklist_ops
from .experiment import (
    BLACKLIST_FILE,
    EVENTS_FILE,
    READINGS_FILE,
    RECORD_FILE,
    REGISTRY_FILE,
    EpisodeMetrics,
    ExperimentDir,
    ExperimentRecord,
    SummaryMetrics,
    compute_summary,
    create_experiment_dir,
    format_summary,
    load_experiment,
    save_experiment,
    verify_experiment,
)

__all__ = [
    "create_name_with_time",
    "read_json",
    "write_json_atomic",
    "SCHEMA_VERSION",
    "ReadingLog",
    "ReadingLogHeader",
    "append_reading",
    "load_readings",
    "read_header",
    "append_events",
    "event_line",
    "load_events",
    "save_events",
    "BlacklistStore",
    "blacklist_ops",
    "BLACKLIST_FILE",
    "EVENTS_FILE",
    "READINGS_FILE",
    "RECORD_FILE",
    "REGISTRY_FILE",
    "EpisodeMetrics",
    "ExperimentDir",
    "ExperimentRecord",
    "SummaryMetrics",
    "compute_summary",
    "create_experiment_dir",
    "format_summary",
    "load_experiment",
    "save_experiment",
    "verify_experiment",
]
