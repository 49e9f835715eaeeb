"""实验报告：逐采样表、指标表与足迹表（CSV）

samples.csv   timestamp_s, device_id, mem_frac, cpu_or_thread_time, status, attack_flag, alert
metrics.csv   metric, value
footprint.csv status, samples, mem_min, mem_max, aux_min, aux_max
"""

import csv
from pathlib import Path
from typing import Dict, List, Optional

from ..detector.engine import DetectorEngine
from ..store.experiment import ExperimentDir, SummaryMetrics, verify_experiment
from ..store.reading_log import load_readings
from ..telemetry.classify import classify_status, footprint_summary

SAMPLE_COLUMNS = ["timestamp_s", "device_id", "mem_frac", "cpu_or_thread_time", "status", "attack_flag", "alert"]
METRIC_COLUMNS = ["metric", "value"]
FOOTPRINT_COLUMNS = ["status", "samples", "mem_min", "mem_max", "aux_min", "aux_max"]


def _flag(value: Optional[bool]) -> str:
    if value is None:
        return ""
    return "1" if value else "0"


def metric_rows(summary: SummaryMetrics) -> List[List[str]]:
    rows = [
        ["samples", str(summary.samples)],
        ["attacks_detected", str(summary.attacks_detected)],
        ["attacks_stopped", str(summary.attacks_stopped)],
        ["false_positive_count", str(summary.false_positive_count)],
        ["ongoing_at_end", _flag(summary.ongoing_at_end)],
    ]
    for n, episode in enumerate(summary.episodes, 1):
        prefix = f"episode_{n}"
        rows.extend([
            [f"{prefix}_device_id", episode.device_id],
            [f"{prefix}_detection_latency_samples", str(episode.detection_latency_samples)],
            [f"{prefix}_detection_latency_s", f"{episode.detection_latency_s:.3f}"],
            [f"{prefix}_stop_latency_samples",
             "" if episode.stop_latency_samples is None else str(episode.stop_latency_samples)],
            [f"{prefix}_stop_latency_s", "" if episode.stop_latency_s is None else f"{episode.stop_latency_s:.3f}"],
            [f"{prefix}_false_positive", _flag(episode.false_positive)],
        ])
    return rows


def write_report(directory: ExperimentDir, out_dir: Optional[str | Path] = None) -> Dict[str, Path]:
    """先校验实验目录（不一致即 CorruptionError），再写出三张表"""
    record = verify_experiment(directory)
    readings = load_readings(directory.readings)
    out = Path(out_dir) if out_dir else directory.root
    out.mkdir(parents=True, exist_ok=True)
    paths = {name: out / f"{name}.csv" for name in ("samples", "metrics", "footprint")}

    engine = DetectorEngine(record.config)
    with open(paths["samples"], "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(SAMPLE_COLUMNS)
        for reading in readings:
            engine.feed(reading)
            writer.writerow([
                f"{reading.timestamp_s:.3f}",
                reading.device_id,
                f"{reading.mem_frac:.6f}",
                f"{reading.aux_value:.6f}",
                classify_status(reading, record.profile).value,
                _flag(reading.attack_flag),
                _flag(engine.state_of(reading.device_id).alert),
            ])

    with open(paths["metrics"], "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(METRIC_COLUMNS)
        writer.writerows(metric_rows(record.summary))

    with open(paths["footprint"], "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(FOOTPRINT_COLUMNS)
        for status, row in footprint_summary(readings, record.profile).items():
            writer.writerow([status.value, row.samples, f"{row.mem_min:.6f}", f"{row.mem_max:.6f}",
                             f"{row.aux_min:.6f}", f"{row.aux_max:.6f}"])
    return paths
