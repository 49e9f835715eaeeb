"""实验目录与实验记录

目录结构::

    <experiment>/
        readings.jsonl
        events.jsonl
        registry.json
        blacklist.json
        experiment.json
"""

from pathlib import Path
from typing import Dict, List, Optional, Sequence

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..detector.models import DetectionEvent, DetectorConfig, EventKind
from ..exceptions import CorruptionError, NotFoundError
from ..simulator.models import AttackScenario
from ..telemetry.models import DeviceProfile, ResourceReading
from .events import load_events
from .files import create_name_with_time, read_json, write_json_atomic
from .reading_log import load_readings, logger, store_wrapper

READINGS_FILE = "readings.jsonl"
EVENTS_FILE = "events.jsonl"
REGISTRY_FILE = "registry.json"
BLACKLIST_FILE = "blacklist.json"
RECORD_FILE = "experiment.json"


class ExperimentDir:
    def __init__(self, root: str | Path):
        self.root = Path(root)

    @property
    def readings(self) -> Path:
        return self.root / READINGS_FILE

    @property
    def events(self) -> Path:
        return self.root / EVENTS_FILE

    @property
    def registry(self) -> Path:
        return self.root / REGISTRY_FILE

    @property
    def blacklist(self) -> Path:
        return self.root / BLACKLIST_FILE

    @property
    def record(self) -> Path:
        return self.root / RECORD_FILE

    def require_complete(self) -> None:
        for path in (self.readings, self.events, self.record):
            if not path.exists():
                raise CorruptionError(f"Experiment {self.root} is missing {path.name}")

    def __repr__(self) -> str:
        return f"ExperimentDir({str(self.root)!r})"


def create_experiment_dir(root: str | Path, name: Optional[str] = None) -> ExperimentDir:
    """在 root 下创建实验目录，未指定名称时使用 experiment_<时间>"""
    root = Path(root)
    path = root / (name or create_name_with_time("experiment").name)
    path.mkdir(parents=True, exist_ok=True)
    logger.info_store("experiment directory %s", path)
    return ExperimentDir(path)


class EpisodeMetrics(BaseModel):
    """一次告警周期"""

    model_config = ConfigDict(extra="forbid")

    device_id: str
    onset_index: int = Field(..., description="攻击起点：真值标签起点，无标签时为超阈值段起点")
    started_index: int
    detection_latency_samples: int
    detection_latency_s: float
    stopped_index: Optional[int] = None
    stop_latency_samples: Optional[int] = Field(default=None, description="最后一个超阈值采样到 AttackStopped")
    stop_latency_s: Optional[float] = None
    false_positive: bool = False


class SummaryMetrics(BaseModel):
    model_config = ConfigDict(extra="forbid")

    samples: int = 0
    attacks_detected: int = 0
    attacks_stopped: int = 0
    false_positive_count: int = 0
    ongoing_at_end: bool = False
    episodes: List[EpisodeMetrics] = Field(default_factory=list)


class ExperimentRecord(BaseModel):
    """experiment.json"""

    model_config = ConfigDict(extra="forbid")

    schema_version: int = 1
    profile: DeviceProfile
    config: DetectorConfig
    scenario: Optional[AttackScenario] = None
    seed: Optional[int] = None
    interval_s: float
    total_s: float
    events: List[DetectionEvent] = Field(default_factory=list)
    summary: SummaryMetrics


def _hot_onset(readings: Sequence[ResourceReading], index: int, config: DetectorConfig) -> int:
    """从 index 往回找超阈值段的起点；连续超过 time_threshold 个正常采样视为段落中断"""
    onset = index
    quiet = 0
    for k in range(index, -1, -1):
        if readings[k].mem_frac > config.absolute_threshold:
            onset = k
            quiet = 0
        else:
            quiet += 1
            if quiet > config.time_threshold:
                break
    return onset


def _label_onset(readings: Sequence[ResourceReading], index: int) -> int:
    onset = index
    while onset > 0 and readings[onset - 1].attack_flag:
        onset -= 1
    return onset


def _last_hot(readings: Sequence[ResourceReading], start: int, stop: int, config: DetectorConfig) -> int:
    for k in range(stop, start - 1, -1):
        if readings[k].mem_frac > config.absolute_threshold:
            return k
    return start


def _locate(readings: Sequence[ResourceReading], event: DetectionEvent) -> int:
    index = event.sample_index
    if index < len(readings) and readings[index].timestamp_s == event.timestamp_s:
        return index
    for k, reading in enumerate(readings):
        if reading.timestamp_s == event.timestamp_s:
            return k
    raise CorruptionError(f"Event at {event.timestamp_s}s of {event.device_id!r} has no matching reading")


def compute_summary(readings: Sequence[ResourceReading],
                    events: Sequence[DetectionEvent],
                    config: DetectorConfig) -> SummaryMetrics:
    """由采样与事件重新计算汇总指标

    有真值标签时检测延迟从攻击窗口起点算起，AttackStarted 落在无标签采样上计为误报；
    无标签时从超阈值段起点算起。
    """
    streams: Dict[str, List[ResourceReading]] = {}
    for reading in readings:
        streams.setdefault(reading.device_id, []).append(reading)
    labelled = any(reading.attack_flag is not None for reading in readings)

    summary = SummaryMetrics(samples=len(readings))
    open_episodes: Dict[str, EpisodeMetrics] = {}
    for event in events:
        stream = streams.get(event.device_id)
        if not stream:
            raise CorruptionError(f"Event for unknown device {event.device_id!r}")
        index = _locate(stream, event)
        if event.kind is EventKind.ATTACK_STARTED:
            false_positive = labelled and not stream[index].attack_flag
            if labelled and not false_positive:
                onset = _label_onset(stream, index)
            else:
                onset = _hot_onset(stream, index, config)
            episode = EpisodeMetrics(
                device_id=event.device_id,
                onset_index=onset,
                started_index=index,
                detection_latency_samples=index - onset,
                detection_latency_s=round(stream[index].timestamp_s - stream[onset].timestamp_s, 3),
                false_positive=false_positive,
            )
            summary.attacks_detected += 1
            summary.false_positive_count += int(false_positive)
            summary.episodes.append(episode)
            open_episodes[event.device_id] = episode
        elif event.kind is EventKind.ATTACK_STOPPED:
            episode = open_episodes.pop(event.device_id, None)
            if episode is None:
                raise CorruptionError(f"AttackStopped without AttackStarted for {event.device_id!r}")
            last_hot = _last_hot(stream, episode.started_index, index, config)
            episode.stopped_index = index
            episode.stop_latency_samples = index - last_hot
            episode.stop_latency_s = round(stream[index].timestamp_s - stream[last_hot].timestamp_s, 3)
            summary.attacks_stopped += 1
    summary.ongoing_at_end = bool(open_episodes)
    return summary


def format_summary(summary: SummaryMetrics) -> str:
    """人类可读的汇总"""
    if not summary.attacks_detected:
        return f"no attack detected ({summary.samples} samples)"
    lines = [f"{summary.attacks_detected} attack(s) detected in {summary.samples} samples, "
             f"{summary.false_positive_count} false positive(s)"]
    for n, episode in enumerate(summary.episodes, 1):
        line = (f"  #{n} {episode.device_id}: detection latency {episode.detection_latency_samples} samples "
                f"({episode.detection_latency_s:.3f}s)")
        if episode.stopped_index is None:
            line += ", ongoing at end of log"
        else:
            line += f", stop latency {episode.stop_latency_samples} samples ({episode.stop_latency_s:.3f}s)"
        if episode.false_positive:
            line += " [false positive]"
        lines.append(line)
    return "\n".join(lines)


def save_experiment(directory: ExperimentDir, record: ExperimentRecord) -> None:
    write_json_atomic(directory.record, record.model_dump(mode="json"))


def load_experiment(directory: ExperimentDir) -> ExperimentRecord:
    if not directory.record.exists():
        raise NotFoundError(f"{directory.record} does not exist")
    try:
        return ExperimentRecord.model_validate(read_json(directory.record))
    except ValidationError as e:
        raise CorruptionError(f"Invalid experiment record {directory.record}: {e}") from e


@store_wrapper(level="INFO_STORE", model="simple")
def verify_experiment(directory: ExperimentDir) -> ExperimentRecord:
    """重新计算汇总指标并与 experiment.json 比对，不一致即为数据损坏"""
    directory.require_complete()
    record = load_experiment(directory)
    readings = load_readings(directory.readings)
    events = load_events(directory.events)
    if events != record.events:
        raise CorruptionError(f"{directory.events} does not match the events in {directory.record.name}")
    recomputed = compute_summary(readings, events, record.config)
    if recomputed != record.summary:
        raise CorruptionError(f"Summary metrics in {directory.record.name} do not match the stored readings")
    return record
