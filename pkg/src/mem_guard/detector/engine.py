"""内存占用攻击检测状态机

每个设备一份 DetectorState。对每次新采样 M2（上一采样为 M1）：

    Diff = M2 - M1（只关心上升方向）
    可疑(P) 时：T1 归零；未告警则 C1 += 1，C1 > count_threshold 时告警并下发缓解
    不可疑且 C1 > 0 时：T1 += 1，T1 > time_threshold 时复位；若处于告警则宣告攻击停止
"""

import math
from typing import Dict, Iterable, List, Tuple

from ..exceptions import InvalidMeasurementError, OrderingError
from ..mg_logger import get_logger
from ..telemetry.models import ResourceReading
from .models import (
    DetectionEvent,
    DetectorConfig,
    DetectorState,
    EventKind,
    Phase,
    TriggerMode,
)

logger = get_logger("multi", "detector")

INITIAL_STATE = DetectorState()


def is_suspicious(diff: float, mem_frac: float, config: DetectorConfig) -> bool:
    """触发判据 P"""
    differential = diff > config.differential_threshold
    absolute = mem_frac > config.absolute_threshold
    if config.trigger_mode is TriggerMode.DIFFERENTIAL:
        return differential
    if config.trigger_mode is TriggerMode.ABSOLUTE:
        return absolute
    return differential and absolute


def detector_step(state: DetectorState,
                  config: DetectorConfig,
                  reading: ResourceReading) -> Tuple[DetectorState, List[DetectionEvent]]:
    """推进一步状态机，纯函数"""
    m2 = reading.mem_frac
    if not math.isfinite(m2) or not 0.0 <= m2 <= 1.0:
        raise InvalidMeasurementError(f"mem_frac {m2!r} of {reading.device_id!r} is outside [0,1]")
    if state.last_timestamp_s is not None and reading.timestamp_s <= state.last_timestamp_s:
        raise OrderingError(
            f"Reading of {reading.device_id!r} at {reading.timestamp_s}s does not follow {state.last_timestamp_s}s"
        )

    m1 = m2 if state.prev_mem is None else state.prev_mem
    diff = m2 - m1
    counter_c1, timer_t1, alert = state.counter_c1, state.timer_t1, state.alert
    index = state.samples_seen
    events: List[DetectionEvent] = []

    def emit(kind: EventKind, **extra) -> None:
        events.append(DetectionEvent(kind=kind, device_id=reading.device_id, timestamp_s=reading.timestamp_s,
                                     mem_frac=m2, sample_index=index, **extra))

    if is_suspicious(diff, m2, config):
        timer_t1 = 0
        if not alert:
            counter_c1 += 1
            if counter_c1 > config.count_threshold:
                alert = True
                emit(EventKind.ATTACK_STARTED)
                emit(EventKind.MITIGATION_APPLIED, actions=config.mitigation_actions)
    elif counter_c1 > 0:
        timer_t1 += 1
        if timer_t1 > config.time_threshold:
            if alert:
                emit(EventKind.ATTACK_STOPPED)
            counter_c1, timer_t1, alert = 0, 0, False

    new_state = state.model_copy(update={
        "prev_mem": m2,
        "counter_c1": counter_c1,
        "timer_t1": timer_t1,
        "alert": alert,
        "phase": Phase.ATTACK_ACTIVE if alert else Phase.MONITORING,
        "last_timestamp_s": reading.timestamp_s,
        "samples_seen": index + 1,
    })
    return new_state, events


class DetectorEngine:
    """按设备维护状态机，支持快照与恢复"""

    def __init__(self, config: DetectorConfig, states: Dict[str, DetectorState] | None = None):
        self.config = config
        self.states: Dict[str, DetectorState] = dict(states or {})

    def state_of(self, device_id: str) -> DetectorState:
        return self.states.get(device_id, INITIAL_STATE)

    def feed(self, reading: ResourceReading) -> List[DetectionEvent]:
        state, events = detector_step(self.state_of(reading.device_id), self.config, reading)
        self.states[reading.device_id] = state
        for event in events:
            if event.kind is EventKind.ATTACK_STARTED:
                logger.warning("ALERT: memory usage attack on %s at %.3fs (mem=%.4f)",
                               event.device_id, event.timestamp_s, event.mem_frac)
            elif event.kind is EventKind.ATTACK_STOPPED:
                logger.warning("ALERT: memory usage attack on %s stopped at %.3fs",
                               event.device_id, event.timestamp_s)
            else:
                logger.info_detector("mitigation for %s: %s", event.device_id,
                                     ", ".join(action.value for action in event.actions))
        return events

    def snapshot(self) -> Dict[str, str]:
        """各设备状态的JSON快照"""
        return {device_id: state.model_dump_json() for device_id, state in self.states.items()}

    @classmethod
    def restore(cls, config: DetectorConfig, snapshot: Dict[str, str]) -> "DetectorEngine":
        states = {device_id: DetectorState.model_validate_json(text) for device_id, text in snapshot.items()}
        return cls(config, states)


def detector_run(readings: Iterable[ResourceReading], config: DetectorConfig) -> List[DetectionEvent]:
    """从初始状态对整条流折叠 detector_step"""
    engine = DetectorEngine(config)
    events: List[DetectionEvent] = []
    for reading in readings:
        events.extend(engine.feed(reading))
    return events
