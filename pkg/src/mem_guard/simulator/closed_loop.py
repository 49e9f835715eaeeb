"""闭环：模拟器 -> 检测器 -> 缓解 -> 模拟器"""

from typing import List, NamedTuple

from ..detector.engine import DetectorEngine
from ..detector.models import DetectionEvent, DetectorConfig, EventKind
from ..telemetry.models import ResourceReading
from .models import AttackScenario, DeviceSim
from .trace import TraceGenerator, logger, simulator_wrapper


class ClosedLoopResult(NamedTuple):
    readings: List[ResourceReading]
    events: List[DetectionEvent]
    device: DeviceSim


@simulator_wrapper(level="INFO_SIMULATOR", model="simple")
def run_closed_loop(device: DeviceSim,
                    scenario: AttackScenario,
                    config: DetectorConfig,
                    interval_s: float,
                    total_s: float) -> ClosedLoopResult:
    """逐个采样推进模拟，每个采样交给检测器，MitigationApplied 的动作在下一个采样前作用于设备

    Returns:
        ClosedLoopResult(readings, events, device)，device 为运行结束时的设备状态
    """
    generator = TraceGenerator(device, scenario, interval_s, total_s)
    engine = DetectorEngine(config)
    readings: List[ResourceReading] = []
    events: List[DetectionEvent] = []

    for reading in generator:
        readings.append(reading)
        new_events = engine.feed(reading)
        events.extend(new_events)
        for event in new_events:
            if event.kind is EventKind.MITIGATION_APPLIED:
                generator.apply_mitigation(event.actions, event.timestamp_s)

    logger.info_simulator("closed loop on %s: %d readings, %d events, link %s",
                          device.device_id, len(readings), len(events), generator.device.link_state.value)
    return ClosedLoopResult(readings, events, generator.device)
