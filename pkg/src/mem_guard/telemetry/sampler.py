"""主机采样

sample_host 以固定间隔从一个 MeasurementSource 读取原始测量值，
归一化后按时间顺序产出 ResourceReading。
"""

import math
import time
from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Protocol

import psutil

from ..exceptions import AcquisitionError, InvalidInputError
from ..mg_logger import get_logger
from .models import Architecture, DeviceProfile, ResourceReading
from .normalize import normalize_cpu, normalize_mem, quantize_reading

logger = get_logger("multi", "telemetry")


@dataclass(frozen=True)
class RawMeasurement:
    """一次原始测量；total_mem_bytes 为数据源自报的容量（可选）"""

    used_mem_bytes: float
    cpu_percent: Optional[float] = None
    thread_time_s: Optional[float] = None
    total_mem_bytes: Optional[int] = None


class MeasurementSource(Protocol):
    def measure(self) -> RawMeasurement:
        ...


class PsutilSource:
    """本机数据源：系统已用内存(total - available)、系统CPU百分比、本进程CPU时间增量"""

    def __init__(self, architecture: Architecture = Architecture.GENERAL_PURPOSE):
        self.architecture = architecture
        self._process = psutil.Process()
        self._last_cpu_time: Optional[float] = None
        # 首次调用 cpu_percent(interval=None) 只建立基准
        psutil.cpu_percent(interval=None)

    def _thread_time_delta(self) -> float:
        times = self._process.cpu_times()
        now = times.user + times.system
        delta = 0.0 if self._last_cpu_time is None else now - self._last_cpu_time
        self._last_cpu_time = now
        return max(delta, 0.0)

    def measure(self) -> RawMeasurement:
        try:
            memory = psutil.virtual_memory()
        except (OSError, psutil.Error) as e:
            raise AcquisitionError(str(e), metric="memory") from e
        used = memory.total - memory.available
        if self.architecture is Architecture.MICROCONTROLLER:
            try:
                return RawMeasurement(used, thread_time_s=self._thread_time_delta(),
                                      total_mem_bytes=memory.total)
            except (OSError, psutil.Error) as e:
                raise AcquisitionError(str(e), metric="thread_time") from e
        try:
            cpu = psutil.cpu_percent(interval=None)
        except (OSError, psutil.Error) as e:
            raise AcquisitionError(str(e), metric="cpu") from e
        return RawMeasurement(used, cpu_percent=cpu, total_mem_bytes=memory.total)


def sample_count(duration_s: float, interval_s: float) -> int:
    """floor(duration_s / interval_s)，容忍浮点误差（600 / 0.05 得到 12000）"""
    return int(math.floor(duration_s / interval_s + 1e-9))


def _to_reading(raw: RawMeasurement, profile: DeviceProfile, device_id: str, timestamp_s: float) -> ResourceReading:
    if profile.total_mem_bytes == 0 and raw.total_mem_bytes:
        profile = profile.model_copy(update={"total_mem_bytes": raw.total_mem_bytes})
    mem_frac = normalize_mem(raw.used_mem_bytes, profile)
    if profile.architecture is Architecture.GENERAL_PURPOSE:
        if raw.cpu_percent is None:
            raise AcquisitionError("source reported no CPU usage", metric="cpu")
        reading = ResourceReading(device_id=device_id, timestamp_s=timestamp_s, mem_frac=mem_frac,
                                  cpu_frac=normalize_cpu(raw.cpu_percent))
    else:
        if raw.thread_time_s is None:
            raise AcquisitionError("source reported no thread time", metric="thread_time")
        reading = ResourceReading(device_id=device_id, timestamp_s=timestamp_s, mem_frac=mem_frac,
                                  thread_time_s=raw.thread_time_s)
    return quantize_reading(reading)


def sample_host(interval_s: float,
                duration_s: float,
                profile: DeviceProfile,
                source: Optional[MeasurementSource] = None,
                device_id: str = "localhost",
                clock: Callable[[], float] = time.monotonic,
                sleep: Callable[[float], None] = time.sleep) -> Iterator[ResourceReading]:
    """每 interval_s 秒采样一次，共 floor(duration_s / interval_s) 次

    每次采样发生在对应间隔结束时，时间戳为距开始的秒数。
    clock/sleep 可注入，便于测试。
    """
    if interval_s <= 0:
        raise InvalidInputError(f"interval_s must be positive, got {interval_s}")
    if duration_s < interval_s:
        raise InvalidInputError(f"duration_s ({duration_s}) must be at least interval_s ({interval_s})")

    source = source or PsutilSource(profile.architecture)
    count = sample_count(duration_s, interval_s)
    logger.info_telemetry("sampling %d readings every %.3fs (profile=%s)", count, interval_s, profile.name)

    start = clock()
    for index in range(1, count + 1):
        deadline = start + index * interval_s
        remaining = deadline - clock()
        if remaining > 0:
            sleep(remaining)
        timestamp_s = max(clock() - start, 0.0)
        yield _to_reading(source.measure(), profile, device_id, timestamp_s)
