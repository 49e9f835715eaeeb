"""原始测量值归一化到 [0,1]"""

import math

from ..exceptions import InvalidMeasurementError, InvalidProfileError
from .models import DeviceProfile, ResourceReading

TIMESTAMP_DIGITS = 3
FRACTION_DIGITS = 6


def _check_raw(value: float, what: str) -> None:
    if not math.isfinite(value) or value < 0:
        raise InvalidMeasurementError(f"{what} must be a finite non-negative number, got {value!r}")


def _capacity(profile: DeviceProfile) -> int:
    if profile.total_mem_bytes <= 0:
        raise InvalidProfileError(f"Profile {profile.name!r} has no memory capacity")
    return profile.total_mem_bytes


def normalize_mem(raw_used_bytes: float, profile: DeviceProfile) -> float:
    """已用内存字节数 -> 占用比例，超过容量时饱和为1"""
    _check_raw(raw_used_bytes, "raw_used_bytes")
    return min(raw_used_bytes / _capacity(profile), 1.0)


def normalize_free_mem(raw_free_bytes: float, profile: DeviceProfile) -> float:
    """空闲内存字节数 -> 占用比例 (1 - free/total)，用于只报告空闲内存的微控制器"""
    _check_raw(raw_free_bytes, "raw_free_bytes")
    return min(max(1.0 - raw_free_bytes / _capacity(profile), 0.0), 1.0)


def normalize_cpu(raw_cpu_percent: float) -> float:
    """CPU百分比 -> 比例，多核突发超过100%时截断为1"""
    _check_raw(raw_cpu_percent, "raw_cpu_percent")
    return min(raw_cpu_percent / 100.0, 1.0)


def quantize_reading(reading: ResourceReading) -> ResourceReading:
    """时间戳保留3位小数，比例保留6位小数，保证日志回放逐位一致"""
    update = {
        "timestamp_s": round(reading.timestamp_s, TIMESTAMP_DIGITS),
        "mem_frac": round(reading.mem_frac, FRACTION_DIGITS),
    }
    if reading.cpu_frac is not None:
        update["cpu_frac"] = round(reading.cpu_frac, FRACTION_DIGITS)
    if reading.thread_time_s is not None:
        update["thread_time_s"] = round(reading.thread_time_s, TIMESTAMP_DIGITS)
    return reading.model_copy(update=update)
