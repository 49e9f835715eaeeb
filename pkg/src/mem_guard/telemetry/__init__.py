"""遥测：采样、归一化与状态分类"""

from .models import Architecture, DeviceProfile, ResourceReading, StatusClass
from .profiles import ARDUINO, BUILTIN_PROFILES, RASPBERRY_PI, get_profile, load_profile
from .normalize import normalize_cpu, normalize_free_mem, normalize_mem, quantize_reading
from .classify import FootprintRow, classify_mem, classify_status, footprint_summary
from .sampler import MeasurementSource, PsutilSource, RawMeasurement, sample_count, sample_host

__all__ = [
    "Architecture",
    "DeviceProfile",
    "ResourceReading",
    "StatusClass",
    "ARDUINO",
    "BUILTIN_PROFILES",
    "RASPBERRY_PI",
    "get_profile",
    "load_profile",
    "normalize_cpu",
    "normalize_free_mem",
    "normalize_mem",
    "quantize_reading",
    "FootprintRow",
    "classify_mem",
    "classify_status",
    "footprint_summary",
    "MeasurementSource",
    "PsutilSource",
    "RawMeasurement",
    "sample_count",
    "sample_host",
]
