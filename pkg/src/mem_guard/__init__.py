"""mem_guard - IoT 设备内存占用攻击检测与缓解

子包：
    telemetry  采样、归一化与状态分类
    detector   阈值推导与检测状态机
    simulator  确定性设备轨迹与闭环模拟
    netprobe   扫描、洪泛、受害者桩（默认仅回环）
    store      JSONL/JSON 持久化与实验记录
    cli        memguard 命令行
"""

from .exceptions import MemGuardError
from .settings import get_settings, load_settings
from .telemetry import ARDUINO, RASPBERRY_PI, DeviceProfile, ResourceReading, StatusClass, classify_status
from .detector import DetectionEvent, DetectorConfig, DetectorEngine, TriggerMode, detector_run, detector_step
from .simulator import AttackScenario, DeviceSim, run_closed_loop, simulate_trace

__version__ = "0.1.0"

__all__ = [
    "MemGuardError",
    "get_settings",
    "load_settings",
    "ARDUINO",
    "RASPBERRY_PI",
    "DeviceProfile",
    "ResourceReading",
    "StatusClass",
    "classify_status",
    "DetectionEvent",
    "DetectorConfig",
    "DetectorEngine",
    "TriggerMode",
    "detector_run",
    "detector_step",
    "AttackScenario",
    "DeviceSim",
    "run_closed_loop",
    "simulate_trace",
]
