"""网络探测：扫描、洪泛、受害者桩与实时缓解（默认只允许回环地址）"""

from .models import DeviceRecord, FloodStats, HostStatus, TransportProtocol
from .allowlist import Allowlist
from .registry import DeviceRegistry, blacklist_enforce
from .scanner import expand_targets, probe_port, scan
from .flood import flood
from .victim import DEFAULT_BUFFER_POLICY, DEFAULT_CAP_BYTES, VictimStub
from .control import ControlClient, LiveMitigator, RetryPolicy, RetryStrategy, VictimStatsSource, with_retry

__all__ = [
    "DeviceRecord",
    "FloodStats",
    "HostStatus",
    "TransportProtocol",
    "Allowlist",
    "DeviceRegistry",
    "blacklist_enforce",
    "expand_targets",
    "probe_port",
    "scan",
    "flood",
    "DEFAULT_BUFFER_POLICY",
    "DEFAULT_CAP_BYTES",
    "VictimStub",
    "ControlClient",
    "LiveMitigator",
    "RetryPolicy",
    "RetryStrategy",
    "VictimStatsSource",
    "with_retry",
]
