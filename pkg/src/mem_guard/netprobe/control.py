"""受害者桩控制通道客户端、远程数据源与实时缓解执行器"""

import json
import socket
import time
from functools import wraps
from typing import Any, Callable, Dict, Optional, Sequence

import psutil
from pydantic import BaseModel, Field

from ..addressing import parse_endpoint, parse_ipv4
from ..detector.models import MitigationAction, validate_mitigation_actions
from ..exceptions import AcquisitionError, AddressParseError, NotFoundError, RetryExhaustedError, TransportError
from ..mg_logger import EnhancedLogger
from ..telemetry.models import Architecture
from ..telemetry.sampler import RawMeasurement
from .models import DeviceRecord, HostStatus
from .registry import DeviceRegistry, blacklist_enforce, logger


class RetryPolicy(BaseModel):
    """控制通道重试配置"""

    max_retries: int = Field(default=3, ge=0, description="最大重试次数")
    retry_delay: float = Field(default=0.1, ge=0, description="首次重试延迟（秒）")
    retry_backoff_factor: float = Field(default=2.0, ge=1, description="重试退避因子")
    max_delay: float = Field(default=5.0, gt=0, description="单次延迟上限（秒）")


class RetryStrategy:
    """重试策略：只重试套接字层错误，延迟按指数退避"""

    def __init__(self, policy: RetryPolicy, logger: EnhancedLogger):
        self.policy = policy
        self.logger = logger

    def should_retry(self, exception: Exception) -> bool:
        # 连接被拒、超时、连接重置都属于 OSError
        return isinstance(exception, OSError)

    def get_delay(self, attempt: int) -> float:
        delay = self.policy.retry_delay * (self.policy.retry_backoff_factor ** (attempt - 1))
        return min(delay, self.policy.max_delay)

    def convert_exception(self, exception: Exception) -> Exception:
        if isinstance(exception, OSError):
            return TransportError(str(exception))
        return exception


def with_retry(retry_strategy: RetryStrategy, sleep: Callable[[float], None] = time.sleep):
    """同步重试装饰器"""
    def decorator(func: Callable[..., Any]) -> Callable[..., Any]:
        @wraps(func)
        def wrapper(*args, **kwargs) -> Any:
            max_retries = retry_strategy.policy.max_retries
            for attempt in range(1, max_retries + 2):
                try:
                    return func(*args, **kwargs)
                except Exception as e:
                    if not retry_strategy.should_retry(e):
                        raise
                    converted = retry_strategy.convert_exception(e)
                    if attempt > max_retries:
                        if attempt > 1:
                            raise RetryExhaustedError(
                                f"Maximum retry attempts ({max_retries}) exceeded. Last error: {converted}"
                            ) from e
                        raise converted from e
                    delay = retry_strategy.get_delay(attempt)
                    retry_strategy.logger.warning("%s failed (%s), retry %d/%d in %.2fs",
                                                  func.__name__, e, attempt, max_retries, delay)
                    sleep(delay)
            raise RetryExhaustedError("Unexpected retry loop exit")
        return wrapper
    return decorator


class ControlClient:
    """按行文本协议的控制通道客户端，每条命令一次短连接"""

    def __init__(self, endpoint: str, timeout_s: float = 2.0, retry: Optional[RetryPolicy] = None,
                 sleep: Callable[[float], None] = time.sleep):
        ip, port = parse_endpoint(endpoint)
        self.address = (str(ip), port)
        self.timeout_s = timeout_s
        self._command = with_retry(RetryStrategy(retry or RetryPolicy(), logger), sleep)(self._command_once)

    def _command_once(self, line: str) -> str:
        with socket.create_connection(self.address, timeout=self.timeout_s) as conn:
            conn.sendall((line.strip() + "\n").encode("utf-8"))
            with conn.makefile("r", encoding="utf-8", newline="\n") as reader:
                response = reader.readline()
        if not response:
            raise ConnectionResetError(f"victim at {self.address[0]}:{self.address[1]} closed the channel")
        return response.strip()

    def command(self, line: str) -> str:
        response = self._command(line)
        if response.startswith("ERR"):
            raise TransportError(f"victim rejected {line.strip()!r}: {response[3:].strip()}")
        return response

    def stats(self) -> Dict[str, Any]:
        try:
            return json.loads(self.command("STATS"))
        except json.JSONDecodeError as e:
            raise TransportError(f"Malformed STATS reply: {e}") from e

    def stop_rw(self) -> None:
        self.command("STOPRW")

    def disconnect(self) -> None:
        self.command("DISCONNECT")

    def blacklist(self, ip: str) -> None:
        self.command(f"BLACKLIST {ip}")


class VictimStatsSource:
    """经控制通道轮询 STATS 的 MeasurementSource，支持跨进程采样"""

    def __init__(self, client: ControlClient, architecture: Architecture = Architecture.GENERAL_PURPOSE):
        self.client = client
        self.architecture = architecture
        self._last_cpu_time: Optional[float] = None
        psutil.cpu_percent(interval=None)

    def measure(self) -> RawMeasurement:
        try:
            stats = self.client.stats()
        except TransportError as e:
            raise AcquisitionError(e.message, metric="memory") from e
        used, cap = stats["bytes_buffered"], stats["cap_bytes"]
        if self.architecture is Architecture.MICROCONTROLLER:
            times = psutil.Process().cpu_times()
            now = times.user + times.system
            delta = 0.0 if self._last_cpu_time is None else max(now - self._last_cpu_time, 0.0)
            self._last_cpu_time = now
            return RawMeasurement(used, thread_time_s=delta, total_mem_bytes=cap)
        return RawMeasurement(used, cpu_percent=psutil.cpu_percent(interval=None), total_mem_bytes=cap)


class LiveMitigator:
    """把 MitigationApplied 的动作作用到真实的受害者桩和注册表上"""

    def __init__(self, client: ControlClient, registry: Optional[DeviceRegistry] = None,
                 blacklist_add: Optional[Callable[[str], Any]] = None):
        self.client = client
        self.registry = registry
        self.blacklist_add = blacklist_add

    def apply(self, device_id: str, actions: Sequence[MitigationAction | str]) -> None:
        for action in validate_mitigation_actions(actions):
            if action is MitigationAction.BLACKLIST:
                self._blacklist(device_id)
            elif action is MitigationAction.STOP_READ_WRITE:
                self.client.stop_rw()
            else:
                self.client.disconnect()
            logger.info_mitigation("applied %s to %s", action.value, device_id)

    def _blacklist(self, device_id: str) -> None:
        try:
            parse_ipv4(device_id)
        except AddressParseError:
            logger.warning("device %s is not an IPv4 address, blacklisting skipped", device_id)
            return
        if self.registry is not None:
            try:
                blacklist_enforce(self.registry, device_id)
            except NotFoundError:
                self.registry.upsert(DeviceRecord(ip=device_id, status=HostStatus.ONLINE,
                                                  blacklisted=True, last_seen_s=time.time()))
                self.registry.save()
        if self.blacklist_add is not None:
            self.blacklist_add(device_id)
        self.client.blacklist(device_id)
