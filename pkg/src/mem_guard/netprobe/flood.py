"""TCP/UDP 洪泛发生器

第 i 个包在 start + i / rate_pps 时刻发出，共 round(rate_pps * duration_s) 个包。
TCP 模式为带载荷的快速建连/断开，不需要原始套接字权限。
"""

import socket
import threading
import time
from typing import Callable, Optional

from ..addressing import parse_endpoint
from ..exceptions import InvalidInputError, RefusalError, TransportError
from ..mg_logger import create_logger_wrapper
from ..settings import NetprobeSettings, get_settings
from .allowlist import Allowlist
from .models import FloodStats, TransportProtocol
from .registry import DeviceRegistry, logger

netprobe_wrapper = create_logger_wrapper(logger)

TCP_CONNECT_TIMEOUT_S = 1.0


def _check_limits(rate_pps: float, duration_s: float, payload_bytes: int, settings: NetprobeSettings) -> None:
    if rate_pps <= 0:
        raise InvalidInputError(f"rate_pps must be positive, got {rate_pps}")
    if duration_s <= 0:
        raise InvalidInputError(f"duration_s must be positive, got {duration_s}")
    if payload_bytes < 0:
        raise InvalidInputError(f"payload_bytes must be non-negative, got {payload_bytes}")
    if rate_pps > settings.max_rate_pps:
        raise RefusalError(f"rate_pps {rate_pps} exceeds the cap of {settings.max_rate_pps}")
    if duration_s > settings.max_duration_s:
        raise RefusalError(f"duration_s {duration_s} exceeds the cap of {settings.max_duration_s}")


@netprobe_wrapper(level="INFO_NETPROBE")
def flood(target: str,
          protocol: TransportProtocol | str,
          rate_pps: float,
          duration_s: float,
          payload_bytes: Optional[int] = None,
          registry: Optional[DeviceRegistry] = None,
          allowlist: Optional[Allowlist] = None,
          is_blacklisted: Optional[Callable[[str], bool]] = None,
          stop: Optional[threading.Event] = None,
          clock: Callable[[], float] = time.monotonic,
          sleep: Callable[[float], None] = time.sleep) -> FloodStats:
    """向 ip:port 发送洪泛，返回攻击端计数

    Raises:
        AllowlistViolationError: 目标不在允许列表中（不发任何包）
        RefusalError: 目标已被列入黑名单，或速率/时长超出上限
        TransportError: 套接字失败
    """
    settings = get_settings().netprobe
    protocol = TransportProtocol(protocol)
    payload_bytes = settings.default_payload_bytes if payload_bytes is None else payload_bytes
    _check_limits(rate_pps, duration_s, payload_bytes, settings)

    ip, port = parse_endpoint(target)
    (allowlist or Allowlist(settings.allowlist)).check(ip)
    if (registry is not None and registry.is_blacklisted(str(ip))) or \
            (is_blacklisted is not None and is_blacklisted(str(ip))):
        raise RefusalError(f"Target {ip} is blacklisted")

    total = max(1, round(rate_pps * duration_s))
    payload = b"\x00" * payload_bytes
    address = (str(ip), port)
    sent = 0
    failures = 0
    logger.info_netprobe("%s flood -> %s:%d, %d packets at %.0f pps", protocol.value, ip, port, total, rate_pps)

    udp_socket = socket.socket(socket.AF_INET, socket.SOCK_DGRAM) if protocol is TransportProtocol.UDP else None
    start = clock()
    try:
        for index in range(total):
            if stop is not None and stop.is_set():
                break
            remaining = start + index / rate_pps - clock()
            if remaining > 0:
                sleep(remaining)
            if udp_socket is not None:
                try:
                    udp_socket.sendto(payload, address)
                    sent += 1
                except OSError as e:
                    raise TransportError(f"UDP send to {ip}:{port} failed: {e}") from e
            else:
                try:
                    with socket.create_connection(address, timeout=TCP_CONNECT_TIMEOUT_S) as conn:
                        if payload:
                            conn.sendall(payload)
                    sent += 1
                except OSError:
                    # 受害端断开后连接会被拒绝，计为失败而不是中止
                    failures += 1
    finally:
        if udp_socket is not None:
            udp_socket.close()

    elapsed = max(clock() - start, 0.0)
    if protocol is TransportProtocol.TCP and sent == 0 and failures:
        raise TransportError(f"All {failures} TCP connections to {ip}:{port} failed")
    if failures:
        logger.warning("%d of %d TCP connections to %s:%d failed", failures, failures + sent, ip, port)
    logger.info_netprobe("flood finished: %d packets in %.3fs", sent, elapsed)
    return FloodStats(packets_sent=sent, duration_s=elapsed)
