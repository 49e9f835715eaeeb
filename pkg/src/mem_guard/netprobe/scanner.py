"""网段/端口扫描

对每个地址做 TCP connect 探测：握手完成说明端口开放，被拒绝说明主机在线但端口关闭，
超时则记为离线。端口列表为空时只做一次存活探测。
"""

import ipaddress
import socket
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from ..exceptions import ScanError
from ..settings import get_settings
from .allowlist import Allowlist
from .models import DeviceRecord, HostStatus
from .registry import DeviceRegistry, logger

# 存活探测使用的端口，不会出现在 open_ports 中
LIVENESS_PORT = 7


def expand_targets(targets: str | Sequence[str], max_hosts: int) -> List[ipaddress.IPv4Address]:
    """'127.0.0.1'、'127.0.0.0/30' 或它们的列表 -> 地址列表"""
    items = [targets] if isinstance(targets, str) else list(targets)
    addresses: List[ipaddress.IPv4Address] = []
    for item in items:
        try:
            network = ipaddress.IPv4Network(str(item).strip(), strict=False)
        except ValueError as e:
            raise ScanError(f"Cannot parse target range {item!r}") from e
        if network.is_multicast or network.is_reserved or network.is_unspecified \
                or network.network_address == ipaddress.IPv4Address("255.255.255.255"):
            raise ScanError(f"Target range {network} is not routable")
        hosts = [network.network_address] if network.num_addresses == 1 else list(network.hosts())
        if len(addresses) + len(hosts) > max_hosts:
            raise ScanError(f"Target range exceeds {max_hosts} hosts")
        addresses.extend(hosts)
    if not addresses:
        raise ScanError("Target range is empty")
    return list(dict.fromkeys(addresses))


def probe_port(ip: str, port: int, timeout_s: float) -> Tuple[bool, bool]:
    """返回 (主机应答, 端口开放)"""
    try:
        with socket.create_connection((ip, port), timeout=timeout_s):
            return True, True
    except ConnectionRefusedError:
        return True, False
    except (socket.timeout, TimeoutError):
        return False, False
    except OSError:
        return False, False


def _probe_host(ip: str, ports: Sequence[int], timeout_s: float) -> Tuple[bool, List[int]]:
    if not ports:
        alive, _ = probe_port(ip, LIVENESS_PORT, timeout_s)
        return alive, []
    alive = False
    open_ports: List[int] = []
    for port in ports:
        answered, is_open = probe_port(ip, port, timeout_s)
        alive = alive or answered
        if is_open:
            open_ports.append(port)
    return alive, open_ports


def scan(targets: str | Sequence[str],
         ports: Sequence[int],
         timeout_ms: Optional[int] = None,
         registry: Optional[DeviceRegistry] = None,
         allowlist: Optional[Allowlist] = None,
         workers: Optional[int] = None,
         clock: Callable[[], float] = time.time) -> List[DeviceRecord]:
    """扫描地址范围，每个地址一条记录；传入 registry 时合并并持久化"""
    settings = get_settings().netprobe
    timeout_ms = timeout_ms or settings.scan_timeout_ms
    allowlist = allowlist or Allowlist(settings.allowlist)
    ports = list(dict.fromkeys(ports))
    for port in ports:
        if not 0 < port < 65536:
            raise ScanError(f"Port {port} is outside [1, 65535]")

    addresses = expand_targets(targets, settings.max_scan_hosts)
    for address in addresses:
        allowlist.check(address)

    logger.info_netprobe("scanning %d hosts, %d ports, timeout %dms", len(addresses), len(ports), timeout_ms)
    timeout_s = timeout_ms / 1000.0
    results: Dict[ipaddress.IPv4Address, Tuple[bool, List[int]]] = {}
    max_workers = min(workers or settings.scan_workers, len(addresses))
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        futures = {executor.submit(_probe_host, str(address), ports, timeout_s): address for address in addresses}
        for future in as_completed(futures):
            results[futures[future]] = future.result()

    now = clock()
    records: List[DeviceRecord] = []
    for address in addresses:
        alive, open_ports = results[address]
        record = DeviceRecord(
            ip=address,
            status=HostStatus.ONLINE if alive else HostStatus.OFFLINE,
            open_ports=open_ports,
            last_seen_s=now if alive else 0.0,
        )
        if registry is not None:
            record = registry.upsert(record)
        records.append(record)
    if registry is not None:
        registry.save()

    online = sum(record.status is HostStatus.ONLINE for record in records)
    logger.info_netprobe("scan finished: %d/%d online", online, len(records))
    return records
