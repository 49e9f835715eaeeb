"""受害者桩

在同一端口号上监听 UDP 与 TCP，每收到一个包保留 buffer_policy 字节（直到 cap_bytes），
让洪泛真实地推高驻留内存。控制通道为按行文本协议：

    STATS           -> 一行JSON计数
    STOPRW          -> 停止缓冲增长
    DISCONNECT      -> 关闭数据套接字
    BLACKLIST <ip>  -> 丢弃该源地址的流量
"""

import json
import socket
import threading
import time
from typing import Dict, Iterable, List, Optional, Set, Tuple

import psutil

from ..addressing import parse_ipv4
from ..exceptions import MemGuardError, StartupError
from ..telemetry.models import Architecture
from ..telemetry.sampler import RawMeasurement
from .models import FloodStats
from .registry import logger

DEFAULT_BUFFER_POLICY = 512
DEFAULT_CAP_BYTES = 4 * 1024 * 1024
_RECV_SIZE = 65536
_POLL_S = 0.2


class VictimStub:
    """可控的本地受害进程，计数器在锁内更新，stats() 返回一致快照"""

    def __init__(self,
                 host: str = "127.0.0.1",
                 port: int = 0,
                 control_port: int = 0,
                 buffer_policy: int = DEFAULT_BUFFER_POLICY,
                 cap_bytes: int = DEFAULT_CAP_BYTES,
                 blacklist: Iterable[str] = (),
                 architecture: Architecture = Architecture.GENERAL_PURPOSE):
        if buffer_policy < 0 or cap_bytes <= 0:
            raise StartupError("buffer_policy must be >= 0 and cap_bytes > 0")
        self.host = host
        self.port = port
        self.control_port = control_port
        self.buffer_policy = buffer_policy
        self.cap_bytes = cap_bytes
        self.architecture = architecture

        self._lock = threading.Lock()
        self._buffers: List[bytearray] = []
        self._packets_seen = 0
        self._packets_received = 0
        self._bytes_buffered = 0
        self._blacklist: Set[str] = {str(parse_ipv4(ip)) for ip in blacklist}
        self._rw_enabled = True
        self._connected = False
        self._started_at: Optional[float] = None

        self._closing = threading.Event()
        self._data_closed = threading.Event()
        self._udp: Optional[socket.socket] = None
        self._tcp: Optional[socket.socket] = None
        self._control: Optional[socket.socket] = None
        self._threads: List[threading.Thread] = []
        self._process = psutil.Process()
        self._last_cpu_time: Optional[float] = None

    # ---- 生命周期 ----

    def start(self) -> "VictimStub":
        try:
            self._udp = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
            self._udp.bind((self.host, self.port))
            self.port = self._udp.getsockname()[1]
            self._tcp = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
            self._tcp.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
            self._tcp.bind((self.host, self.port))
            self._tcp.listen(128)
            self._control = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
            self._control.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
            self._control.bind((self.host, self.control_port))
            self._control.listen(8)
            self.control_port = self._control.getsockname()[1]
        except OSError as e:
            self._close_sockets()
            raise StartupError(f"Cannot bind victim stub on {self.host}:{self.port}: {e}") from e

        for sock in (self._udp, self._tcp, self._control):
            sock.settimeout(_POLL_S)
        self._connected = True
        self._started_at = time.monotonic()
        for target, name in ((self._udp_loop, "victim-udp"),
                             (self._tcp_loop, "victim-tcp"),
                             (self._control_loop, "victim-control")):
            thread = threading.Thread(target=target, name=name, daemon=True)
            thread.start()
            self._threads.append(thread)
        logger.info_netprobe("victim stub listening on %s:%d (control %d, %d B/packet, cap %d B)",
                             self.host, self.port, self.control_port, self.buffer_policy, self.cap_bytes)
        return self

    def close(self) -> None:
        self._closing.set()
        self._data_closed.set()
        for thread in self._threads:
            thread.join(timeout=2 * _POLL_S + 1)
        self._close_sockets()
        self._threads.clear()

    def __enter__(self) -> "VictimStub":
        return self.start()

    def __exit__(self, *exc_info) -> None:
        self.close()

    def _close_sockets(self) -> None:
        for sock in (self._udp, self._tcp, self._control):
            if sock is not None:
                sock.close()

    @property
    def address(self) -> Tuple[str, int]:
        return self.host, self.port

    @property
    def endpoint(self) -> str:
        return f"{self.host}:{self.port}"

    @property
    def control_endpoint(self) -> str:
        return f"{self.host}:{self.control_port}"

    # ---- 计数 ----

    def _on_packet(self, source_ip: str) -> None:
        with self._lock:
            self._packets_seen += 1
            if source_ip in self._blacklist:
                return
            self._packets_received += 1
            if not self._rw_enabled:
                return
            retained = min(self.buffer_policy, self.cap_bytes - self._bytes_buffered)
            if retained > 0:
                self._buffers.append(bytearray(retained))
                self._bytes_buffered += retained

    def stats(self) -> FloodStats:
        with self._lock:
            duration = 0.0 if self._started_at is None else time.monotonic() - self._started_at
            return FloodStats(packets_sent=self._packets_seen, packets_received=self._packets_received,
                              bytes_buffered=self._bytes_buffered, duration_s=round(duration, 3))

    def mem_frac(self) -> float:
        with self._lock:
            return min(self._bytes_buffered / self.cap_bytes, 1.0)

    def stats_payload(self) -> Dict[str, object]:
        """STATS 命令的应答内容"""
        payload: Dict[str, object] = self.stats().model_dump()
        with self._lock:
            payload.update(cap_bytes=self.cap_bytes, rw_enabled=self._rw_enabled, connected=self._connected)
        return payload

    def measure(self) -> RawMeasurement:
        """MeasurementSource：已缓冲字节 / 上限 作为内存占用"""
        with self._lock:
            used = self._bytes_buffered
        if self.architecture is Architecture.MICROCONTROLLER:
            times = self._process.cpu_times()
            now = times.user + times.system
            delta = 0.0 if self._last_cpu_time is None else max(now - self._last_cpu_time, 0.0)
            self._last_cpu_time = now
            return RawMeasurement(used, thread_time_s=delta, total_mem_bytes=self.cap_bytes)
        return RawMeasurement(used, cpu_percent=self._process.cpu_percent(interval=None),
                              total_mem_bytes=self.cap_bytes)

    # ---- 缓解命令 ----

    def stop_rw(self) -> None:
        with self._lock:
            self._rw_enabled = False
        logger.info_mitigation("victim %s: read/write stopped", self.endpoint)

    def disconnect(self) -> None:
        with self._lock:
            self._connected = False
        self._data_closed.set()
        logger.info_mitigation("victim %s: disconnected", self.endpoint)

    def blacklist(self, ip: str) -> None:
        address = str(parse_ipv4(ip))
        with self._lock:
            self._blacklist.add(address)
        logger.info_mitigation("victim %s: dropping traffic from %s", self.endpoint, address)

    def handle_command(self, line: str) -> str:
        command, _, argument = line.strip().partition(" ")
        command = command.upper()
        if command == "STATS":
            return json.dumps(self.stats_payload(), sort_keys=True)
        if command == "STOPRW":
            self.stop_rw()
            return "OK"
        if command == "DISCONNECT":
            self.disconnect()
            return "OK"
        if command == "BLACKLIST":
            try:
                self.blacklist(argument)
            except MemGuardError as e:
                return f"ERR {e.message}"
            return "OK"
        return f"ERR unknown command {command!r}"

    # ---- 线程 ----

    def _udp_loop(self) -> None:
        sock = self._udp
        while not self._data_closed.is_set():
            try:
                _, (source_ip, _) = sock.recvfrom(_RECV_SIZE)
            except socket.timeout:
                continue
            except OSError:
                break
            if self._data_closed.is_set():
                break
            self._on_packet(source_ip)
        sock.close()

    def _tcp_loop(self) -> None:
        listener = self._tcp
        while not self._data_closed.is_set():
            try:
                conn, (source_ip, _) = listener.accept()
            except socket.timeout:
                continue
            except OSError:
                break
            with conn:
                conn.settimeout(_POLL_S)
                try:
                    conn.recv(_RECV_SIZE)
                except OSError:
                    pass
            if self._data_closed.is_set():
                break
            self._on_packet(source_ip)
        listener.close()

    def _control_loop(self) -> None:
        listener = self._control
        while not self._closing.is_set():
            try:
                conn, _ = listener.accept()
            except socket.timeout:
                continue
            except OSError:
                break
            with conn:
                conn.settimeout(1.0)
                try:
                    with conn.makefile("r", encoding="utf-8", newline="\n") as reader:
                        for line in reader:
                            if not line.strip():
                                continue
                            conn.sendall((self.handle_command(line) + "\n").encode("utf-8"))
                except OSError:
                    continue
