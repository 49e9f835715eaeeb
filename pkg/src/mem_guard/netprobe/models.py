"""网络探测数据模型"""

from enum import Enum
from ipaddress import IPv4Address
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class HostStatus(str, Enum):
    ONLINE = "Online"
    OFFLINE = "Offline"


class TransportProtocol(str, Enum):
    TCP = "TCP"
    UDP = "UDP"


class DeviceRecord(BaseModel):
    """注册表中的一台设备，以 ip 为键"""

    model_config = ConfigDict(extra="forbid")

    ip: IPv4Address
    mac: Optional[str] = Field(default=None, description="硬件地址")
    status: HostStatus = HostStatus.OFFLINE
    open_ports: List[int] = Field(default_factory=list)
    blacklisted: bool = False
    last_seen_s: float = Field(default=0.0, ge=0, description="最近一次在线的时间（epoch 秒）")

    @field_validator("open_ports")
    @classmethod
    def _check_ports(cls, ports: List[int]) -> List[int]:
        for port in ports:
            if not 0 < port < 65536:
                raise ValueError(f"port {port} is outside [1, 65535]")
        return sorted(set(ports))

    @property
    def device_id(self) -> str:
        return str(self.ip)


class FloodStats(BaseModel):
    """洪泛计数器

    攻击端：packets_sent 为实际发出的包数。
    受害端：packets_sent 为到达套接字的包数（含被丢弃的），packets_received 为被接收处理的包数。
    """

    model_config = ConfigDict(extra="forbid")

    packets_sent: int = Field(default=0, ge=0)
    packets_received: int = Field(default=0, ge=0)
    bytes_buffered: int = Field(default=0, ge=0)
    duration_s: float = Field(default=0.0, ge=0)

    @model_validator(mode="after")
    def _received_within_sent(self) -> "FloodStats":
        if self.packets_received > self.packets_sent:
            raise ValueError("packets_received cannot exceed packets_sent")
        return self
