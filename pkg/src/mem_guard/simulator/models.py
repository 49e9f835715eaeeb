"""模拟器数据模型：攻击场景与被模拟设备"""

import json
from enum import Enum
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..exceptions import InvalidScenarioError
from ..telemetry.models import DeviceProfile, StatusClass

SCHEDULE_PERIOD_S = 60.0


class FloodProtocol(str, Enum):
    TCP_FLOOD = "TCP-flood"
    UDP_FLOOD = "UDP-flood"


class Burst(BaseModel):
    """一次洪泛突发，窗口为 [start_s, start_s + duration_s)"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    start_s: float = Field(..., ge=0)
    duration_s: float = Field(..., gt=0)
    protocol: FloodProtocol = FloodProtocol.UDP_FLOOD
    rate_pps: float = Field(default=1000, gt=0)

    @property
    def end_s(self) -> float:
        return self.start_s + self.duration_s

    def covers(self, t: float) -> bool:
        return self.start_s <= t < self.end_s


def _check_burst_order(bursts: Sequence[Burst]) -> None:
    for previous, current in zip(bursts, bursts[1:]):
        if current.start_s < previous.end_s:
            raise ValueError(
                f"bursts must be sorted and non-overlapping: {current.start_s}s starts before {previous.end_s}s"
            )


class AttackScenario(BaseModel):
    """攻击者 -> 目标设备内存 的突发时间表"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    attacker_id: str = "attacker"
    target_device_id: str
    bursts: Tuple[Burst, ...] = ()

    @model_validator(mode="after")
    def _check_bursts(self) -> "AttackScenario":
        _check_burst_order(self.bursts)
        return self

    def burst_at(self, t: float) -> Optional[int]:
        """覆盖时刻 t 的突发序号"""
        for index, burst in enumerate(self.bursts):
            if burst.covers(t):
                return index
            if burst.start_s > t:
                break
        return None


class LinkState(str, Enum):
    CONNECTED = "Connected"
    DISCONNECTED = "Disconnected"


class StatusWindow(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    start_s: float = Field(..., ge=0)
    end_s: float = Field(..., gt=0)
    status: StatusClass

    @model_validator(mode="after")
    def _check_window(self) -> "StatusWindow":
        if self.status not in (StatusClass.IDLE, StatusClass.ACTIVE):
            raise ValueError("schedule windows must be Idle or Active")
        if self.end_s <= self.start_s:
            raise ValueError(f"window ends at {self.end_s}s before it starts at {self.start_s}s")
        return self


class DeviceSim(BaseModel):
    """被模拟的设备

    schedule 为空时按分钟交替空闲/活动；落在所有窗口之外的时刻视为空闲。
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    device_id: str
    profile: DeviceProfile
    schedule: Tuple[StatusWindow, ...] = ()
    link_state: LinkState = LinkState.CONNECTED
    rw_enabled: bool = True
    blacklisted: bool = False
    rng_seed: int = Field(default=0, ge=0, lt=2 ** 64)
    ramp_samples: int = Field(default=2, ge=1)
    decay_samples: int = Field(default=4, ge=1)
    mitigated_at_s: Optional[float] = None

    def status_at(self, t: float) -> StatusClass:
        if not self.schedule:
            return StatusClass.IDLE if int(t // SCHEDULE_PERIOD_S) % 2 == 0 else StatusClass.ACTIVE
        for window in self.schedule:
            if window.start_s <= t < window.end_s:
                return window.status
        return StatusClass.IDLE


class ScenarioDocument(BaseModel):
    """场景JSON文档：突发数组、随机种子与画像名称"""

    model_config = ConfigDict(extra="forbid")

    profile: str = "raspberry-pi"
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    device_id: Optional[str] = None
    attacker_id: str = "attacker"
    target_device_id: str = "device-1"
    bursts: List[Burst] = Field(default_factory=list)
    schedule: List[StatusWindow] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_bursts(self) -> "ScenarioDocument":
        _check_burst_order(self.bursts)
        return self

    def to_scenario(self) -> AttackScenario:
        return AttackScenario(attacker_id=self.attacker_id, target_device_id=self.target_device_id,
                              bursts=tuple(self.bursts))

    def to_device(self, profile: DeviceProfile) -> DeviceSim:
        return DeviceSim(device_id=self.device_id or self.target_device_id, profile=profile,
                         schedule=tuple(self.schedule), rng_seed=self.seed)


def load_scenario(path: str | Path) -> ScenarioDocument:
    path = Path(path)
    try:
        return ScenarioDocument.model_validate(json.loads(path.read_text(encoding="utf-8")))
    except OSError as e:
        raise InvalidScenarioError(f"Cannot read scenario {path}: {e}") from e
    except (json.JSONDecodeError, ValidationError) as e:
        raise InvalidScenarioError(f"Invalid scenario document {path}: {e}") from e


def single_burst_scenario(target_device_id: str = "device-1") -> AttackScenario:
    """10分钟实验中第300秒开始的1分钟UDP洪泛"""
    return AttackScenario(target_device_id=target_device_id,
                          bursts=(Burst(start_s=300, duration_s=60, protocol=FloodProtocol.UDP_FLOOD),))


def two_period_scenario(target_device_id: str = "device-1") -> AttackScenario:
    """前10分钟无攻击；后10分钟每隔一分钟交替发送1分钟的TCP/UDP洪泛"""
    protocols = (FloodProtocol.TCP_FLOOD, FloodProtocol.UDP_FLOOD)
    bursts = tuple(
        Burst(start_s=600 + minute * 120, duration_s=60, protocol=protocols[minute % 2])
        for minute in range(5)
    )
    return AttackScenario(target_device_id=target_device_id, bursts=bursts)
