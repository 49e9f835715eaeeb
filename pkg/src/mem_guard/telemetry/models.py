"""遥测数据模型"""

from enum import Enum
from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

MemBand = Tuple[float, float]
AuxBand = Tuple[float, Optional[float]]  # 攻击态辅助指标上界可以无界


class Architecture(str, Enum):
    GENERAL_PURPOSE = "general-purpose"
    MICROCONTROLLER = "microcontroller"


class StatusClass(str, Enum):
    """设备状态，按严重程度升序排列"""

    IDLE = "Idle"
    ACTIVE = "Active"
    UNDER_ATTACK = "UnderAttack"
    UNKNOWN = "Unknown"


class ResourceReading(BaseModel):
    """单个设备的一次归一化遥测采样"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    device_id: str = Field(..., min_length=1, description="设备标识")
    timestamp_s: float = Field(..., ge=0, allow_inf_nan=False, description="距实验开始的秒数")
    mem_frac: float = Field(..., ge=0, le=1, allow_inf_nan=False, description="内存占用比例")
    cpu_frac: Optional[float] = Field(default=None, ge=0, le=1, allow_inf_nan=False,
                                      description="CPU占用比例（通用处理器设备）")
    thread_time_s: Optional[float] = Field(default=None, ge=0, allow_inf_nan=False,
                                           description="线程时间（微控制器设备）")
    attack_flag: Optional[bool] = Field(default=None, description="攻击真值标签，仅模拟器产生")

    @model_validator(mode="after")
    def _check_aux_metric(self) -> "ResourceReading":
        if (self.cpu_frac is None) == (self.thread_time_s is None):
            raise ValueError("exactly one of cpu_frac / thread_time_s must be present")
        return self

    @property
    def architecture(self) -> Architecture:
        if self.cpu_frac is not None:
            return Architecture.GENERAL_PURPOSE
        return Architecture.MICROCONTROLLER

    @property
    def aux_value(self) -> float:
        """辅助指标：cpu_frac 或 thread_time_s"""
        return self.cpu_frac if self.cpu_frac is not None else self.thread_time_s


def _check_band(name: str, band: tuple, fraction: bool) -> None:
    low, high = band
    if low < 0:
        raise ValueError(f"{name}: lower bound must be non-negative")
    if high is not None and low > high:
        raise ValueError(f"{name}: min {low} exceeds max {high}")
    if fraction and (high is None or high > 1):
        raise ValueError(f"{name}: fraction bounds must lie in [0,1]")


class DeviceProfile(BaseModel):
    """一种设备架构在各状态下的资源区间"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = Field(default="custom", description="画像名称")
    architecture: Architecture
    idle_mem: MemBand
    active_mem: MemBand
    attack_mem: MemBand
    idle_aux: AuxBand
    active_aux: AuxBand
    attack_aux: AuxBand
    total_mem_bytes: int = Field(..., ge=0, description="内存容量，0表示采样时由数据源填充")

    @model_validator(mode="after")
    def _check_bands(self) -> "DeviceProfile":
        for field_name in ("idle_mem", "active_mem", "attack_mem"):
            _check_band(field_name, getattr(self, field_name), fraction=True)
        cpu_aux = self.architecture is Architecture.GENERAL_PURPOSE
        for field_name in ("idle_aux", "active_aux"):
            band = getattr(self, field_name)
            if band[1] is None:
                raise ValueError(f"{field_name}: only attack_aux may be unbounded")
            _check_band(field_name, band, fraction=cpu_aux)
        _check_band("attack_aux", self.attack_aux, fraction=cpu_aux and self.attack_aux[1] is not None)
        if not (self.idle_mem[1] <= self.active_mem[1] <= self.attack_mem[1]):
            raise ValueError("memory bands must escalate: idle.max <= active.max <= attack.max")
        return self

    def mem_band(self, status: StatusClass) -> MemBand:
        return {
            StatusClass.IDLE: self.idle_mem,
            StatusClass.ACTIVE: self.active_mem,
            StatusClass.UNDER_ATTACK: self.attack_mem,
        }[status]

    def aux_band(self, status: StatusClass) -> AuxBand:
        return {
            StatusClass.IDLE: self.idle_aux,
            StatusClass.ACTIVE: self.active_aux,
            StatusClass.UNDER_ATTACK: self.attack_aux,
        }[status]
