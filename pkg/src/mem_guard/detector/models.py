"""检测器数据模型：配置、状态与事件"""

from enum import Enum
from typing import Any, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..exceptions import ProtocolViolationError
from ..telemetry.models import DeviceProfile
from .thresholds import default_absolute_threshold, derive_reading_threshold


class TriggerMode(str, Enum):
    DIFFERENTIAL = "differential"
    ABSOLUTE = "absolute"
    BOTH = "both"


class MitigationAction(str, Enum):
    BLACKLIST = "Blacklist"
    STOP_READ_WRITE = "StopReadWrite"
    DISCONNECT = "Disconnect"


FULL_MITIGATION: Tuple[MitigationAction, ...] = (
    MitigationAction.BLACKLIST,
    MitigationAction.STOP_READ_WRITE,
    MitigationAction.DISCONNECT,
)


def validate_mitigation_actions(actions: Sequence[MitigationAction | str]) -> Tuple[MitigationAction, ...]:
    """缓解动作必须是 [Blacklist, StopReadWrite, Disconnect] 的前缀"""
    try:
        parsed = tuple(MitigationAction(action) for action in actions)
    except ValueError as e:
        raise ProtocolViolationError(f"Unknown mitigation action: {e}") from e
    if parsed != FULL_MITIGATION[:len(parsed)]:
        names = ", ".join(action.value for action in parsed)
        raise ProtocolViolationError(
            f"Mitigation actions [{names}] are not a prefix of Blacklist, StopReadWrite, Disconnect"
        )
    return parsed


class DetectorConfig(BaseModel):
    """检测状态机配置，阈值均为 [0,1] 内的比例"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    reading_threshold: float = Field(..., gt=0, le=1, description="预期最大突变量 (Max-Min)")
    absolute_threshold: float = Field(..., gt=0, lt=1, description="可疑内存占用水平")
    trigger_mode: TriggerMode = Field(default=TriggerMode.ABSOLUTE, description="触发判据")
    count_threshold: int = Field(default=3, ge=1, description="C1 上限（采样数）")
    time_threshold: int = Field(default=4, ge=1, description="T1 上限（采样数）")
    sample_interval_s: float = Field(default=3.0, gt=0, description="采样间隔（秒）")
    per_step_budget: bool = Field(default=True, description="both 模式下差分分支与 reading_threshold/count_threshold 比较")
    mitigation_actions: Tuple[MitigationAction, ...] = Field(default=FULL_MITIGATION, description="检测到攻击后的缓解动作")

    @field_validator("mitigation_actions", mode="before")
    @classmethod
    def _check_actions(cls, value: Any) -> Any:
        try:
            return validate_mitigation_actions(value)
        except ProtocolViolationError as e:
            raise ValueError(e.message) from e

    @property
    def differential_threshold(self) -> float:
        """差分分支实际比较的阈值"""
        if self.trigger_mode is TriggerMode.BOTH and self.per_step_budget:
            return self.reading_threshold / self.count_threshold
        return self.reading_threshold

    @classmethod
    def for_profile(cls, profile: DeviceProfile, **overrides: Any) -> "DetectorConfig":
        """由画像推导 reading_threshold 和 absolute_threshold，其余取默认值"""
        values = {
            "reading_threshold": derive_reading_threshold(profile),
            "absolute_threshold": default_absolute_threshold(profile),
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls.model_validate(values)


class Phase(str, Enum):
    MONITORING = "Monitoring"
    ATTACK_ACTIVE = "AttackActive"


class DetectorState(BaseModel):
    """单个设备的状态机快照，不可变，可序列化后在任意位置恢复"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    prev_mem: Optional[float] = Field(default=None, description="M1")
    counter_c1: int = Field(default=0, ge=0)
    timer_t1: int = Field(default=0, ge=0)
    alert: bool = False
    phase: Phase = Phase.MONITORING
    last_timestamp_s: Optional[float] = None
    samples_seen: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _alert_matches_phase(self) -> "DetectorState":
        if self.alert != (self.phase is Phase.ATTACK_ACTIVE):
            raise ValueError("alert must be on exactly when phase is AttackActive")
        return self


class EventKind(str, Enum):
    ATTACK_STARTED = "AttackStarted"
    MITIGATION_APPLIED = "MitigationApplied"
    ATTACK_STOPPED = "AttackStopped"


class DetectionEvent(BaseModel):
    """检测事件，携带触发采样的时间戳与内存比例"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: EventKind
    device_id: str
    timestamp_s: float
    mem_frac: float
    sample_index: int = Field(..., ge=0, description="触发采样在该设备流中的序号")
    actions: Tuple[MitigationAction, ...] = ()
