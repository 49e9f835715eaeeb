"""确定性遥测轨迹生成

每个采样固定消耗三个均匀随机数（基线、攻击、辅助指标），
因此同一种子下无论是否施加缓解，随机数序列都保持对齐。
"""

from typing import Iterator, List, Optional, Sequence

import numpy as np

from ..detector.models import MitigationAction, validate_mitigation_actions
from ..exceptions import InvalidInputError, InvalidScenarioError
from ..mg_logger import create_logger_wrapper, get_logger
from ..telemetry.models import Architecture, MemBand, ResourceReading, StatusClass
from ..telemetry.normalize import quantize_reading
from ..telemetry.sampler import sample_count
from .models import AttackScenario, DeviceSim, LinkState

logger = get_logger("multi", "simulator")
simulator_wrapper = create_logger_wrapper(logger)

# 时间戳保留毫秒
MIN_INTERVAL_S = 0.001


def _draw(band: MemBand, u: float) -> float:
    low, high = band
    return low + u * (high - low)


def apply_mitigation(device: DeviceSim,
                     actions: Sequence[MitigationAction | str],
                     at_s: float) -> DeviceSim:
    """对被模拟设备施加缓解动作，返回新的设备状态

    动作列表为空时设备不变；否则记录 mitigated_at_s，之后的采样从当前水平线性回落到活动区间。
    """
    actions = validate_mitigation_actions(actions)
    if not actions:
        return device
    update = {"mitigated_at_s": at_s}
    if MitigationAction.BLACKLIST in actions:
        update["blacklisted"] = True
    if MitigationAction.STOP_READ_WRITE in actions:
        update["rw_enabled"] = False
    if MitigationAction.DISCONNECT in actions:
        update["link_state"] = LinkState.DISCONNECTED
    logger.info_mitigation("mitigation on %s at %.3fs: %s", device.device_id, at_s,
                           ", ".join(action.value for action in actions))
    return device.model_copy(update=update)


class TraceGenerator:
    """逐个采样推进的轨迹生成器，simulate_trace 与 run_closed_loop 共用"""

    def __init__(self, device: DeviceSim, scenario: AttackScenario, interval_s: float, total_s: float):
        if interval_s < MIN_INTERVAL_S:
            raise InvalidInputError(f"interval_s must be at least {MIN_INTERVAL_S}s, got {interval_s}")
        if total_s < interval_s:
            raise InvalidInputError(f"total_s ({total_s}) must be at least interval_s ({interval_s})")
        if scenario.target_device_id != device.device_id:
            raise InvalidScenarioError(
                f"Scenario targets {scenario.target_device_id!r} but the simulated device is {device.device_id!r}"
            )
        self.device = device
        self.scenario = scenario
        self.interval_s = interval_s
        self.count = sample_count(total_s, interval_s)
        self.index = 0
        self._rng = np.random.default_rng(device.rng_seed)
        self._last_mem: Optional[float] = None

        # 攻击爬升
        self._ramp_burst: Optional[int] = None
        self._ramp_step = 0
        self._ramp_origin = 0.0
        self._ramp_target = 0.0

        # 缓解后的回落
        self._decay_for: Optional[float] = None
        self._decay_step = 0
        self._decay_origin: Optional[float] = None
        self._decay_target = 0.0

    def __iter__(self) -> Iterator[ResourceReading]:
        return self

    def __next__(self) -> ResourceReading:
        if self.index >= self.count:
            raise StopIteration
        return self.step()

    @property
    def remaining(self) -> int:
        return self.count - self.index

    def apply_mitigation(self, actions: Sequence[MitigationAction | str], at_s: float) -> DeviceSim:
        self.device = apply_mitigation(self.device, actions, at_s)
        return self.device

    def _aux_band(self, status: StatusClass) -> MemBand:
        low, high = self.device.profile.aux_band(status)
        if high is None:
            active_low, active_high = self.device.profile.active_aux
            high = low + (active_high - active_low)
        return low, high

    def _baseline_status(self, t: float) -> StatusClass:
        status = self.device.status_at(t)
        if status is StatusClass.ACTIVE and not self.device.rw_enabled:
            return StatusClass.IDLE
        return status

    def _attack_sample(self, burst: int, u_base: float, u_attack: float, t: float) -> float:
        profile = self.device.profile
        if self._ramp_burst != burst:
            self._ramp_burst = burst
            self._ramp_step = 0
            if self._last_mem is None:
                self._ramp_origin = _draw(profile.mem_band(self._baseline_status(t)), u_base)
            else:
                self._ramp_origin = self._last_mem
            self._ramp_target = _draw(profile.attack_mem, u_attack)
        self._ramp_step += 1
        ramp = self.device.ramp_samples
        if self._ramp_step < ramp:
            return self._ramp_origin + (self._ramp_target - self._ramp_origin) * self._ramp_step / ramp
        if self._ramp_step == ramp:
            return self._ramp_target
        return _draw(profile.attack_mem, u_attack)

    def _decay_pending(self, t: float) -> bool:
        mitigated_at = self.device.mitigated_at_s
        if mitigated_at is None or t <= mitigated_at:
            return False
        if self._decay_for != mitigated_at:
            self._decay_for = mitigated_at
            self._decay_step = 0
            self._decay_origin = None
        return self._decay_step < self.device.decay_samples

    def _decay_sample(self, u_base: float) -> float:
        if self._decay_origin is None:
            profile = self.device.profile
            active = profile.active_mem
            self._decay_origin = self._last_mem if self._last_mem is not None else active[1]
            self._decay_target = _draw(active, u_base)
        self._decay_step += 1
        return self._decay_origin + (self._decay_target - self._decay_origin) * self._decay_step / self.device.decay_samples

    def step(self) -> ResourceReading:
        """生成下一个采样"""
        if self.index >= self.count:
            raise InvalidInputError(f"trace of {self.count} samples is exhausted")
        u_base, u_attack, u_aux = self._rng.random(3)
        t = self.index * self.interval_s
        burst = self.scenario.burst_at(t)
        reaches = burst is not None and self.device.link_state is LinkState.CONNECTED

        if reaches:
            mem = self._attack_sample(burst, u_base, u_attack, t)
            aux_status = StatusClass.UNDER_ATTACK
        elif self._decay_pending(t):
            mem = self._decay_sample(u_base)
            aux_status = StatusClass.ACTIVE
        else:
            aux_status = self._baseline_status(t)
            mem = _draw(self.device.profile.mem_band(aux_status), u_base)
        aux = _draw(self._aux_band(aux_status), u_aux)

        mem = min(max(float(mem), 0.0), 1.0)
        fields = {"cpu_frac": float(aux)} \
            if self.device.profile.architecture is Architecture.GENERAL_PURPOSE \
            else {"thread_time_s": float(aux)}
        reading = quantize_reading(ResourceReading(
            device_id=self.device.device_id,
            timestamp_s=t,
            mem_frac=mem,
            attack_flag=burst is not None,
            **fields,
        ))
        self._last_mem = reading.mem_frac
        self.index += 1
        return reading


@simulator_wrapper(level="INFO_SIMULATOR", model="simple")
def simulate_trace(device: DeviceSim,
                   scenario: AttackScenario,
                   interval_s: float,
                   total_s: float) -> List[ResourceReading]:
    """生成 floor(total_s / interval_s) 个采样的完整轨迹"""
    return list(TraceGenerator(device, scenario, interval_s, total_s))
