"""模拟器：确定性设备轨迹、攻击时间表与缓解效果"""

from .models import (
    AttackScenario,
    Burst,
    DeviceSim,
    FloodProtocol,
    LinkState,
    ScenarioDocument,
    StatusWindow,
    load_scenario,
    single_burst_scenario,
    two_period_scenario,
)
from .trace import TraceGenerator, apply_mitigation, simulate_trace
from .closed_loop import ClosedLoopResult, run_closed_loop

__all__ = [
    "AttackScenario",
    "Burst",
    "DeviceSim",
    "FloodProtocol",
    "LinkState",
    "ScenarioDocument",
    "StatusWindow",
    "load_scenario",
    "single_burst_scenario",
    "two_period_scenario",
    "TraceGenerator",
    "apply_mitigation",
    "simulate_trace",
    "ClosedLoopResult",
    "run_closed_loop",
]
