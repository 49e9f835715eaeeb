import json

import pytest
from pydantic import ValidationError

from mem_guard.detector import FULL_MITIGATION, DetectorConfig, EventKind, detector_run
from mem_guard.exceptions import InvalidInputError, InvalidScenarioError, ProtocolViolationError
from mem_guard.simulator import (
    AttackScenario,
    Burst,
    DeviceSim,
    FloodProtocol,
    LinkState,
    StatusWindow,
    apply_mitigation,
    load_scenario,
    run_closed_loop,
    simulate_trace,
    single_burst_scenario,
    two_period_scenario,
)
from mem_guard.telemetry import ARDUINO, RASPBERRY_PI, StatusClass

DEVICE_ID = "10.0.0.2"


def _device(profile=RASPBERRY_PI, seed: int = 0, **extra) -> DeviceSim:
    return DeviceSim(device_id=DEVICE_ID, profile=profile, rng_seed=seed, **extra)


def _quiet(device_id: str = DEVICE_ID) -> AttackScenario:
    return AttackScenario(target_device_id=device_id)


def _kinds(events):
    return [event.kind for event in events]


def _index_of(events, kind: EventKind) -> int:
    return next(event.sample_index for event in events if event.kind is kind)


def test_trace_length_and_timestamps():
    """600秒、5秒间隔 -> 120个采样，全部落在空闲/活动区间"""
    readings = simulate_trace(_device(), _quiet(), 5.0, 600.0)
    assert len(readings) == 120
    assert [r.timestamp_s for r in readings[:3]] == [0.0, 5.0, 10.0]
    assert readings[-1].timestamp_s == 595.0
    assert all(0.10 <= r.mem_frac <= 0.35 for r in readings)
    assert all(r.attack_flag is False for r in readings)


def test_single_sample_trace():
    readings = simulate_trace(_device(), single_burst_scenario(DEVICE_ID), 3.0, 3.0)
    assert len(readings) == 1
    assert readings[0].attack_flag is False


def test_baseline_follows_schedule():
    """无攻击时按调度状态的区间抽样，辅助指标同样跟随"""
    device = _device(seed=5)
    for reading in simulate_trace(device, _quiet(), 3.0, 600.0):
        status = device.status_at(reading.timestamp_s)
        low, high = RASPBERRY_PI.mem_band(status)
        aux_low, aux_high = RASPBERRY_PI.aux_band(status)
        assert low <= reading.mem_frac <= high
        assert aux_low <= reading.cpu_frac <= aux_high


def test_default_schedule_alternates_per_minute():
    device = _device()
    assert device.status_at(0) is StatusClass.IDLE
    assert device.status_at(59.9) is StatusClass.IDLE
    assert device.status_at(60) is StatusClass.ACTIVE
    assert device.status_at(150) is StatusClass.IDLE

    scheduled = _device(schedule=(StatusWindow(start_s=0, end_s=100, status="Active"),))
    assert scheduled.status_at(50) is StatusClass.ACTIVE
    assert scheduled.status_at(100) is StatusClass.IDLE


def test_schedule_windows_are_idle_or_active():
    with pytest.raises(ValidationError):
        StatusWindow(start_s=0, end_s=10, status="UnderAttack")
    with pytest.raises(ValidationError):
        StatusWindow(start_s=10, end_s=10, status="Idle")


def test_burst_reaches_attack_band():
    """突发期间：爬升结束后内存在 [0.36, 0.66]，CPU 在 [0.015, 0.165]"""
    readings = simulate_trace(_device(), single_burst_scenario(DEVICE_ID), 3.0, 600.0)
    inside = [r for r in readings if 300 <= r.timestamp_s < 360]
    assert [r.attack_flag for r in readings] == [300 <= r.timestamp_s < 360 for r in readings]
    assert len(inside) == 20
    assert all(0.36 <= r.mem_frac <= 0.66 for r in inside[1:])
    assert all(0.015 <= r.cpu_frac <= 0.165 for r in inside)
    # 爬升第一步在攻击前水平与攻击目标之间
    assert readings[99].mem_frac <= inside[0].mem_frac <= inside[1].mem_frac


def test_unbounded_aux_band_on_microcontroller():
    """Arduino 攻击态线程时间无上界，按活动区间宽度抽样"""
    readings = simulate_trace(_device(ARDUINO), single_burst_scenario(DEVICE_ID), 3.0, 600.0)
    inside = [r for r in readings if r.attack_flag]
    assert all(r.cpu_frac is None for r in readings)
    assert all(45.0 <= r.thread_time_s <= 69.0 for r in inside)
    assert all(0.17 <= r.mem_frac <= 0.45 for r in inside[1:])


def test_identical_seeds_give_identical_traces():
    scenario = single_burst_scenario(DEVICE_ID)
    first = simulate_trace(_device(seed=42), scenario, 3.0, 600.0)
    second = simulate_trace(_device(seed=42), scenario, 3.0, 600.0)
    other = simulate_trace(_device(seed=43), scenario, 3.0, 600.0)
    assert first == second
    assert [r.model_dump_json() for r in first] == [r.model_dump_json() for r in second]
    assert first != other


def test_trace_rejects_bad_arguments():
    with pytest.raises(InvalidScenarioError):
        simulate_trace(_device(), single_burst_scenario("10.0.0.9"), 3.0, 600.0)
    with pytest.raises(InvalidInputError):
        simulate_trace(_device(), _quiet(), 3.0, 0.0)
    with pytest.raises(InvalidInputError):
        simulate_trace(_device(), _quiet(), 0.0, 600.0)


def test_bursts_must_not_overlap():
    with pytest.raises(ValidationError):
        AttackScenario(target_device_id=DEVICE_ID, bursts=(Burst(start_s=100, duration_s=60),
                                                           Burst(start_s=150, duration_s=60)))
    scenario = two_period_scenario(DEVICE_ID)
    assert [b.start_s for b in scenario.bursts] == [600, 720, 840, 960, 1080]
    assert scenario.bursts[0].protocol is FloodProtocol.TCP_FLOOD
    assert scenario.bursts[1].protocol is FloodProtocol.UDP_FLOOD
    assert scenario.burst_at(725) == 1
    assert scenario.burst_at(700) is None


def test_load_scenario_document(tmp_path):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps({
        "profile": "arduino",
        "seed": 9,
        "target_device_id": "10.0.0.5",
        "bursts": [{"start_s": 60, "duration_s": 30, "protocol": "TCP-flood"}],
    }), encoding="utf-8")
    document = load_scenario(path)
    scenario = document.to_scenario()
    device = document.to_device(ARDUINO)
    assert scenario.bursts[0].rate_pps == 1000
    assert device.device_id == "10.0.0.5"
    assert device.rng_seed == 9

    path.write_text(json.dumps({"bursts": [{"start_s": 0, "duration_s": 60},
                                           {"start_s": 30, "duration_s": 60}]}), encoding="utf-8")
    with pytest.raises(InvalidScenarioError):
        load_scenario(path)
    path.write_text(json.dumps({"burst": []}), encoding="utf-8")
    with pytest.raises(InvalidScenarioError):
        load_scenario(path)


def test_apply_mitigation():
    device = _device()
    mitigated = apply_mitigation(device, FULL_MITIGATION, 312.0)
    assert mitigated.link_state is LinkState.DISCONNECTED
    assert mitigated.rw_enabled is False
    assert mitigated.blacklisted is True
    assert mitigated.mitigated_at_s == 312.0
    assert device.link_state is LinkState.CONNECTED

    assert apply_mitigation(device, [], 312.0) is device
    partial = apply_mitigation(device, ["Blacklist"], 312.0)
    assert partial.link_state is LinkState.CONNECTED and partial.rw_enabled

    with pytest.raises(ProtocolViolationError):
        apply_mitigation(device, ["StopReadWrite", "Blacklist"], 312.0)
    with pytest.raises(ProtocolViolationError):
        apply_mitigation(device, ["Disconnect"], 312.0)


def test_closed_loop_single_burst_raspberry_pi():
    """300秒开始的1分钟攻击：告警、缓解、回落后宣告停止"""
    config = DetectorConfig.for_profile(RASPBERRY_PI)
    readings, events, device = run_closed_loop(_device(), single_burst_scenario(DEVICE_ID), config, 3.0, 600.0)

    assert len(readings) == 200
    assert _kinds(events) == [EventKind.ATTACK_STARTED, EventKind.MITIGATION_APPLIED, EventKind.ATTACK_STOPPED]
    started, mitigation, stopped = events
    assert started.mem_frac > 0.37
    assert 300 <= started.timestamp_s < 360
    assert mitigation.actions == FULL_MITIGATION
    assert device.link_state is LinkState.DISCONNECTED

    first_hot = next(r for r in readings if r.mem_frac > config.absolute_threshold)
    assert started.timestamp_s - first_hot.timestamp_s <= (config.count_threshold + 2) * 3.0

    # 停止前的 time_threshold+1 个采样都已回落到活动区间以下
    quiet = readings[stopped.sample_index - config.time_threshold:stopped.sample_index + 1]
    assert all(r.mem_frac <= config.absolute_threshold for r in quiet)


def test_closed_loop_decay_after_disconnect():
    """断开后4个采样内回落到0.36以下，突发剩余采样仍带攻击标签"""
    config = DetectorConfig.for_profile(RASPBERRY_PI)
    readings, events, _ = run_closed_loop(_device(seed=3), single_burst_scenario(DEVICE_ID), config, 3.0, 600.0)
    i = _index_of(events, EventKind.MITIGATION_APPLIED)

    assert readings[i + 4].mem_frac < 0.36
    assert all(r.attack_flag for r in readings[i + 1:] if r.timestamp_s < 360)
    for previous, current in zip(readings[i:], readings[i + 1:]):
        assert current.mem_frac <= max(previous.mem_frac, RASPBERRY_PI.active_mem[1])


def test_closed_loop_arduino():
    config = DetectorConfig.for_profile(ARDUINO)
    readings, events, _ = run_closed_loop(_device(ARDUINO, seed=1), single_burst_scenario(DEVICE_ID),
                                          config, 3.0, 600.0)
    assert _kinds(events) == [EventKind.ATTACK_STARTED, EventKind.MITIGATION_APPLIED, EventKind.ATTACK_STOPPED]
    assert events[0].mem_frac > 0.16
    stop = events[2].sample_index
    assert all(r.mem_frac < 0.20 for r in readings[stop - config.time_threshold:stop + 1])


def test_closed_loop_without_attack():
    config = DetectorConfig.for_profile(RASPBERRY_PI)
    readings, events, device = run_closed_loop(_device(), _quiet(), config, 3.0, 600.0)
    assert events == []
    assert device.link_state is LinkState.CONNECTED
    assert device.mitigated_at_s is None


def test_closed_loop_two_periods_without_disconnect():
    """不断开链路时，每次突发都是一个完整的告警-停止周期"""
    config = DetectorConfig.for_profile(RASPBERRY_PI, mitigation_actions=["Blacklist", "StopReadWrite"])
    readings, events, device = run_closed_loop(_device(seed=2), two_period_scenario(DEVICE_ID), config, 3.0, 1200.0)

    assert len(readings) == 400
    cycle = [EventKind.ATTACK_STARTED, EventKind.MITIGATION_APPLIED, EventKind.ATTACK_STOPPED]
    assert _kinds(events) == cycle * 5
    assert all(event.timestamp_s >= 600 for event in events)
    assert device.link_state is LinkState.CONNECTED
    assert device.rw_enabled is False


def test_closed_loop_with_no_op_mitigation_matches_open_loop():
    """缓解动作为空时，闭环结果等于先生成轨迹再批量检测"""
    config = DetectorConfig.for_profile(RASPBERRY_PI, mitigation_actions=[])
    scenario = single_burst_scenario(DEVICE_ID)
    readings, events, _ = run_closed_loop(_device(seed=4), scenario, config, 3.0, 600.0)
    trace = simulate_trace(_device(seed=4), scenario, 3.0, 600.0)
    assert readings == trace
    assert events == detector_run(trace, config)


def test_closed_loop_is_deterministic():
    config = DetectorConfig.for_profile(RASPBERRY_PI)
    scenario = single_burst_scenario(DEVICE_ID)
    first = run_closed_loop(_device(seed=8), scenario, config, 3.0, 600.0)
    second = run_closed_loop(_device(seed=8), scenario, config, 3.0, 600.0)
    assert first.readings == second.readings
    assert first.events == second.events


@pytest.mark.parametrize("profile", [RASPBERRY_PI, ARDUINO], ids=lambda p: p.name)
def test_no_false_positives_on_baseline_traces(profile):
    """500 条只含空闲/活动负载的轨迹不产生任何事件"""
    config = DetectorConfig.for_profile(profile)
    for seed in range(500):
        device = DeviceSim(device_id=DEVICE_ID, profile=profile, rng_seed=seed)
        readings = simulate_trace(device, _quiet(), 3.0, 300.0)
        assert detector_run(readings, config) == [], f"seed {seed}"
