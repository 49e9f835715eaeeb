"""闭环模拟示例：RPi 画像，第300秒开始的一分钟 UDP 洪泛

运行：python example/closed_loop_example.py
"""

from mem_guard import DetectorConfig, DeviceSim, RASPBERRY_PI, classify_status, run_closed_loop
from mem_guard.simulator import single_burst_scenario
from mem_guard.store import compute_summary, format_summary


def main() -> None:
    device = DeviceSim(device_id="10.0.0.2", profile=RASPBERRY_PI, rng_seed=0)
    scenario = single_burst_scenario("10.0.0.2")
    config = DetectorConfig.for_profile(RASPBERRY_PI, sample_interval_s=3.0)

    result = run_closed_loop(device, scenario, config, interval_s=3.0, total_s=600.0)

    for event in result.events:
        print(f"{event.timestamp_s:7.1f}s  {event.kind.value:<18} {event.device_id}")

    statuses = [classify_status(reading, RASPBERRY_PI).value for reading in result.readings]
    print("UnderAttack samples:", statuses.count("UnderAttack"))
    print("device after run:", result.device.link_state.value, "rw_enabled =", result.device.rw_enabled)
    print(format_summary(compute_summary(result.readings, result.events, config)))


if __name__ == "__main__":
    main()
