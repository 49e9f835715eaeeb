import json
import time

import pytest

from mem_guard.detector import DetectorConfig, EventKind, detector_run
from mem_guard.exceptions import (
    CorruptionError,
    InvalidInputError,
    NotFoundError,
    OrderingError,
    VersionError,
)
from mem_guard.simulator import DeviceSim, run_closed_loop, single_burst_scenario
from mem_guard.store import (
    BlacklistStore,
    ExperimentDir,
    ExperimentRecord,
    ReadingLog,
    append_events,
    append_reading,
    blacklist_ops,
    compute_summary,
    create_experiment_dir,
    create_name_with_time,
    event_line,
    format_summary,
    load_events,
    load_experiment,
    load_readings,
    read_header,
    read_json,
    save_events,
    save_experiment,
    verify_experiment,
    write_json_atomic,
)
from mem_guard.telemetry import RASPBERRY_PI, ResourceReading

CONFIG = DetectorConfig.for_profile(RASPBERRY_PI)


def _reading(t: float, mem: float = 0.2, device_id: str = "10.0.0.2", **extra) -> ResourceReading:
    return ResourceReading(device_id=device_id, timestamp_s=t, mem_frac=mem, cpu_frac=0.01, **extra)


def _stream(mems, device_id="10.0.0.2", flags=None):
    flags = flags or [None] * len(mems)
    return [_reading(k * 3.0, m, device_id, attack_flag=f) for k, (m, f) in enumerate(zip(mems, flags))]


@pytest.fixture
def simulated():
    device = DeviceSim(device_id="10.0.0.2", profile=RASPBERRY_PI, rng_seed=0)
    return run_closed_loop(device, single_burst_scenario("10.0.0.2"), CONFIG, 3.0, 600.0)


def _save_experiment(root, result) -> ExperimentDir:
    directory = create_experiment_dir(root, "run")
    with ReadingLog.create(directory.readings, RASPBERRY_PI.name) as log:
        log.extend(result.readings)
    save_events(directory.events, result.events)
    save_experiment(directory, ExperimentRecord(
        profile=RASPBERRY_PI, config=CONFIG, scenario=single_burst_scenario("10.0.0.2"), seed=0,
        interval_s=3.0, total_s=600.0, events=result.events,
        summary=compute_summary(result.readings, result.events, CONFIG),
    ))
    return directory


def test_reading_log_round_trip(tmp_path):
    path = tmp_path / "readings.jsonl"
    readings = [_reading(0.0), _reading(3.0, 0.25, attack_flag=False), _reading(6.0, 0.5, attack_flag=True)]
    with ReadingLog.create(path, "raspberry-pi") as log:
        append_reading(log, readings[0])
        log.extend(readings[1:])
        assert log.count == 3

    assert read_header(path).profile == "raspberry-pi"
    assert load_readings(path) == readings
    lines = path.read_text(encoding="utf-8").splitlines()
    assert json.loads(lines[0]) == {"schema_version": 1, "profile": "raspberry-pi"}
    assert "thread_time_s" not in lines[1]


def test_empty_log(tmp_path):
    path = tmp_path / "readings.jsonl"
    ReadingLog.create(path, "arduino").close()
    assert load_readings(path) == []


def test_append_rejects_earlier_timestamp(tmp_path):
    """同一设备时间戳不能倒退，不同设备互不影响"""
    path = tmp_path / "readings.jsonl"
    with ReadingLog.create(path, "raspberry-pi") as log:
        log.append(_reading(6.0))
        log.append(_reading(3.0, device_id="10.0.0.3"))
        with pytest.raises(OrderingError):
            log.append(_reading(3.0))
    assert len(load_readings(path)) == 2


def test_reopen_continues_ordering(tmp_path):
    path = tmp_path / "readings.jsonl"
    with ReadingLog.create(path, "raspberry-pi") as log:
        log.extend([_reading(0.0), _reading(3.0)])
    with ReadingLog.open(path) as log:
        with pytest.raises(OrderingError):
            log.append(_reading(1.0))
        log.append(_reading(6.0))
    assert [r.timestamp_s for r in load_readings(path)] == [0.0, 3.0, 6.0]


def test_truncated_tail_is_skipped(tmp_path):
    """崩溃留下的残缺尾行被跳过，重新打开追加时被截掉"""
    path = tmp_path / "readings.jsonl"
    with ReadingLog.create(path, "raspberry-pi") as log:
        log.extend([_reading(0.0), _reading(3.0)])
    with open(path, "a", encoding="utf-8") as f:
        f.write('{"device_id": "10.0.0.2", "timestamp_s": 6.0, "mem_')
    assert len(load_readings(path)) == 2

    with ReadingLog.open(path) as log:
        log.append(_reading(6.0))
    assert [r.timestamp_s for r in load_readings(path)] == [0.0, 3.0, 6.0]


def test_corrupt_line_reports_line_number(tmp_path):
    path = tmp_path / "readings.jsonl"
    with ReadingLog.create(path, "raspberry-pi") as log:
        log.extend([_reading(0.0), _reading(3.0)])
    lines = path.read_text(encoding="utf-8").splitlines()
    lines.insert(2, "garbage")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    with pytest.raises(CorruptionError) as exc_info:
        load_readings(path)
    assert exc_info.value.line_no == 3
    assert exc_info.value.exit_code == 3


def test_torn_multibyte_tail_is_skipped(tmp_path):
    """尾行在多字节字符中间被截断时按残缺尾行处理"""
    path = tmp_path / "readings.jsonl"
    with ReadingLog.create(path, "raspberry-pi") as log:
        log.extend([_reading(0.0), _reading(3.0)])
    torn = '{"device_id": "传感器'.encode("utf-8")[:-1]
    with open(path, "ab") as f:
        f.write(torn)
    assert [r.timestamp_s for r in load_readings(path)] == [0.0, 3.0]

    with ReadingLog.open(path) as log:
        log.append(_reading(6.0))
    assert [r.timestamp_s for r in load_readings(path)] == [0.0, 3.0, 6.0]


def test_invalid_utf8_mid_file_reports_line_number(tmp_path):
    path = tmp_path / "readings.jsonl"
    with ReadingLog.create(path, "raspberry-pi") as log:
        log.extend([_reading(0.0), _reading(3.0)])
    data = path.read_bytes().split(b"\n")
    data.insert(2, b"\xff\xfe")
    path.write_bytes(b"\n".join(data))

    with pytest.raises(CorruptionError) as exc_info:
        load_readings(path)
    assert exc_info.value.line_no == 3
    assert exc_info.value.exit_code == 3


def test_invalid_utf8_header(tmp_path):
    path = tmp_path / "readings.jsonl"
    path.write_bytes(b'{"schema_version": 1, "profile": "\xff"}\n')
    with pytest.raises(CorruptionError) as exc_info:
        read_header(path)
    assert exc_info.value.line_no == 1
    with pytest.raises(CorruptionError):
        load_readings(path)


def test_reopen_keeps_complete_unterminated_record(tmp_path):
    """最后一条记录完整但缺少换行时，重新打开只补换行不丢记录"""
    path = tmp_path / "readings.jsonl"
    with ReadingLog.create(path, "raspberry-pi") as log:
        log.extend([_reading(0.0), _reading(3.0)])
    path.write_bytes(path.read_bytes().rstrip(b"\n"))
    assert len(load_readings(path)) == 2

    with ReadingLog.open(path) as log:
        with pytest.raises(OrderingError):
            log.append(_reading(1.0))
        log.append(_reading(6.0))
    assert [r.timestamp_s for r in load_readings(path)] == [0.0, 3.0, 6.0]


def test_reopen_header_without_newline(tmp_path):
    path = tmp_path / "readings.jsonl"
    path.write_text(json.dumps({"schema_version": 1, "profile": "raspberry-pi"}), encoding="utf-8")
    with ReadingLog.open(path) as log:
        log.append(_reading(0.0))
    assert read_header(path).profile == "raspberry-pi"
    assert len(load_readings(path)) == 1


def test_load_12000_readings_under_one_second(tmp_path):
    """十分钟 0.05 秒间隔的日志加载不超过 1 秒"""
    path = tmp_path / "readings.jsonl"
    with ReadingLog.create(path, "raspberry-pi", durable=False) as log:
        log.extend(_reading(k * 0.05) for k in range(12000))
    started = time.perf_counter()
    readings = load_readings(path)
    elapsed = time.perf_counter() - started
    assert len(readings) == 12000
    assert elapsed < 1.0


def test_header_errors(tmp_path):
    path = tmp_path / "readings.jsonl"
    with pytest.raises(NotFoundError):
        load_readings(path)
    path.write_text(json.dumps({"schema_version": 2, "profile": "raspberry-pi"}) + "\n", encoding="utf-8")
    with pytest.raises(VersionError):
        load_readings(path)
    with pytest.raises(VersionError):
        ReadingLog.open(path)
    path.write_text("", encoding="utf-8")
    with pytest.raises(CorruptionError):
        read_header(path)


def test_load_readings_filters(tmp_path):
    path = tmp_path / "readings.jsonl"
    with ReadingLog.create(path, "raspberry-pi") as log:
        for k in range(10):
            log.append(_reading(k * 3.0, device_id="10.0.0.2"))
            log.append(_reading(k * 3.0 + 1, device_id="10.0.0.3"))
    only_b = load_readings(path, device_id="10.0.0.3")
    assert len(only_b) == 10
    assert {r.device_id for r in only_b} == {"10.0.0.3"}
    window = load_readings(path, device_id="10.0.0.2", start_s=6.0, end_s=12.0)
    assert [r.timestamp_s for r in window] == [6.0, 9.0, 12.0]


def test_events_round_trip(tmp_path, simulated):
    path = tmp_path / "events.jsonl"
    save_events(path, simulated.events[:2])
    append_events(path, simulated.events[2:])
    assert load_events(path) == simulated.events
    save_events(path, [])
    assert load_events(path) == []


def test_events_corruption(tmp_path, simulated):
    path = tmp_path / "events.jsonl"
    save_events(path, simulated.events)
    with open(path, "a", encoding="utf-8") as f:
        f.write('{"kind": "AttackSta')
    assert load_events(path) == simulated.events

    path.write_text('{"kind": "Nope"}\n', encoding="utf-8")
    with pytest.raises(CorruptionError) as exc_info:
        load_events(path)
    assert exc_info.value.line_no == 1


def test_events_invalid_utf8(tmp_path, simulated):
    path = tmp_path / "events.jsonl"
    save_events(path, simulated.events)
    with open(path, "ab") as f:
        f.write('{"kind": "攻击'.encode("utf-8")[:-2])
    assert load_events(path) == simulated.events

    path.write_bytes(b"\xc3\x28\n" + event_line(simulated.events[0]).encode("utf-8") + b"\n")
    with pytest.raises(CorruptionError) as exc_info:
        load_events(path)
    assert exc_info.value.line_no == 1


def test_replay_reproduces_stored_events(tmp_path, simulated):
    """持久化 -> 重新加载 -> 重新检测，事件逐字节一致"""
    directory = _save_experiment(tmp_path, simulated)
    replayed = detector_run(load_readings(directory.readings), CONFIG)
    stored_lines = directory.events.read_text(encoding="utf-8")
    assert "".join(event.model_dump_json() + "\n" for event in replayed) == stored_lines


def test_blacklist_store(tmp_path):
    path = tmp_path / "blacklist.json"
    store = BlacklistStore(path)
    assert blacklist_ops(store, "add", "10.0.0.2") is True
    assert blacklist_ops(store, "add", "10.0.0.2") is False
    assert blacklist_ops(store, "add", "9.0.0.1") is True
    assert blacklist_ops(store, "check", "10.0.0.2") is True
    assert "10.0.0.3" not in store
    assert list(store) == ["9.0.0.1", "10.0.0.2"]

    reloaded = BlacklistStore(path)
    assert len(reloaded) == 2
    assert blacklist_ops(reloaded, "remove", "10.0.0.2") is True
    assert blacklist_ops(reloaded, "remove", "10.0.0.2") is False
    assert read_json(path) == {"addresses": ["9.0.0.1"]}

    with pytest.raises(InvalidInputError):
        blacklist_ops(reloaded, "flush", "9.0.0.1")


def test_blacklist_rejects_malformed_address(tmp_path):
    from mem_guard.exceptions import AddressParseError

    store = BlacklistStore(tmp_path / "blacklist.json")
    with pytest.raises(AddressParseError):
        store.add("10.0.0.256")
    (tmp_path / "bad.json").write_text('{"addresses": "10.0.0.1"}', encoding="utf-8")
    with pytest.raises(CorruptionError):
        BlacklistStore(tmp_path / "bad.json")


def test_write_json_atomic_and_names(tmp_path):
    path = write_json_atomic(tmp_path / "sub" / "data.json", {"b": 1, "a": [1, 2]})
    assert read_json(path) == {"a": [1, 2], "b": 1}
    assert not (tmp_path / "sub" / ".data.json.tmp").exists()
    (tmp_path / "broken.json").write_text('{\n"a": }', encoding="utf-8")
    with pytest.raises(CorruptionError) as exc_info:
        read_json(tmp_path / "broken.json")
    assert exc_info.value.line_no == 2

    name = create_name_with_time("registry.json")
    assert name.suffix == ".json"
    assert name.stem.startswith("registry_")


def test_summary_with_labels(simulated):
    summary = compute_summary(simulated.readings, simulated.events, CONFIG)
    assert summary.samples == 200
    assert summary.attacks_detected == 1
    assert summary.attacks_stopped == 1
    assert summary.false_positive_count == 0
    assert summary.ongoing_at_end is False
    episode = summary.episodes[0]
    assert episode.onset_index == 100
    assert episode.started_index == next(e.sample_index for e in simulated.events
                                         if e.kind is EventKind.ATTACK_STARTED)
    assert episode.detection_latency_s == round(episode.detection_latency_samples * 3.0, 3)
    assert episode.stop_latency_samples == CONFIG.time_threshold + 1


def test_summary_without_labels():
    """无真值标签时延迟从超阈值段起点算起"""
    readings = _stream([0.2] * 5 + [0.6] * 8 + [0.2] * 6)
    events = detector_run(readings, CONFIG)
    summary = compute_summary(readings, events, CONFIG)
    episode = summary.episodes[0]
    assert episode.onset_index == 5
    assert episode.detection_latency_samples == 3
    assert episode.detection_latency_s == 9.0
    assert episode.stopped_index == 17
    assert episode.stop_latency_samples == 5
    assert "detection latency 3 samples (9.000s)" in format_summary(summary)


def test_summary_false_positive_and_ongoing():
    flags = [False] * 10
    readings = _stream([0.6] * 10, flags=flags)
    events = detector_run(readings, CONFIG)
    summary = compute_summary(readings, events, CONFIG)
    assert summary.false_positive_count == 1
    assert summary.ongoing_at_end is True
    text = format_summary(summary)
    assert "ongoing at end of log" in text
    assert "[false positive]" in text


def test_summary_without_attack():
    readings = _stream([0.2] * 10)
    summary = compute_summary(readings, [], CONFIG)
    assert format_summary(summary) == "no attack detected (10 samples)"


def test_verify_experiment(tmp_path, simulated):
    directory = _save_experiment(tmp_path, simulated)
    record = verify_experiment(directory)
    assert record == load_experiment(directory)
    assert record.scenario == single_burst_scenario("10.0.0.2")

    # 篡改事件日志
    save_events(directory.events, simulated.events[:2])
    with pytest.raises(CorruptionError):
        verify_experiment(directory)


def test_verify_detects_tampered_summary(tmp_path, simulated):
    directory = _save_experiment(tmp_path, simulated)
    data = read_json(directory.record)
    data["summary"]["attacks_stopped"] = 0
    write_json_atomic(directory.record, data)
    with pytest.raises(CorruptionError):
        verify_experiment(directory)


def test_incomplete_experiment_dir(tmp_path):
    directory = create_experiment_dir(tmp_path, "empty")
    with pytest.raises(CorruptionError):
        verify_experiment(directory)
    with pytest.raises(NotFoundError):
        load_experiment(directory)
