"""子命令实现，每个函数返回进程退出码

事件以每行一个JSON对象写到标准输出，日志写到标准错误。
"""

import argparse
import json
import time
from pathlib import Path
from typing import Iterable, List, Optional

from ..addressing import parse_endpoint, parse_ipv4
from ..config import ConfigDocument, load_config_document
from ..detector.engine import DetectorEngine
from ..detector.models import DetectionEvent, DetectorConfig, EventKind
from ..exceptions import EXIT_OK, AddressParseError, InvalidInputError
from ..mg_logger import get_logger
from ..netprobe.allowlist import Allowlist
from ..netprobe.control import ControlClient, LiveMitigator, VictimStatsSource
from ..netprobe.flood import flood
from ..netprobe.models import DeviceRecord, HostStatus
from ..netprobe.registry import DeviceRegistry, blacklist_enforce
from ..netprobe.scanner import scan
from ..netprobe.victim import VictimStub
from ..settings import get_settings
from ..simulator.closed_loop import run_closed_loop
from ..simulator.models import (
    AttackScenario,
    DeviceSim,
    load_scenario,
    single_burst_scenario,
    two_period_scenario,
)
from ..store.blacklist import BlacklistStore
from ..store.events import append_events, event_line, save_events
from ..store.experiment import (
    ExperimentDir,
    ExperimentRecord,
    compute_summary,
    create_experiment_dir,
    format_summary,
    save_experiment,
)
from ..store.reading_log import ReadingLog, load_readings, read_header
from ..telemetry.models import DeviceProfile, ResourceReading
from ..telemetry.profiles import get_profile
from ..telemetry.sampler import sample_host
from .report import write_report

logger = get_logger("multi", "cli")

SCENARIO_PRESETS = {
    "single-burst": single_burst_scenario,
    "two-period": two_period_scenario,
    "none": lambda target_device_id: AttackScenario(target_device_id=target_device_id),
}
DEFAULT_SIM_DEVICE = "10.0.0.2"


def _emit(events: Iterable[DetectionEvent]) -> None:
    for event in events:
        print(event_line(event), flush=True)


def _config_document(args: argparse.Namespace) -> ConfigDocument:
    return load_config_document(args.config) if getattr(args, "config", None) else ConfigDocument()


def _resolve_profile(args: argparse.Namespace, document: ConfigDocument, fallback: Optional[str] = None) -> DeviceProfile:
    """--profile 优先，其次配置文档显式给出的画像，最后是 fallback"""
    if args.profile:
        return get_profile(args.profile)
    if "profile" in document.model_fields_set or fallback is None:
        return document.resolve_profile()
    return get_profile(fallback)


def _detector_config(args: argparse.Namespace, document: ConfigDocument, profile: DeviceProfile,
                     interval_s: Optional[float] = None) -> DetectorConfig:
    return document.detector_config(
        profile,
        trigger_mode=args.mode,
        count_threshold=args.count_threshold,
        time_threshold=args.time_threshold,
        sample_interval_s=interval_s,
    )


def _output_dir(args: argparse.Namespace) -> ExperimentDir:
    if args.out:
        return create_experiment_dir(Path(args.out).parent, Path(args.out).name)
    return create_experiment_dir(get_settings().experiment_root)


def _record_blacklisting(directory: ExperimentDir, events: Iterable[DetectionEvent]) -> None:
    """把模拟中被拉黑的设备写入 registry.json / blacklist.json"""
    registry = DeviceRegistry.load(directory.registry)
    blacklist = BlacklistStore(directory.blacklist)
    for event in events:
        if event.kind is not EventKind.MITIGATION_APPLIED or not event.actions:
            continue
        try:
            parse_ipv4(event.device_id)
        except AddressParseError:
            logger.debug("device %s has no IPv4 id, not recorded in the blacklist", event.device_id)
            continue
        registry.upsert(DeviceRecord(ip=event.device_id, status=HostStatus.ONLINE))
        blacklist_enforce(registry, event.device_id)
        blacklist.add(event.device_id)
    registry.save()
    blacklist.save()


def _finish(directory: ExperimentDir, record: ExperimentRecord) -> None:
    save_experiment(directory, record)
    print(format_summary(record.summary))
    print(f"experiment: {directory.root}")


def cmd_simulate(args: argparse.Namespace) -> int:
    document = _config_document(args)
    scenario_doc = None
    if args.scenario in SCENARIO_PRESETS:
        device_id = args.device_id or DEFAULT_SIM_DEVICE
        scenario = SCENARIO_PRESETS[args.scenario](device_id)
    else:
        scenario_doc = load_scenario(args.scenario)
        scenario = scenario_doc.to_scenario()
        device_id = scenario_doc.device_id or scenario.target_device_id

    profile = _resolve_profile(args, document, scenario_doc.profile if scenario_doc else None)
    seed = args.seed if args.seed is not None else (scenario_doc.seed if scenario_doc else 0)
    config = _detector_config(args, document, profile, args.interval_s)
    if scenario_doc is not None:
        device = scenario_doc.to_device(profile).model_copy(update={"device_id": device_id, "rng_seed": seed})
    else:
        device = DeviceSim(device_id=device_id, profile=profile, rng_seed=seed)

    logger.info_cli("simulate %s on %s (%s), seed %d, %.3fs x %.1fs",
                    args.scenario, device_id, profile.name, seed, args.interval_s, args.duration_s)
    result = run_closed_loop(device, scenario, config, args.interval_s, args.duration_s)

    directory = _output_dir(args)
    with ReadingLog.create(directory.readings, profile.name) as log:
        log.extend(result.readings)
    save_events(directory.events, result.events)
    _record_blacklisting(directory, result.events)
    _emit(result.events)
    _finish(directory, ExperimentRecord(
        profile=profile, config=config, scenario=scenario, seed=seed,
        interval_s=args.interval_s, total_s=args.duration_s, events=result.events,
        summary=compute_summary(result.readings, result.events, config),
    ))
    return EXIT_OK


def cmd_detect(args: argparse.Namespace) -> int:
    document = _config_document(args)
    header = read_header(args.readings)
    profile = _resolve_profile(args, document, header.profile)
    readings = load_readings(args.readings)
    config = _detector_config(args, document, profile)

    engine = DetectorEngine(config)
    events: List[DetectionEvent] = []
    for reading in readings:
        new_events = engine.feed(reading)
        _emit(new_events)
        events.extend(new_events)
    if args.events_out:
        save_events(args.events_out, events)
    print(format_summary(compute_summary(readings, events, config)))
    return EXIT_OK


def cmd_monitor(args: argparse.Namespace) -> int:
    document = _config_document(args)
    profile = _resolve_profile(args, document)
    config = _detector_config(args, document, profile, args.interval_s)
    # 容量取数据源报告的值（本机内存总量或受害者桩的 cap_bytes）
    profile = profile.model_copy(update={"total_mem_bytes": 0})
    directory = _output_dir(args)

    source = None
    mitigator = None
    device_id = args.device_id or "localhost"
    if args.victim_control:
        client = ControlClient(args.victim_control)
        source = VictimStatsSource(client, profile.architecture)
        device_id = args.device_id or client.address[0]
        registry = DeviceRegistry.load(directory.registry)
        blacklist = BlacklistStore(directory.blacklist)
        mitigator = LiveMitigator(client, registry, blacklist.add)

    logger.info_cli("monitor %s every %.3fs for %.1fs", device_id, args.interval_s, args.duration_s)
    engine = DetectorEngine(config)
    readings: List[ResourceReading] = []
    events: List[DetectionEvent] = []
    with ReadingLog.create(directory.readings, profile.name) as log:
        for reading in sample_host(args.interval_s, args.duration_s, profile, source, device_id):
            log.append(reading)
            readings.append(reading)
            new_events = engine.feed(reading)
            _emit(new_events)
            append_events(directory.events, new_events)
            events.extend(new_events)
            for event in new_events:
                if event.kind is EventKind.MITIGATION_APPLIED and mitigator is not None:
                    mitigator.apply(event.device_id, event.actions)
    if not directory.events.exists():
        save_events(directory.events, [])
    if mitigator is not None:
        registry.save()
        blacklist.save()
    _finish(directory, ExperimentRecord(
        profile=profile, config=config, interval_s=args.interval_s, total_s=args.duration_s,
        events=events, summary=compute_summary(readings, events, config),
    ))
    return EXIT_OK


def _allowlist(args: argparse.Namespace) -> Allowlist:
    if args.allowlist:
        return Allowlist(item for text in args.allowlist for item in text.split(",") if item.strip())
    return Allowlist.from_settings()


def cmd_attack(args: argparse.Namespace) -> int:
    registry = DeviceRegistry.load(args.registry) if args.registry else None
    blacklist = BlacklistStore(args.blacklist) if args.blacklist else None
    settings = get_settings().netprobe
    stats = flood(
        args.target,
        args.protocol.upper(),
        args.rate_pps or settings.default_rate_pps,
        args.duration_s,
        args.payload_bytes,
        registry=registry,
        allowlist=_allowlist(args),
        is_blacklisted=blacklist.check if blacklist is not None else None,
    )
    print(json.dumps({"attacker": stats.model_dump()}, sort_keys=True))
    if args.victim_control:
        print(json.dumps({"victim": ControlClient(args.victim_control).stats()}, sort_keys=True))
    return EXIT_OK


def parse_ports(text: str) -> List[int]:
    """'22,80,8000-8002' -> [22, 80, 8000, 8001, 8002]"""
    ports: List[int] = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        low, sep, high = item.partition("-")
        try:
            ports.extend(range(int(low), int(high) + 1) if sep else [int(low)])
        except ValueError as e:
            raise InvalidInputError(f"Invalid port list {text!r}") from e
    return ports


def cmd_scan(args: argparse.Namespace) -> int:
    registry_path = Path(args.registry) if args.registry else get_settings().experiment_root / "registry.json"
    registry = DeviceRegistry.load(registry_path)
    records = scan(args.targets, parse_ports(args.ports), args.timeout_ms, registry=registry,
                   allowlist=_allowlist(args))
    for record in records:
        print(record.model_dump_json(), flush=True)
    logger.info_cli("registry %s holds %d device(s)", registry_path, len(registry))
    return EXIT_OK


def cmd_victim(args: argparse.Namespace) -> int:
    ip, port = parse_endpoint(args.listen)
    _allowlist(args).check(ip)
    blacklist = list(BlacklistStore(args.blacklist)) if args.blacklist else ()
    stub = VictimStub(str(ip), port, args.control_port, args.buffer_bytes, args.cap_bytes, blacklist=blacklist)
    with stub:
        print(json.dumps({"listen": stub.endpoint, "control": stub.control_endpoint}), flush=True)
        deadline = time.monotonic() + args.duration_s
        try:
            while time.monotonic() < deadline:
                time.sleep(min(0.5, max(deadline - time.monotonic(), 0.0)))
        except KeyboardInterrupt:
            logger.info_cli("victim interrupted")
        print(json.dumps(stub.stats_payload(), sort_keys=True), flush=True)
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    paths = write_report(ExperimentDir(args.experiment), args.out)
    for name, path in paths.items():
        print(f"{name}: {path}")
    return EXIT_OK

