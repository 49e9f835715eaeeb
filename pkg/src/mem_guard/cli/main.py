"""memguard 命令行入口

退出码：0 成功，2 用法/配置错误，3 数据损坏，4 安全联锁。
"""

import argparse
import sys
from typing import List, Optional

from ..detector.models import TriggerMode
from ..exceptions import EXIT_USAGE, MemGuardError
from ..settings import load_settings
from ..telemetry.profiles import BUILTIN_PROFILES
from . import commands

PROFILE_HELP = f"画像名称（{', '.join(BUILTIN_PROFILES)}）或画像JSON文件路径"


def _add_detector_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--profile", default=None, help=PROFILE_HELP)
    parser.add_argument("--config", default=None, help="检测配置JSON文档")
    parser.add_argument("--mode", choices=[mode.value for mode in TriggerMode], default=None,
                        help="触发判据（默认 absolute）")
    parser.add_argument("--count-threshold", type=int, default=None, help="C1 上限（采样数）")
    parser.add_argument("--time-threshold", type=int, default=None, help="T1 上限（采样数）")


def _add_allowlist_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--allowlist", action="append", default=None,
                        help="允许发包的网段，可重复或逗号分隔（默认取 memguard.toml，即 127.0.0.0/8）")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="memguard", description="IoT 设备内存占用攻击检测与缓解")
    parser.add_argument("--settings", default=None, help="memguard.toml 路径（默认从工作目录向上查找）")
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", help="闭环模拟一次实验并写入实验目录")
    _add_detector_args(simulate)
    simulate.add_argument("--scenario", default="single-burst",
                          help="场景JSON文件，或预设 single-burst / two-period / none")
    simulate.add_argument("--seed", type=int, default=None)
    simulate.add_argument("--device-id", default=None)
    simulate.add_argument("--interval-s", type=float, default=3.0)
    simulate.add_argument("--duration-s", type=float, default=600.0)
    simulate.add_argument("--out", default=None, help="实验目录（默认在实验根目录下按时间命名）")
    simulate.set_defaults(handler=commands.cmd_simulate)

    detect = sub.add_parser("detect", help="对采样日志回放检测")
    _add_detector_args(detect)
    detect.add_argument("readings", help="readings.jsonl")
    detect.add_argument("--events-out", default=None, help="把事件另存为 events.jsonl")
    detect.set_defaults(handler=commands.cmd_detect)

    monitor = sub.add_parser("monitor", help="实时采样本机或受害者桩并内联检测")
    _add_detector_args(monitor)
    monitor.add_argument("--interval-s", type=float, default=5.0)
    monitor.add_argument("--duration-s", type=float, default=60.0)
    monitor.add_argument("--device-id", default=None)
    monitor.add_argument("--victim-control", default=None, help="受害者桩控制端点 ip:port")
    monitor.add_argument("--out", default=None)
    monitor.set_defaults(handler=commands.cmd_monitor)

    attack = sub.add_parser("attack", help="向允许列表内的目标发送 TCP/UDP 洪泛")
    attack.add_argument("target", help="ip:port")
    attack.add_argument("--protocol", choices=["tcp", "udp", "TCP", "UDP"], default="udp")
    attack.add_argument("--rate-pps", type=float, default=None)
    attack.add_argument("--duration-s", type=float, default=60.0)
    attack.add_argument("--payload-bytes", type=int, default=None)
    attack.add_argument("--registry", default=None, help="registry.json，黑名单中的目标会被拒绝")
    attack.add_argument("--blacklist", default=None, help="blacklist.json")
    attack.add_argument("--victim-control", default=None, help="结束后查询受害者桩计数")
    _add_allowlist_arg(attack)
    attack.set_defaults(handler=commands.cmd_attack)

    scan = sub.add_parser("scan", help="扫描地址范围并写入注册表")
    scan.add_argument("targets", nargs="+", help="地址或 CIDR")
    scan.add_argument("--ports", default="", help="如 22,80,8000-8010；为空时只探测存活")
    scan.add_argument("--timeout-ms", type=int, default=None)
    scan.add_argument("--registry", default=None, help="registry.json（默认在实验根目录下）")
    _add_allowlist_arg(scan)
    scan.set_defaults(handler=commands.cmd_scan)

    report = sub.add_parser("report", help="由实验目录生成 CSV 报告")
    report.add_argument("experiment", help="实验目录")
    report.add_argument("--out", default=None, help="输出目录（默认为实验目录）")
    report.set_defaults(handler=commands.cmd_report)

    victim = sub.add_parser("victim", help="在限定时长内运行受害者桩")
    victim.add_argument("--listen", default="127.0.0.1:9000", help="数据端口 ip:port（UDP 与 TCP）")
    victim.add_argument("--control-port", type=int, default=9001)
    victim.add_argument("--buffer-bytes", type=int, default=512, help="每个包保留的字节数")
    victim.add_argument("--cap-bytes", type=int, default=4 * 1024 * 1024)
    victim.add_argument("--duration-s", type=float, default=120.0)
    victim.add_argument("--blacklist", default=None, help="blacklist.json，其中的源地址发来的包被丢弃")
    _add_allowlist_arg(victim)
    victim.set_defaults(handler=commands.cmd_victim)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        load_settings(args.settings)
        return args.handler(args)
    except MemGuardError as e:
        commands.logger.error("%s: %s", type(e).__name__, e.message)
        return e.exit_code
    except KeyboardInterrupt:
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
