#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
日志等级统一管理模块

集中管理 mem_guard 各子系统的自定义日志等级，
数值介于 DEBUG(10) 与 INFO(20) 之间，按子系统细分。
"""

import logging
from typing import Dict, Optional


# 自定义日志等级映射表
CUSTOM_LOG_LEVELS: Dict[str, int] = {
    'INFO_TELEMETRY': 11,   # 采样与归一化
    'INFO_DETECTOR': 12,    # 检测状态机
    'INFO_SIMULATOR': 13,   # 设备/攻击模拟
    'INFO_NETPROBE': 14,    # 扫描、洪泛、受害者桩
    'INFO_STORE': 15,       # 持久化
    'INFO_MITIGATION': 16,  # 缓解动作执行
    'INFO_CLI': 17,         # 命令行
}

ALL_LOG_LEVELS: Dict[str, int] = {
    'DEBUG': logging.DEBUG,
    'INFO': logging.INFO,
    'WARNING': logging.WARNING,
    'ERROR': logging.ERROR,
    'CRITICAL': logging.CRITICAL,
    **CUSTOM_LOG_LEVELS
}

LEVEL_NAMES: Dict[int, str] = {v: k for k, v in ALL_LOG_LEVELS.items()}


def get_log_level(level_name: str, default_level: int = logging.INFO) -> int:
    """
    根据等级名称获取对应的数值

    Examples:
        >>> get_log_level('INFO_DETECTOR')
        12
        >>> get_log_level('INVALID', logging.WARNING)
        30
    """
    return ALL_LOG_LEVELS.get(level_name.upper(), default_level)


def get_level_name(level_value: int) -> Optional[str]:
    """根据等级数值获取对应的名称，无效时返回None"""
    return LEVEL_NAMES.get(level_value)


def register_custom_levels() -> None:
    """向logging模块注册所有自定义日志等级，重复调用是安全的"""
    for level_name, level_value in CUSTOM_LOG_LEVELS.items():
        logging.addLevelName(level_value, level_name)


def is_custom_level(level_name: str) -> bool:
    return level_name.upper() in CUSTOM_LOG_LEVELS


register_custom_levels()
