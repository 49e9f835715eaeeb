"""核心日志模块

提供全局唯一的logger实例、多例logger以及日志配置功能。"""

import logging
import os
import sys
from abc import ABC, abstractmethod
from logging.handlers import RotatingFileHandler, TimedRotatingFileHandler
from pathlib import Path
from typing import Dict, Optional

from .config import config, set_logger_config_path
from .levels import CUSTOM_LOG_LEVELS, get_log_level, register_custom_levels


class EnhancedLogger(logging.Logger):
    """增强的Logger类，为每个子系统提供独立的日志方法"""

    def info_telemetry(self, msg, *args, **kwargs):
        if self.isEnabledFor(CUSTOM_LOG_LEVELS['INFO_TELEMETRY']):
            self._log(CUSTOM_LOG_LEVELS['INFO_TELEMETRY'], msg, args, **kwargs)

    def info_detector(self, msg, *args, **kwargs):
        if self.isEnabledFor(CUSTOM_LOG_LEVELS['INFO_DETECTOR']):
            self._log(CUSTOM_LOG_LEVELS['INFO_DETECTOR'], msg, args, **kwargs)

    def info_simulator(self, msg, *args, **kwargs):
        if self.isEnabledFor(CUSTOM_LOG_LEVELS['INFO_SIMULATOR']):
            self._log(CUSTOM_LOG_LEVELS['INFO_SIMULATOR'], msg, args, **kwargs)

    def info_netprobe(self, msg, *args, **kwargs):
        if self.isEnabledFor(CUSTOM_LOG_LEVELS['INFO_NETPROBE']):
            self._log(CUSTOM_LOG_LEVELS['INFO_NETPROBE'], msg, args, **kwargs)

    def info_store(self, msg, *args, **kwargs):
        if self.isEnabledFor(CUSTOM_LOG_LEVELS['INFO_STORE']):
            self._log(CUSTOM_LOG_LEVELS['INFO_STORE'], msg, args, **kwargs)

    def info_mitigation(self, msg, *args, **kwargs):
        if self.isEnabledFor(CUSTOM_LOG_LEVELS['INFO_MITIGATION']):
            self._log(CUSTOM_LOG_LEVELS['INFO_MITIGATION'], msg, args, **kwargs)

    def info_cli(self, msg, *args, **kwargs):
        if self.isEnabledFor(CUSTOM_LOG_LEVELS['INFO_CLI']):
            self._log(CUSTOM_LOG_LEVELS['INFO_CLI'], msg, args, **kwargs)


class BaseLogger(ABC):
    """Logger基类，提取单例和多例的公共功能"""

    @classmethod
    def _build_logger(cls, name: str, log_file_path: str) -> EnhancedLogger:
        register_custom_levels()
        logging.setLoggerClass(EnhancedLogger)
        logger = logging.getLogger(name)
        logging.setLoggerClass(logging.Logger)

        logger.setLevel(get_log_level(config.log_level, logging.INFO))
        formatter = logging.Formatter(config.log_format)
        cls._setup_logger_handlers(logger, formatter, log_file_path)
        return logger

    @classmethod
    def _create_console_handler(cls, formatter: logging.Formatter) -> logging.Handler:
        """控制台处理器输出到stderr，stdout留给事件行"""
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(formatter)
        return console_handler

    @classmethod
    def _create_file_handler(cls, formatter: logging.Formatter, log_file_path: str) -> Optional[logging.Handler]:
        """创建文件处理器，失败时只使用控制台输出"""
        if not log_file_path:
            return None
        try:
            log_dir = os.path.dirname(log_file_path)
            if log_dir:
                os.makedirs(log_dir, exist_ok=True)

            if config.rotation_type.lower() == "time":
                handler = TimedRotatingFileHandler(
                    filename=log_file_path,
                    when=config.rotation_interval,
                    backupCount=config.backup_count,
                    encoding='utf-8'
                )
            else:
                handler = RotatingFileHandler(
                    filename=log_file_path,
                    maxBytes=config.max_bytes,
                    backupCount=config.backup_count,
                    encoding='utf-8'
                )
            handler.setFormatter(formatter)
            return handler
        except OSError as e:
            print(f"警告: 创建文件处理器失败 {e}，将只使用控制台输出", file=sys.stderr)
            return None

    @classmethod
    def _setup_logger_handlers(cls, logger: EnhancedLogger, formatter: logging.Formatter, log_file_path: str) -> None:
        # 避免重复添加handler
        if logger.handlers:
            return
        logger.addHandler(cls._create_console_handler(formatter))
        file_handler = cls._create_file_handler(formatter, log_file_path)
        if file_handler:
            logger.addHandler(file_handler)
        logger.propagate = False

    @staticmethod
    def _close_handlers(logger: logging.Logger) -> None:
        for handler in logger.handlers[:]:
            handler.close()
            logger.removeHandler(handler)

    @classmethod
    @abstractmethod
    def reset(cls, *args, **kwargs) -> None:
        """重置logger实例"""


class SingletonLogger(BaseLogger):
    """单例Logger类"""

    _instance: Optional[EnhancedLogger] = None

    def __new__(cls) -> EnhancedLogger:
        if cls._instance is None:
            cls._instance = cls._build_logger(config.logger_name, config.log_file_path)
        return cls._instance

    @classmethod
    def reset(cls) -> None:
        """重置logger实例（主要用于测试）"""
        if cls._instance:
            cls._close_handlers(cls._instance)
        cls._instance = None


class MultiInstanceLogger(BaseLogger):
    """多例Logger管理类，每个子系统组件一个实例"""

    _instances: Dict[str, EnhancedLogger] = {}

    @classmethod
    def get_instance(cls, instance_name: str) -> EnhancedLogger:
        if instance_name not in cls._instances:
            cls._instances[instance_name] = cls._create_logger(instance_name)
        return cls._instances[instance_name]

    @classmethod
    def _create_logger(cls, instance_name: str) -> EnhancedLogger:
        log_file_path = config.log_file_path
        if log_file_path and not config.multi_instance_shared_log:
            base_path = Path(log_file_path)
            log_file_path = str(base_path.parent / f"{base_path.stem}_{instance_name}{base_path.suffix}")
        return cls._build_logger(f"{config.logger_name}.{instance_name}", log_file_path)

    @classmethod
    def reset(cls, instance_name: Optional[str] = None) -> None:
        """重置logger实例，instance_name为None时重置所有实例"""
        names = list(cls._instances) if instance_name is None else [instance_name]
        for name in names:
            logger = cls._instances.pop(name, None)
            if logger is not None:
                cls._close_handlers(logger)


def get_logger(mode: str = "singleton", instance_name: str = "default") -> EnhancedLogger:
    """获取logger实例

    Args:
        mode: "singleton" 返回单例，"multi" 返回多例
        instance_name: 当mode为"multi"时的实例名称

    Example:
        >>> logger = get_logger("multi", "detector")
        >>> logger.info_detector("C1=%d T1=%d", 2, 0)
    """
    if mode.lower() == "multi":
        return MultiInstanceLogger.get_instance(instance_name)
    return SingletonLogger()


def reset_logger(instance_name: str | None = None) -> None:
    """重置logger实例

    instance_name 为 None 重置单例；"ALL" 重置单例和所有多例；其他值重置指定多例。
    """
    if instance_name is None:
        SingletonLogger.reset()
    elif instance_name.upper() == "ALL":
        SingletonLogger.reset()
        MultiInstanceLogger.reset()
    else:
        MultiInstanceLogger.reset(instance_name)


def reload_logger(config_path: str | Path | None = None) -> EnhancedLogger:
    """重新加载配置文件并重建所有logger实例"""
    if config_path:
        set_logger_config_path(config_path)
    reset_logger("ALL")
    return get_logger()
