"""日志配置管理模块

从 memguard.toml 的 [logging] 段读取日志配置，缺省时使用内置默认值。
"""

import sys
from pathlib import Path
from typing import Any, Dict

from ..toml import load_toml


DEFAULT_LOGGING: Dict[str, Any] = {
    "name": "mem_guard",
    "level": "INFO",
    "format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    "file_path": "",  # 为空时只输出到控制台(stderr)
    "max_bytes": 10485760,  # 10MB
    "backup_count": 5,
    "rotation_type": "size",  # size 或 time
    "rotation_interval": "midnight",
    "multi_instance_shared_log": True,
}


class MgLoggerConfig:
    """日志配置类"""

    def __init__(self, config_path: str | Path | None = None):
        self.config_path = Path(config_path) if config_path else None
        self._config = self._load_config()

    def _load_config(self) -> Dict[str, Any]:
        """加载配置文件，合并默认配置和用户配置"""
        merged = dict(DEFAULT_LOGGING)
        if self.config_path is None:
            return merged
        try:
            user_config = load_toml(self.config_path, raise_error_if_not_found=False)
        except IOError as e:
            print(f"警告: 读取日志配置失败 {e}，使用默认配置", file=sys.stderr)
            return merged
        merged.update(user_config.get("logging", {}))
        return merged

    @property
    def logger_name(self) -> str:
        return self._config["name"]

    @property
    def log_level(self) -> str:
        return self._config["level"]

    @property
    def log_format(self) -> str:
        return self._config["format"]

    @property
    def log_file_path(self) -> str:
        return self._config["file_path"]

    @property
    def max_bytes(self) -> int:
        return self._config["max_bytes"]

    @property
    def backup_count(self) -> int:
        return self._config["backup_count"]

    @property
    def rotation_type(self) -> str:
        return self._config["rotation_type"]

    @property
    def rotation_interval(self) -> str:
        return self._config["rotation_interval"]

    @property
    def multi_instance_shared_log(self) -> bool:
        return self._config["multi_instance_shared_log"]


_config_instance: MgLoggerConfig | None = None


def set_logger_config_path(config_path: str | Path | None) -> None:
    """设置配置文件路径并重新初始化配置"""
    global _config_instance
    _config_instance = MgLoggerConfig(config_path)


def get_logger_config() -> MgLoggerConfig:
    """获取配置实例，未初始化时使用默认配置"""
    global _config_instance
    if _config_instance is None:
        _config_instance = MgLoggerConfig()
    return _config_instance


class MgLoggerConfigProxy:
    """配置代理类，确保配置的延迟初始化"""

    def __getattr__(self, name):
        return getattr(get_logger_config(), name)


config = MgLoggerConfigProxy()
