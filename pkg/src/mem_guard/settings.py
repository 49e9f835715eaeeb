"""工具级配置管理

memguard.toml 中除 [logging] 以外的配置段：
[netprobe] 安全联锁与洪泛默认值，[experiment] 实验目录。
环境变量 MEMGUARD_HOME 覆盖实验根目录。
"""

import os
from pathlib import Path
from typing import List

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .exceptions import ConfigError
from .mg_logger import set_logger_config_path
from .toml import find_toml, load_toml

HOME_ENV_VAR = "MEMGUARD_HOME"


class NetprobeSettings(BaseModel):
    """网络探测配置"""

    model_config = ConfigDict(extra="forbid")

    allowlist: List[str] = Field(default_factory=lambda: ["127.0.0.0/8"], description="允许发包的网段")
    max_rate_pps: int = Field(default=20000, gt=0, description="洪泛速率硬上限")
    max_duration_s: float = Field(default=600.0, gt=0, description="洪泛时长硬上限（秒）")
    default_rate_pps: int = Field(default=1000, gt=0, description="默认洪泛速率")
    default_payload_bytes: int = Field(default=64, ge=0, description="默认载荷大小")
    scan_timeout_ms: int = Field(default=300, gt=0, description="单次探测超时（毫秒）")
    scan_workers: int = Field(default=32, gt=0, description="扫描并发数")
    max_scan_hosts: int = Field(default=1024, gt=0, description="单次扫描最多主机数")


class ExperimentSettings(BaseModel):
    """实验目录配置"""

    model_config = ConfigDict(extra="forbid")

    root: str = Field(default="experiments", description="实验根目录")


class Settings(BaseModel):
    """memguard.toml 的整体模型（[logging] 段由 mg_logger 自行解析）"""

    model_config = ConfigDict(extra="ignore")

    netprobe: NetprobeSettings = Field(default_factory=NetprobeSettings)
    experiment: ExperimentSettings = Field(default_factory=ExperimentSettings)

    @property
    def experiment_root(self) -> Path:
        return Path(os.environ.get(HOME_ENV_VAR) or self.experiment.root)


_settings_instance: Settings | None = None


def load_settings(config_path: str | Path | None = None) -> Settings:
    """加载配置文件，同时把日志配置指向同一文件

    config_path 为 None 时从工作目录向上查找 memguard.toml，找不到则全部使用默认值。
    """
    global _settings_instance
    path = Path(config_path) if config_path else find_toml()
    if path == Path():
        data = {}
        set_logger_config_path(None)
    else:
        try:
            data = load_toml(path)
        except IOError as e:
            raise ConfigError(str(e)) from e
        set_logger_config_path(path)
    try:
        _settings_instance = Settings.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"Invalid settings in {path}: {e}") from e
    return _settings_instance


def get_settings() -> Settings:
    """获取配置实例，未初始化时使用默认值"""
    global _settings_instance
    if _settings_instance is None:
        _settings_instance = Settings()
    return _settings_instance
