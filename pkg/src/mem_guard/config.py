"""检测配置文档（JSON）

    {"profile": "raspberry-pi" | {...DeviceProfile...},
     "detector": {"trigger_mode": "absolute", "count_threshold": 3, ...}}

detector 中缺省的 reading_threshold / absolute_threshold 由画像推导。
"""

import json
from pathlib import Path
from typing import Any, Dict, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .detector.models import DetectorConfig
from .exceptions import ConfigError
from .telemetry.models import DeviceProfile
from .telemetry.profiles import get_profile


class ConfigDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    profile: str | DeviceProfile = "raspberry-pi"
    detector: Dict[str, Any] = Field(default_factory=dict)

    def resolve_profile(self) -> DeviceProfile:
        if isinstance(self.profile, DeviceProfile):
            return self.profile
        return get_profile(self.profile)

    def detector_config(self, profile: Optional[DeviceProfile] = None, **overrides: Any) -> DetectorConfig:
        """文档中的值优先于画像推导值，overrides（命令行参数）优先于文档"""
        profile = profile or self.resolve_profile()
        try:
            given = {key: value for key, value in overrides.items() if value is not None}
            return DetectorConfig.for_profile(profile, **{**self.detector, **given})
        except ValidationError as e:
            raise ConfigError(f"Invalid detector config: {e}") from e


def load_config_document(path: str | Path) -> ConfigDocument:
    path = Path(path)
    try:
        return ConfigDocument.model_validate(json.loads(path.read_text(encoding="utf-8")))
    except OSError as e:
        raise ConfigError(f"Cannot read config {path}: {e}") from e
    except (json.JSONDecodeError, ValidationError) as e:
        raise ConfigError(f"Invalid config document {path}: {e}") from e