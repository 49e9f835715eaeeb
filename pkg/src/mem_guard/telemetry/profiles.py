"""内置设备画像与画像文档加载

内置画像逐字编码测试床的状态区间表（百分比/100）。
"""

import json
from pathlib import Path
from typing import Dict

from pydantic import ValidationError

from ..exceptions import InvalidProfileError
from .models import Architecture, DeviceProfile

RASPBERRY_PI = DeviceProfile(
    name="raspberry-pi",
    architecture=Architecture.GENERAL_PURPOSE,
    idle_mem=(0.10, 0.20),
    active_mem=(0.20, 0.35),
    attack_mem=(0.36, 0.66),
    idle_aux=(0.0055, 0.0088),
    active_aux=(0.0088, 0.015),
    attack_aux=(0.015, 0.165),
    total_mem_bytes=1024 ** 3,
)

ARDUINO = DeviceProfile(
    name="arduino",
    architecture=Architecture.MICROCONTROLLER,
    idle_mem=(0.08, 0.11),
    active_mem=(0.11, 0.16),
    attack_mem=(0.17, 0.45),
    idle_aux=(1.0, 20.0),
    active_aux=(21.0, 45.0),
    attack_aux=(45.0, None),
    total_mem_bytes=2048,
)

BUILTIN_PROFILES: Dict[str, DeviceProfile] = {
    RASPBERRY_PI.name: RASPBERRY_PI,
    ARDUINO.name: ARDUINO,
}


def load_profile(path: str | Path) -> DeviceProfile:
    """从JSON文档加载画像，未知字段会被拒绝"""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
        return DeviceProfile.model_validate(data)
    except OSError as e:
        raise InvalidProfileError(f"Cannot read profile {path}: {e}") from e
    except (json.JSONDecodeError, ValidationError) as e:
        raise InvalidProfileError(f"Invalid profile document {path}: {e}") from e


def get_profile(name_or_path: str | Path) -> DeviceProfile:
    """按内置名称或JSON文件路径获取画像"""
    if isinstance(name_or_path, str) and name_or_path in BUILTIN_PROFILES:
        return BUILTIN_PROFILES[name_or_path]
    path = Path(name_or_path)
    if path.is_file():
        return load_profile(path)
    raise InvalidProfileError(
        f"Unknown profile {name_or_path!r}; built-in profiles: {', '.join(BUILTIN_PROFILES)}"
    )
