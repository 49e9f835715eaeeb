"""文件工具：原子写JSON、带时间后缀的命名"""

import json
import os
from datetime import datetime
from pathlib import Path
from typing import Any

from ..exceptions import CorruptionError


def create_name_with_time(name: str | Path) -> Path:
    """'registry.json' -> 'registry_20250101-120000.json'"""
    if isinstance(name, str):
        name = Path(name)
    return name.with_name(f"{name.stem}_{datetime.now().strftime('%Y%m%d-%H%M%S')}{name.suffix}")


def write_json_atomic(path: str | Path, data: Any) -> Path:
    """先写临时文件再 os.replace，读者看到的永远是完整文件"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp_path = path.with_name(f".{path.name}.tmp")
    with open(tmp_path, "w", encoding="utf-8") as f:
        json.dump(data, f, ensure_ascii=False, indent=2, sort_keys=True)
        f.write("\n")
        f.flush()
        os.fsync(f.fileno())
    os.replace(tmp_path, path)
    return path


def read_json(path: str | Path) -> Any:
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise CorruptionError(f"{path}: {e.msg}", line_no=e.lineno) from e
