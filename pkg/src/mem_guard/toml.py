"""memguard.toml 的查找与读取"""

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Iterator


SETTINGS_FILE_NAME = "memguard.toml"


def _walk_to_root(start: Path) -> Iterator[Path]:
    """从 start 所在目录逐级向上，直到文件系统根目录"""
    if not start.exists():
        raise IOError(f"Starting path {start} not found")
    start = start.resolve()
    if start.is_file():
        start = start.parent
    yield start
    yield from start.parents


def find_toml(filename: str = SETTINGS_FILE_NAME, start: str | Path | None = None) -> Path:
    """
    从工作目录(或 start)开始逐级向上查找 filename

    找到返回文件路径，否则返回空 Path()
    """
    for directory in _walk_to_root(Path(start) if start is not None else Path.cwd()):
        candidate = directory / filename
        if candidate.is_file():
            return candidate
    return Path()


def load_toml(toml_name_or_path: str | Path | None = None,
              raise_error_if_not_found: bool = True) -> dict:
    """
    加载 toml 文件

    toml_name_or_path 为 None 时向上查找 memguard.toml；为 str 时先按路径、再按文件名查找；
    为 Path 时直接使用。未找到且不要求报错时返回空字典。
    """
    if toml_name_or_path is None:
        toml_path = find_toml()
    elif isinstance(toml_name_or_path, str):
        toml_path = Path(toml_name_or_path)
        if not toml_path.is_file():
            toml_path = find_toml(toml_name_or_path)
    elif isinstance(toml_name_or_path, Path):
        toml_path = toml_name_or_path
    else:
        raise TypeError("toml_name_or_path must be a string, Path, or None")

    if toml_path == Path() or not toml_path.is_file():
        if raise_error_if_not_found:
            raise IOError(f"{toml_name_or_path or SETTINGS_FILE_NAME} not found")
        return {}

    if raise_error_if_not_found and toml_path.suffix != ".toml":
        raise IOError(f"{toml_path} is not a .toml file")

    try:
        with open(toml_path, "rb") as f:
            return tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        raise IOError(f"Error decoding TOML file {toml_path}: {e}") from e
