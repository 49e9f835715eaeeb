"""采样日志 readings.jsonl

第一行为头部 {"schema_version": 1, "profile": "..."}，之后每行一个 ResourceReading。
崩溃时最多留下一行被截断的尾行，加载时跳过。
"""

import os
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..exceptions import CorruptionError, NotFoundError, OrderingError, VersionError
from ..mg_logger import create_logger_wrapper, get_logger
from ..telemetry.models import ResourceReading

logger = get_logger("multi", "store")
store_wrapper = create_logger_wrapper(logger)

SCHEMA_VERSION = 1


class ReadingLogHeader(BaseModel):
    model_config = ConfigDict(extra="forbid")

    schema_version: int = Field(default=SCHEMA_VERSION)
    profile: str


def split_records(data: bytes) -> Tuple[List[bytes], bool]:
    """按 b"\n" 切分；返回 (各行字节串, 是否以换行结尾)，不含结尾换行后的空串"""
    ends_cleanly = data.endswith(b"\n") or not data
    lines = data.split(b"\n")
    return (lines[:-1] if ends_cleanly else lines), ends_cleanly


def parse_error_reason(e: Exception) -> str:
    if isinstance(e, ValidationError):
        return e.errors()[0]["msg"]
    return str(e)


def _parse_header(line: bytes, path: Path) -> ReadingLogHeader:
    try:
        text = line.decode("utf-8")
    except UnicodeDecodeError as e:
        raise CorruptionError(f"{path}: header is not valid UTF-8: {e}", line_no=1) from e
    try:
        header = ReadingLogHeader.model_validate_json(text)
    except ValidationError as e:
        raise VersionError(f"{path}: line 1 is not a reading log header: {e}") from e
    if header.schema_version != SCHEMA_VERSION:
        raise VersionError(f"{path}: schema version {header.schema_version}, expected {SCHEMA_VERSION}")
    return header


def read_header(path: str | Path) -> ReadingLogHeader:
    path = Path(path)
    if not path.exists():
        raise NotFoundError(f"Reading log {path} does not exist")
    with open(path, "rb") as f:
        first = f.readline()
    if not first.strip():
        raise CorruptionError(f"{path}: missing header", line_no=1)
    return _parse_header(first, path)


class ReadingLog:
    """只追加的采样日志，单写者；按设备检查时间戳不递减"""

    def __init__(self, path: Path, header: ReadingLogHeader, last_timestamps: Dict[str, float], durable: bool = True):
        self.path = path
        self.header = header
        self.durable = durable
        self._last_timestamps = dict(last_timestamps)
        self._file = open(path, "a", encoding="utf-8")
        self.count = 0

    @classmethod
    def create(cls, path: str | Path, profile_name: str, durable: bool = True) -> "ReadingLog":
        """新建（或覆盖）日志并写入头部"""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        header = ReadingLogHeader(profile=profile_name)
        with open(path, "w", encoding="utf-8") as f:
            f.write(header.model_dump_json() + "\n")
        return cls(path, header, {}, durable)

    @classmethod
    def open(cls, path: str | Path, durable: bool = True) -> "ReadingLog":
        """打开已有日志继续追加，schema 版本不符时抛出 VersionError"""
        path = Path(path)
        header = read_header(path)
        last: Dict[str, float] = {}
        for reading in load_readings(path):
            last[reading.device_id] = max(last.get(reading.device_id, reading.timestamp_s), reading.timestamp_s)
        _repair_tail(path)
        return cls(path, header, last, durable)

    def _write(self, readings: Iterable[ResourceReading]) -> int:
        written = 0
        for reading in readings:
            last = self._last_timestamps.get(reading.device_id)
            if last is not None and reading.timestamp_s < last:
                raise OrderingError(
                    f"Reading of {reading.device_id!r} at {reading.timestamp_s}s precedes {last}s in {self.path}"
                )
            self._file.write(reading.model_dump_json(exclude_none=True) + "\n")
            self._last_timestamps[reading.device_id] = reading.timestamp_s
            written += 1
        self._file.flush()
        if self.durable:
            os.fsync(self._file.fileno())
        self.count += written
        return written

    def append(self, reading: ResourceReading) -> "ReadingLog":
        self._write((reading,))
        return self

    def extend(self, readings: Iterable[ResourceReading]) -> "ReadingLog":
        """批量追加，只 fsync 一次"""
        self._write(readings)
        return self

    def close(self) -> None:
        if not self._file.closed:
            self._file.close()

    def __enter__(self) -> "ReadingLog":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


def append_reading(log: ReadingLog, reading: ResourceReading) -> ReadingLog:
    return log.append(reading)


def _parse_reading(line: bytes) -> ResourceReading:
    return ResourceReading.model_validate_json(line.decode("utf-8"))


def _repair_tail(path: Path) -> None:
    """追加前修复没有换行结尾的尾行：完整记录补上换行，残缺记录截掉"""
    with open(path, "rb+") as f:
        data = f.read()
        if not data or data.endswith(b"\n"):
            return
        cut = data.rfind(b"\n") + 1
        tail = data[cut:]
        try:
            # 没有任何换行时尾行就是已校验过的头部
            if cut:
                _parse_reading(tail)
        except (ValidationError, UnicodeDecodeError):
            logger.warning("%s: dropping truncated final line before appending", path)
            f.truncate(cut)
            return
        f.write(b"\n")


@store_wrapper(level="INFO_STORE", model="simple")
def load_readings(path: str | Path,
                  device_id: Optional[str] = None,
                  start_s: Optional[float] = None,
                  end_s: Optional[float] = None) -> List[ResourceReading]:
    """按设备/时间窗 [start_s, end_s] 过滤，按时间戳排序返回"""
    path = Path(path)
    if not path.exists():
        raise NotFoundError(f"Reading log {path} does not exist")
    lines, ends_cleanly = split_records(path.read_bytes())
    if not lines or not lines[0].strip():
        raise CorruptionError(f"{path}: missing header", line_no=1)
    _parse_header(lines[0], path)

    body = lines[1:]
    readings: List[ResourceReading] = []
    for offset, line in enumerate(body):
        line_no = offset + 2
        if not line.strip():
            continue
        try:
            reading = _parse_reading(line)
        except (ValidationError, UnicodeDecodeError) as e:
            if not ends_cleanly and offset == len(body) - 1:
                logger.warning("%s: skipping truncated final line %d", path, line_no)
                break
            raise CorruptionError(f"{path}: unparseable reading: {parse_error_reason(e)}", line_no=line_no) from e
        if device_id is not None and reading.device_id != device_id:
            continue
        if start_s is not None and reading.timestamp_s < start_s:
            continue
        if end_s is not None and reading.timestamp_s > end_s:
            continue
        readings.append(reading)
    return sorted(readings, key=lambda reading: reading.timestamp_s)
