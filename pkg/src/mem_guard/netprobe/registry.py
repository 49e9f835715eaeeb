"""设备注册表：扫描结果与黑名单标记，持久化为 registry.json"""

from pathlib import Path
from typing import Dict, Iterable, Iterator, Optional

from pydantic import ValidationError

from ..addressing import parse_ipv4
from ..exceptions import CorruptionError, NotFoundError
from ..mg_logger import get_logger
from ..store.files import read_json, write_json_atomic
from .models import DeviceRecord

logger = get_logger("multi", "netprobe")

REGISTRY_SCHEMA_VERSION = 1


class DeviceRegistry:
    """以 ip 为键的设备集合；path 不为空时每次变更后立即落盘"""

    def __init__(self, records: Iterable[DeviceRecord] = (), path: Optional[str | Path] = None):
        self.path = Path(path) if path else None
        self._records: Dict[str, DeviceRecord] = {}
        for record in records:
            self._records[record.device_id] = record

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self) -> Iterator[DeviceRecord]:
        return iter(sorted(self._records.values(), key=lambda record: record.ip))

    def __contains__(self, device_id: str) -> bool:
        return str(parse_ipv4(device_id)) in self._records

    def get(self, device_id: str) -> DeviceRecord:
        key = str(parse_ipv4(device_id))
        if key not in self._records:
            raise NotFoundError(f"Device {key} is not in the registry")
        return self._records[key]

    def is_blacklisted(self, device_id: str) -> bool:
        record = self._records.get(str(parse_ipv4(device_id)))
        return record is not None and record.blacklisted

    def upsert(self, record: DeviceRecord) -> DeviceRecord:
        """合并扫描结果；黑名单标记和硬件地址不会被新扫描覆盖掉"""
        previous = self._records.get(record.device_id)
        if previous is not None:
            record = record.model_copy(update={
                "blacklisted": previous.blacklisted or record.blacklisted,
                "mac": record.mac or previous.mac,
                "last_seen_s": max(previous.last_seen_s, record.last_seen_s),
            })
        self._records[record.device_id] = record
        return record

    def replace(self, record: DeviceRecord) -> None:
        self._records[record.device_id] = record

    def save(self) -> None:
        if self.path is None:
            return
        write_json_atomic(self.path, {
            "schema_version": REGISTRY_SCHEMA_VERSION,
            "devices": [record.model_dump(mode="json") for record in self],
        })

    @classmethod
    def load(cls, path: str | Path) -> "DeviceRegistry":
        """文件不存在时返回空注册表"""
        path = Path(path)
        if not path.exists():
            return cls(path=path)
        data = read_json(path)
        try:
            records = [DeviceRecord.model_validate(item) for item in data["devices"]]
        except (KeyError, TypeError, ValidationError) as e:
            raise CorruptionError(f"Invalid registry {path}: {e}") from e
        return cls(records, path=path)


def blacklist_enforce(registry: DeviceRegistry, device_id: str) -> DeviceRegistry:
    """把设备标记为黑名单并立即持久化，幂等"""
    record = registry.get(device_id)
    if not record.blacklisted:
        registry.replace(record.model_copy(update={"blacklisted": True}))
        logger.info_mitigation("device %s blacklisted", record.device_id)
    registry.save()
    return registry
