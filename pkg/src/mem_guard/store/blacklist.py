"""黑名单 blacklist.json：IPv4 地址集合，每次变更立即原子落盘"""

import threading
from pathlib import Path
from typing import Iterator, Literal, Set

from ..addressing import parse_ipv4
from ..exceptions import CorruptionError, InvalidInputError
from .files import read_json, write_json_atomic
from .reading_log import logger

BlacklistOp = Literal["add", "check", "remove"]


class BlacklistStore:
    """集合语义；所有变更经同一把锁串行化"""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._addresses: Set[str] = set()
        if self.path.exists():
            data = read_json(self.path)
            if not isinstance(data, dict) or not isinstance(data.get("addresses"), list):
                raise CorruptionError(f"{self.path}: expected an object with an 'addresses' list")
            self._addresses = {str(parse_ipv4(item)) for item in data["addresses"]}

    def save(self) -> None:
        write_json_atomic(self.path, {"addresses": sorted(self._addresses, key=parse_ipv4)})

    def add(self, ip: str) -> bool:
        """返回是否为新加入"""
        address = str(parse_ipv4(ip))
        with self._lock:
            added = address not in self._addresses
            self._addresses.add(address)
            self.save()
        if added:
            logger.info_store("blacklist + %s", address)
        return added

    def check(self, ip: str) -> bool:
        address = str(parse_ipv4(ip))
        with self._lock:
            return address in self._addresses

    def remove(self, ip: str) -> bool:
        """返回地址原先是否在名单中"""
        address = str(parse_ipv4(ip))
        with self._lock:
            present = address in self._addresses
            self._addresses.discard(address)
            self.save()
        if present:
            logger.info_store("blacklist - %s", address)
        return present

    def __contains__(self, ip: str) -> bool:
        return self.check(ip)

    def __iter__(self) -> Iterator[str]:
        with self._lock:
            return iter(sorted(self._addresses, key=parse_ipv4))

    def __len__(self) -> int:
        return len(self._addresses)


def blacklist_ops(store: BlacklistStore, op: BlacklistOp, ip: str) -> bool:
    if op == "add":
        return store.add(ip)
    if op == "check":
        return store.check(ip)
    if op == "remove":
        return store.remove(ip)
    raise InvalidInputError(f"Unknown blacklist operation {op!r}")
