"""安全联锁：只允许向配置的网段发包（默认仅回环）"""

import ipaddress
from typing import Iterable, List, Optional

from ..addressing import parse_ipv4
from ..exceptions import AllowlistViolationError, ConfigError
from ..settings import Settings, get_settings


class Allowlist:
    def __init__(self, networks: Iterable[str]):
        self.networks: List[ipaddress.IPv4Network] = []
        for text in networks:
            try:
                self.networks.append(ipaddress.IPv4Network(str(text).strip(), strict=False))
            except ValueError as e:
                raise ConfigError(f"Invalid allowlist entry {text!r}: {e}") from e

    @classmethod
    def from_settings(cls, settings: Optional[Settings] = None) -> "Allowlist":
        settings = settings or get_settings()
        return cls(settings.netprobe.allowlist)

    def permits(self, address: str | ipaddress.IPv4Address) -> bool:
        ip = parse_ipv4(str(address))
        return any(ip in network for network in self.networks)

    def check(self, address: str | ipaddress.IPv4Address) -> ipaddress.IPv4Address:
        ip = parse_ipv4(str(address))
        if not any(ip in network for network in self.networks):
            allowed = ", ".join(str(network) for network in self.networks) or "nothing"
            raise AllowlistViolationError(f"{ip} is outside the allowlist ({allowed})")
        return ip

    def __repr__(self) -> str:
        return f"Allowlist({[str(network) for network in self.networks]!r})"
