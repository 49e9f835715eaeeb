"""IPv4 地址与 ip:port 端点解析"""

import ipaddress
from typing import Tuple

from .exceptions import AddressParseError


def parse_ipv4(text: str) -> ipaddress.IPv4Address:
    try:
        return ipaddress.IPv4Address(str(text).strip())
    except ValueError as e:
        raise AddressParseError(f"Malformed IPv4 address {text!r}") from e


def parse_endpoint(text: str) -> Tuple[ipaddress.IPv4Address, int]:
    """'127.0.0.1:9000' -> (IPv4Address, 9000)"""
    host, sep, port_text = str(text).strip().rpartition(":")
    if not sep:
        raise AddressParseError(f"Endpoint {text!r} is not of the form ip:port")
    try:
        port = int(port_text)
    except ValueError as e:
        raise AddressParseError(f"Endpoint {text!r} has a non-numeric port") from e
    if not 0 < port < 65536:
        raise AddressParseError(f"Port {port} of {text!r} is outside [1, 65535]")
    return parse_ipv4(host), port
