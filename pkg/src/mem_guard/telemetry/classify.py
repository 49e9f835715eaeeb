"""按设备画像对采样进行状态分类，以及足迹（footprint）汇总"""

from dataclasses import dataclass
from typing import Dict, Iterable, List, Tuple

from ..exceptions import InvalidInputError
from .models import DeviceProfile, MemBand, ResourceReading, StatusClass

# 严重程度升序
_SEVERITY_ORDER: Tuple[StatusClass, ...] = (
    StatusClass.IDLE,
    StatusClass.ACTIVE,
    StatusClass.UNDER_ATTACK,
)


def _bands(profile: DeviceProfile) -> List[Tuple[StatusClass, MemBand]]:
    return [(status, profile.mem_band(status)) for status in _SEVERITY_ORDER]


def classify_mem(mem_frac: float, profile: DeviceProfile) -> StatusClass:
    """只按内存比例分类

    区间按闭区间处理，重叠或共享边界时归更严重的状态；
    落在两个区间之间空隙的值按空隙中点归入较近的区间（中点归更严重者）；
    低于最低区间或高于最高区间时为 Unknown。
    """
    bands = _bands(profile)
    for status, (low, high) in reversed(bands):
        if low <= mem_frac <= high:
            return status

    below = [(high, index) for index, (_, (_, high)) in enumerate(bands) if high < mem_frac]
    above = [(low, -index) for index, (_, (low, _)) in enumerate(bands) if low > mem_frac]
    if not below or not above:
        return StatusClass.UNKNOWN
    below_high, below_index = max(below)
    above_low, neg_above_index = min(above)
    midpoint = (below_high + above_low) / 2
    if mem_frac < midpoint:
        return bands[below_index][0]
    return bands[-neg_above_index][0]


def classify_status(reading: ResourceReading, profile: DeviceProfile) -> StatusClass:
    """按画像的内存区间对一次采样分类"""
    if reading.architecture is not profile.architecture:
        raise InvalidInputError(
            f"Reading of {reading.device_id!r} carries {reading.architecture.value} metrics "
            f"but profile {profile.name!r} is {profile.architecture.value}"
        )
    return classify_mem(reading.mem_frac, profile)


@dataclass
class FootprintRow:
    """某一状态下实际观测到的资源区间"""

    status: StatusClass
    samples: int
    mem_min: float
    mem_max: float
    aux_min: float
    aux_max: float


def footprint_summary(readings: Iterable[ResourceReading], profile: DeviceProfile) -> Dict[StatusClass, FootprintRow]:
    """监控模式：按状态汇总观测到的内存/辅助指标区间，重建状态区间表"""
    rows: Dict[StatusClass, FootprintRow] = {}
    for reading in readings:
        status = classify_status(reading, profile)
        aux = reading.aux_value
        row = rows.get(status)
        if row is None:
            rows[status] = FootprintRow(status, 1, reading.mem_frac, reading.mem_frac, aux, aux)
            continue
        row.samples += 1
        row.mem_min = min(row.mem_min, reading.mem_frac)
        row.mem_max = max(row.mem_max, reading.mem_frac)
        row.aux_min = min(row.aux_min, aux)
        row.aux_max = max(row.aux_max, aux)
    return rows
