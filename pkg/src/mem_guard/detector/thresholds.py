"""由设备画像推导检测阈值"""

from ..telemetry.models import DeviceProfile

# 区间表中活动态上界(35%)与实测触发水平(37%)之间的间隔
ABSOLUTE_MARGIN = 0.02
ABSOLUTE_CEILING = 0.99
_DIGITS = 6


def derive_reading_threshold(profile: DeviceProfile) -> float:
    """预期最大突变量：攻击态内存上界 - 攻击前（空闲/活动）内存下界"""
    pre_attack_min = min(profile.idle_mem[0], profile.active_mem[0])
    return max(round(profile.attack_mem[1] - pre_attack_min, _DIGITS), 0.0)


def default_absolute_threshold(profile: DeviceProfile) -> float:
    """略高于最高合法占用：活动态上界 + 0.02，截断到 0.99"""
    return min(round(profile.active_mem[1] + ABSOLUTE_MARGIN, _DIGITS), ABSOLUTE_CEILING)
