"""mem_guard 异常定义

所有异常都继承自 MemGuardError，exit_code 即命令行的退出码约定：
2 用法/配置错误，3 数据损坏，4 安全联锁。
"""

from typing import Optional

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CORRUPTION = 3
EXIT_INTERLOCK = 4


class MemGuardError(Exception):
    """mem_guard 基础异常类"""

    exit_code: int = EXIT_USAGE

    def __init__(self, message: str, exit_code: Optional[int] = None):
        super().__init__(message)
        self.message = message
        if exit_code is not None:
            self.exit_code = exit_code


class ConfigError(MemGuardError):
    """配置文档无法解析或校验失败"""


class InvalidProfileError(MemGuardError):
    """设备画像不合法（容量为0、区间倒置等）"""


class InvalidMeasurementError(MemGuardError):
    """测量值为负数、NaN或超出[0,1]"""


class InvalidInputError(MemGuardError):
    """输入与设备架构不匹配"""


class AcquisitionError(MemGuardError):
    """主机遥测源不可用"""

    def __init__(self, message: str, metric: str):
        super().__init__(f"{metric}: {message}")
        self.metric = metric


class OrderingError(MemGuardError):
    """同一设备的时间戳没有严格递增"""

    def __init__(self, message: str = "Readings out of timestamp order"):
        super().__init__(message, EXIT_CORRUPTION)


class InvalidScenarioError(MemGuardError):
    """攻击场景不合法或目标设备未知"""


class ProtocolViolationError(MemGuardError):
    """缓解动作顺序不符合 Blacklist -> StopReadWrite -> Disconnect"""


class ScanError(MemGuardError):
    """扫描目标不可路由或无法解析"""


class TransportError(MemGuardError):
    """套接字层失败"""


class RetryExhaustedError(TransportError):
    """重试次数耗尽"""

    def __init__(self, message: str = "Maximum retry attempts exceeded"):
        super().__init__(message)


class RefusalError(MemGuardError):
    """拒绝发送：目标已在黑名单中，或速率/时长超出上限"""

    exit_code = EXIT_INTERLOCK


class AllowlistViolationError(MemGuardError):
    """目标地址不在允许列表中"""

    exit_code = EXIT_INTERLOCK


class StartupError(MemGuardError):
    """受害者桩启动失败（端口无法绑定）"""


class NotFoundError(MemGuardError):
    """注册表中不存在该设备"""


class AddressParseError(MemGuardError):
    """IPv4 地址格式错误"""


class VersionError(MemGuardError):
    """日志 schema 版本不匹配"""

    exit_code = EXIT_CORRUPTION


class CorruptionError(MemGuardError):
    """持久化数据损坏"""

    exit_code = EXIT_CORRUPTION

    def __init__(self, message: str, line_no: Optional[int] = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no
