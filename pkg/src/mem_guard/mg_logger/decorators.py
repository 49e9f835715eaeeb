"""装饰器模块

提供logger_wrapper装饰器，记录公开操作的调用开始、成功与异常。
"""

import functools
import inspect
import time
from typing import Any, Callable, Literal

from .levels import get_log_level
from .logger import EnhancedLogger, get_logger


MODEL_LITERAL = Literal["simple", "default"]
LEVEL_LITERAL = Literal["INFO_TELEMETRY", "INFO_DETECTOR", "INFO_SIMULATOR", "INFO_NETPROBE",
                        "INFO_STORE", "INFO_MITIGATION", "INFO_CLI",
                        "INFO", "DEBUG", "WARNING", "ERROR", "CRITICAL"]

_MAX_REPR = 120


def _short_repr(value: Any) -> str:
    text = repr(value)
    if len(text) > _MAX_REPR:
        return text[:_MAX_REPR] + "..."
    return text


def logger_wrapper_multi(logger: EnhancedLogger, level: LEVEL_LITERAL = "INFO",
                         model: MODEL_LITERAL = "default") -> Callable:
    """使用指定logger实例的日志装饰器

    Args:
        logger: 指定的logger实例
        level: 日志级别名称
        model: 'default' 记录参数与返回值，'simple' 只记录函数名与耗时（适合传入整条轨迹的函数）
    """
    level_value = get_log_level(level)

    def decorator(func: Callable) -> Callable:
        signature = inspect.signature(func)

        @functools.wraps(func)
        def wrapper(*args, **kwargs) -> Any:
            func_name = func.__qualname__
            start_time = time.perf_counter()

            if model == "simple":
                logger.log(level_value, "call start - %s", func_name)
            else:
                bound_args = signature.bind(*args, **kwargs)
                params = ", ".join(
                    f"{name}={_short_repr(value)}"
                    for name, value in bound_args.arguments.items() if name != "self"
                )
                logger.log(level_value, "call start - %s(%s)", func_name, params)

            try:
                result = func(*args, **kwargs)
            except Exception as e:
                logger.log(
                    level_value, "call failed - %s: %s: %s (%.4fs)",
                    func_name, type(e).__name__, e, time.perf_counter() - start_time,
                )
                raise

            elapsed = time.perf_counter() - start_time
            if model == "simple":
                logger.log(level_value, "call ok - %s (%.4fs)", func_name, elapsed)
            else:
                logger.log(level_value, "call ok - %s -> %s (%.4fs)", func_name, _short_repr(result), elapsed)
            return result

        return wrapper
    return decorator


def logger_wrapper(level: LEVEL_LITERAL = "INFO", model: MODEL_LITERAL = "default") -> Callable:
    """日志装饰器，使用单例logger

    Example:
        >>> @logger_wrapper(level='INFO_STORE', model='simple')
        ... def load_readings(path):
        ...     ...
    """
    def decorator(func: Callable) -> Callable:
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            # 运行时获取单例logger，避免导入时初始化
            return logger_wrapper_multi(get_logger(), level, model)(func)(*args, **kwargs)
        return wrapper
    return decorator


def create_logger_wrapper(logger: EnhancedLogger) -> Callable:
    """创建一个使用指定logger实例的logger_wrapper装饰器工厂

    Example:
        >>> netprobe_logger = get_logger("multi", "netprobe")
        >>> netprobe_wrapper = create_logger_wrapper(netprobe_logger)
        >>> @netprobe_wrapper(level='INFO_NETPROBE')
        ... def scan(targets, ports):
        ...     ...
    """
    def logger_wrapper_factory(level: LEVEL_LITERAL = "INFO", model: MODEL_LITERAL = "default") -> Callable:
        return logger_wrapper_multi(logger, level, model)
    return logger_wrapper_factory
