"""
统一日志模块

各模块统一使用 logging.getLogger(__name__)；CLI 入口调用 setup_logging
把日志同时写到终端与 <output_dir>/run.log。
"""

import logging
import sys
from pathlib import Path

# 日志格式
LOG_FORMAT = "%(asctime)s | %(levelname)-8s | %(name)s | %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

# 全局配置标志
_configured = False


def setup_logging(
    level: int | str = logging.INFO,
    log_file: str | Path | None = None,
    format_string: str = LOG_FORMAT,
    force: bool = False,
) -> None:
    """
    配置全局日志

    Args:
        level: 日志级别，可传 "DEBUG" 之类的名称
        log_file: 日志文件路径 (可选)
        format_string: 日志格式
        force: 已配置时是否重新配置（CLI 每次运行输出目录可能不同）
    """
    global _configured

    if _configured and not force:
        return

    if isinstance(level, str):
        level = logging.getLevelName(level.upper())

    handlers: list[logging.Handler] = [logging.StreamHandler(sys.stdout)]

    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_path, encoding="utf-8"))

    logging.basicConfig(
        level=level,
        format=format_string,
        datefmt=DATE_FORMAT,
        handlers=handlers,
        force=force,
    )
    # 第三方库的调试输出太多
    for noisy in ("matplotlib", "PIL", "langgraph"):
        logging.getLogger(noisy).setLevel(max(level, logging.WARNING))

    _configured = True
