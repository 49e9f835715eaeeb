"""事件日志 events.jsonl，每行一个 DetectionEvent"""

import os
from pathlib import Path
from typing import Iterable, List

from pydantic import ValidationError

from ..detector.models import DetectionEvent
from ..exceptions import CorruptionError, NotFoundError
from .reading_log import logger, parse_error_reason, split_records


def event_line(event: DetectionEvent) -> str:
    return event.model_dump_json()


def append_events(path: str | Path, events: Iterable[DetectionEvent]) -> int:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    written = 0
    with open(path, "a", encoding="utf-8") as f:
        for event in events:
            f.write(event_line(event) + "\n")
            written += 1
        f.flush()
        os.fsync(f.fileno())
    return written


def save_events(path: str | Path, events: Iterable[DetectionEvent]) -> int:
    """覆盖写入"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("", encoding="utf-8")
    return append_events(path, events)


def load_events(path: str | Path) -> List[DetectionEvent]:
    path = Path(path)
    if not path.exists():
        raise NotFoundError(f"Event log {path} does not exist")
    body, ends_cleanly = split_records(path.read_bytes())
    events: List[DetectionEvent] = []
    for offset, line in enumerate(body):
        if not line.strip():
            continue
        try:
            events.append(DetectionEvent.model_validate_json(line.decode("utf-8")))
        except (ValidationError, UnicodeDecodeError) as e:
            if not ends_cleanly and offset == len(body) - 1:
                logger.warning("%s: skipping truncated final line %d", path, offset + 1)
                break
            raise CorruptionError(f"{path}: unparseable event: {parse_error_reason(e)}", line_no=offset + 1) from e
    return events
