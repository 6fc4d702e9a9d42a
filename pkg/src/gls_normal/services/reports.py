"""
Rendering of report tables as CSV or JSON text.
"""

import json
from typing import Any

import pandas as pd

from gls_normal.exceptions import FormatError


def frame_to_csv(frame: pd.DataFrame) -> str:
    """CSV with a header row and Unix line endings."""
    return frame.to_csv(index=False, lineterminator='\n')


def frame_to_json(frame: pd.DataFrame) -> str:
    return frame.to_json(orient='records', indent=2) + '\n'


def to_json_text(payload: Any) -> str:
    return json.dumps(payload, indent=2) + '\n'


def render_frame(frame: pd.DataFrame, fmt: str) -> str:
    """Render a table in one of the report formats ('csv' or 'json')."""
    if fmt == 'csv':
        return frame_to_csv(frame)
    if fmt == 'json':
        return frame_to_json(frame)
    raise FormatError(f'unknown report format: {fmt!r}')
