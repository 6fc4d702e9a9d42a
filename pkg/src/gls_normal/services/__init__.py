"""
Services package for gls-normal.

Contains the file formats (digit streams, schedule sidecars) and report rendering.
"""

from gls_normal.services.file_formats import (
    atomic_write,
    decode_varint,
    dump_schedule,
    encode_varint,
    load_schedule,
    read_digits,
)
from gls_normal.services.reports import render_frame, to_json_text

__all__ = [
    'atomic_write',
    'decode_varint',
    'dump_schedule',
    'encode_varint',
    'load_schedule',
    'read_digits',
    'render_frame',
    'to_json_text',
]
