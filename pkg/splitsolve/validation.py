"""
Utility functions for validating command-line values and output paths.
"""

import re
from pathlib import Path
from typing import List, Tuple

from .exceptions import ConfigurationError

_POWER_PATTERN = re.compile(r'^\s*(\d+)\s*\^\s*(\d+)\s*$')


def parse_size(text: str) -> int:
    """
    Parse a problem size such as "32" or the squared form "32^2".

    Args:
        text: Size as written on the command line

    Returns:
        The size as a positive integer

    Raises:
        ConfigurationError: If the value is not a positive integer
    """
    text = str(text).strip()
    match = _POWER_PATTERN.match(text)
    try:
        value = int(match.group(1)) ** int(match.group(2)) if match else int(text)
    except ValueError:
        raise ConfigurationError(f"Invalid size {text!r}: expected an integer or 'k^p'")
    if value < 1:
        raise ConfigurationError(f"Invalid size {text!r}: must be >= 1")
    return value


def parse_size_list(text: str) -> List[int]:
    """Parse a comma-separated size list like "32,64" or "32^2,64^2"."""
    items = [item for item in (text or "").split(",") if item.strip()]
    if not items:
        raise ConfigurationError("Size list is empty")
    return [parse_size(item) for item in items]


def parse_grid(text: str) -> Tuple[float, float, float]:
    """
    Parse an alpha grid "lo:hi:step".

    Raises:
        ConfigurationError: If the grid is malformed or 0 < lo < hi, step > 0 fails
    """
    parts = (text or "").split(":")
    if len(parts) != 3:
        raise ConfigurationError(f"Invalid grid {text!r}: expected lo:hi:step")
    try:
        lo, hi, step = (float(part) for part in parts)
    except ValueError:
        raise ConfigurationError(f"Invalid grid {text!r}: bounds must be numbers")
    if not (0.0 < lo < hi) or step <= 0.0:
        raise ConfigurationError(f"Invalid grid {text!r}: need 0 < lo < hi and step > 0")
    return lo, hi, step


def check_size_cap(example: str, size: int, cap: int, allow_large: bool = False) -> None:
    """
    Reject sizes above the desk-scale cap unless explicitly allowed.

    The cap bounds the mesh parameter m; Example 4 and synthetic problems are
    sized by their order n and compare against cap^2.
    """
    if allow_large:
        return
    limit = cap if example in ("1", "2", "3") else cap * cap
    if size > limit:
        raise ConfigurationError(
            f"Size {size} exceeds the cap {limit} for example {example}; pass --allow-large to run it"
        )


def sanitize_filename(filename: str) -> str:
    """
    Sanitize a file name to prevent path traversal.

    Args:
        filename: File name to sanitize

    Returns:
        Safe file name
    """
    if not filename:
        return "untitled"

    sanitized = re.sub(r'[<>:"/\\|?*\x00-\x1f]', '_', filename)
    if sanitized in (".", ".."):
        sanitized = sanitized.replace(".", "_")
    return sanitized[:255]


def safe_path_join(base_path: str, *paths: str) -> Path:
    """
    Join paths below `base_path`, refusing anything that escapes it.

    Raises:
        ConfigurationError: If the resulting path leaves the base directory
    """
    base = Path(base_path).resolve()
    result = base
    for path in paths:
        result = result / sanitize_filename(path)

    try:
        result.resolve().relative_to(base)
    except ValueError:
        raise ConfigurationError(f"Unsafe path detected: {result}")
    return result
