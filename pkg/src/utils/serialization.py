"""
Canonical JSON encoding of reports

Identical inputs give byte-identical output: keys are sorted, rationals
are written as "p/q" strings, floats as their shortest round-trip repr
and numpy arrays as nested lists.
"""

import json
import math
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np


def to_jsonable(obj: Any) -> Any:
    """Recursively convert report data into plain JSON values"""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if not math.isfinite(value):
            return repr(value)
        return value
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()] if obj.dtype != object else [to_jsonable(v) for v in obj]
    if isinstance(obj, dict):
        return {str(to_jsonable(k)): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, Path):
        return str(obj)
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    raise TypeError(f"Cannot serialize {type(obj).__name__}")


def dumps_canonical(obj: Any) -> str:
    """Deterministic JSON text with a trailing newline"""
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_canonical(obj: Any, path: Optional[Union[str, Path]] = None) -> str:
    """Serialize obj and write it to path when given; returns the text"""
    text = dumps_canonical(obj)
    if path is not None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    return text
