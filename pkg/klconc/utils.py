"""Utility functions and classes for klconc."""
import csv
import io
import json
import math
from typing import Any, Iterable, Mapping, Sequence

import numpy as np
from tqdm import tqdm


class ProgressBar(tqdm):
    """tqdm bar on stderr that stays silent at verbosity 0.

    Pass `verbosity=` (the command's -v count) instead of `disable=`.
    """

    def __init__(self, *args, **kwargs):
        """Construct a progress bar."""
        kwargs.setdefault("bar_format", "{desc}: {percentage:3.0f}%|{bar}| {n_fmt}/{total_fmt} {unit} [{elapsed}]")
        kwargs.setdefault("leave", False)
        if "verbosity" in kwargs:
            kwargs["disable"] = kwargs.pop("verbosity") < 1
        super().__init__(*args, **kwargs)


def _encode(value: Any) -> str:
    """Encode one value as canonical JSON text."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return '"nan"'
        if math.isinf(value):
            return '"inf"' if value > 0 else '"-inf"'
        text = format(value, ".17g")
        # Keep a float a float on the wire: 1 -> 1.0, 1e+20 stays as is.
        if all(char not in text for char in ".en"):
            text += ".0"
        return text
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, Mapping):
        items = sorted((str(key), item) for key, item in value.items())
        return "{" + ", ".join(f"{json.dumps(key)}: {_encode(item)}" for key, item in items) + "}"
    if isinstance(value, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_encode(item) for item in value) + "]"
    raise TypeError(f"Cannot encode {type(value).__name__} as canonical JSON")


def canonical_json(value: Any) -> str:
    """Render `value` as canonical JSON.

    Keys are sorted, floats carry 17 significant digits and non-finite floats become the strings
    "inf", "-inf" and "nan", so identical runs produce byte-identical output.
    """
    return _encode(value) + "\n"


def csv_rows(header: Sequence[str], rows: Iterable[Mapping[str, Any]]) -> str:
    """Render rows as RFC-4180 CSV with a header row."""
    sio = io.StringIO()
    writer = csv.writer(sio, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_cell(row.get(column)) for column in header])
    return sio.getvalue()


def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return _encode(float(value)).strip('"')
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    return str(value)
