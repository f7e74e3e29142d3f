"""Formatting helpers for the fixed CSV/JSON output conventions.

All real numbers in emitted artifacts carry 17 significant digits, and JSON
reals are serialised as decimal strings so that round-tripping is exact.
"""

import json


def fmt17(x):
    """Format a real with 17 significant digits."""
    return format(float(x), ".17g")


def json_dumps(obj):
    """Serialise an already-stringified document with stable layout."""
    return json.dumps(obj, indent=2) + "\n"


def write_text(path, text):
    with open(path, "w", newline="") as fh:
        fh.write(text)
