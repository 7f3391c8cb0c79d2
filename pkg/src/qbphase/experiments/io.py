"""Tab-separated result tables with a ``# key=value`` header block.

Layout::

    # model=two_level
    # ...                  (every config field, then summary.<key> lines)
    t<TAB>pop_0<TAB>...    (column header row)
    0<TAB>1<TAB>...        (values, 17 significant digits)

17 significant digits round-trip every double, so re-reading a table gives
back the exact arrays and a rerun can be compared byte for byte.
"""

import os

import numpy as np

from .config import config_items

FLOAT_FORMAT = "%.17g"


def format_table(result):
    lines = [f"# {key}={text}" for key, text in config_items(result.config)]
    lines += [f"# summary.{key}={_fmt(val)}" for key, val in result.summary.items()]
    names = list(result.columns)
    lines.append("\t".join(names))
    data = np.column_stack([np.asarray(result.columns[n], dtype=float) for n in names])
    for row in data:
        lines.append("\t".join(FLOAT_FORMAT % v for v in row))
    return "\n".join(lines) + "\n"


def _fmt(val):
    if isinstance(val, float):
        return FLOAT_FORMAT % val
    return str(val)


def write_table(result, path):
    """Write ``result`` to ``path`` (directories are created); returns the path."""
    folder = os.path.dirname(os.fspath(path))
    if folder:
        os.makedirs(folder, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_table(result))
    return path


def read_table(path):
    """Return ``(header, columns)``: header as a ``str -> str`` dict, columns as arrays."""
    header, rows, names = {}, [], None
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                header[key] = val
            elif names is None:
                names = line.split("\t")
            elif line:
                rows.append([float(x) for x in line.split("\t")])
    if names is None:
        raise ValueError(f"{path}: no column header row")
    data = np.array(rows, dtype=float).reshape(-1, len(names))
    return header, {n: data[:, k] for k, n in enumerate(names)}
