# -*- coding: utf-8 -*-
import csv
import json

import numpy as np


def format_float(value):
    """Format a real number in scientific notation with 17 significant digits.

    Args:
        value (float): The number to format.

    Returns:
        String representation, e.g. ``1.0000000000000000e-01``.

    """
    return "{0:.16e}".format(float(value))


def json_header(config, prefix="# "):
    """Serialize a configuration dictionary to a one-line header.

    Keys are sorted so that identical configurations give identical bytes.

    Args:
        config (dict): JSON serializable configuration.
        prefix (str): Prepended to the JSON text.

    Returns:
        The header line, without trailing newline.

    """
    return prefix + json.dumps(config, sort_keys=True, separators=(",", ":"))


def loglog_slope(x, y):
    """Least squares slope of ``log(y)`` against ``log(x)``.

    Args:
        x: Positive abscissae.
        y: Positive ordinates.

    Returns:
        The fitted slope as a float.

    """
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.asarray(y, dtype=float))
    slope, _ = np.polyfit(lx, ly, 1)
    return float(slope)


def chunks(n, size):
    """Split ``range(n)`` into consecutive ``(start, stop)`` blocks of at most ``size``."""
    size = max(int(size), 1)
    return [(i, min(i + size, n)) for i in range(0, n, size)]


class DisjointSet(object):
    """Union-find over the integers ``0..n-1`` with path halving."""

    def __init__(self, n):
        self._parent = list(range(n))

    def find(self, a):
        parent = self._parent
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra
        # Smaller root wins, keeps component labels deterministic.
        if rb < ra:
            ra, rb = rb, ra
        self._parent[rb] = ra
        return ra

    def groups(self, members):
        """Group ``members`` by their root.

        Returns:
            List of sorted member lists, ordered by their smallest member.

        """
        out = {}
        for m in members:
            out.setdefault(self.find(m), []).append(m)
        return sorted((sorted(g) for g in out.values()), key=lambda g: g[0])


def write_table(path, config, columns, rows):
    """Write a CSV table preceded by a one-line JSON config comment.

    Numbers are written with :func:`format_float`, other values as ``str``.

    Args:
        path (str): Output file.
        config (dict): Embedded as the ``# {...}`` header line.
        columns (list): Column names.
        rows (iterable): Sequences of values, one per row.

    """
    with open(path, "w", newline="") as f:
        f.write(json_header(config) + "\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow(
                [
                    format_float(v) if isinstance(v, (float, np.floating)) else str(v)
                    for v in row
                ]
            )


def read_table(path):
    """Read a table written by :func:`write_table`.

    Returns:
        Tuple ``(config, columns, rows)`` with ``rows`` a list of string lists.

    """
    with open(path, "r", newline="") as f:
        lines = f.read().splitlines()
    config = {}
    if lines and lines[0].startswith("#"):
        config = json.loads(lines[0][1:].strip() or "{}")
        lines = lines[1:]
    records = list(csv.reader(lines))
    if not records:
        return config, [], []
    return config, records[0], records[1:]
