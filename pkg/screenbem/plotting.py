# -*- coding: utf-8 -*-
"""
Log-scale line plots of result tables.

Output is byte-for-byte reproducible: the SVG id salt is fixed and the
date stamp is dropped. The table's config header is stored as the SVG
description.

"""
import json
import logging

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from screenbem.exc import ScreenBemValidationError  # noqa: E402
from screenbem.utils import read_table  # noqa: E402

logger = logging.getLogger(__name__)

MARKERS = ("o", "s", "^", "v", "D", "x")


def emit_plot(csv_path, x, ys, out_path=None, title=None, group=None):
    """Plot columns of a table against ``x`` on log-log axes.

    Args:
        csv_path (str): Table written by :func:`screenbem.utils.write_table`.
        x (str): Abscissa column.
        ys (list): Ordinate columns, one series each.
        out_path (str): SVG file, defaults to ``csv_path`` with ``.svg``.
        title (str): Optional plot title.
        group (str): Optional column splitting every series by its value.

    Returns:
        The SVG path.

    Raises:
        ScreenBemValidationError: the table is empty or lacks a column.

    """
    config, columns, rows = read_table(csv_path)
    if not rows:
        raise ScreenBemValidationError("{0} has no data rows.".format(csv_path))
    wanted = [x] + list(ys) + ([group] if group else [])
    missing = [c for c in wanted if c not in columns]
    if missing:
        raise ScreenBemValidationError(
            "{0} lacks columns {1}; has {2}.".format(csv_path, missing, columns)
        )
    table = {c: [r[k] for r in rows] for k, c in enumerate(columns)}
    xs = np.array(table[x], dtype=float)
    keys = table[group] if group else ["" for _ in rows]
    out_path = out_path or csv_path.rsplit(".", 1)[0] + ".svg"

    matplotlib.rcParams["svg.hashsalt"] = "screenbem"
    fig, ax = plt.subplots(figsize=(6, 4.5))
    series = 0
    for key in sorted(set(keys), key=keys.index):
        sel = np.array([k == key for k in keys])
        order = np.argsort(xs[sel], kind="stable")
        for name in ys:
            values = np.array(table[name], dtype=float)[sel][order]
            label = name if not group else "{0} ({1}={2})".format(name, group, key)
            ax.loglog(
                xs[sel][order],
                values,
                marker=MARKERS[series % len(MARKERS)],
                label=label,
            )
            series += 1
    ax.set_xlabel(x)
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", linewidth=0.3)
    if series > 1:
        ax.legend()
    fig.tight_layout()
    fig.savefig(
        out_path,
        format="svg",
        metadata={"Date": None, "Description": json.dumps(config, sort_keys=True)},
    )
    plt.close(fig)
    logger.debug("Wrote plot {0} ({1} series)".format(out_path, series))
    return out_path
