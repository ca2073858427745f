"""Sparse Naive Bayes with dependence-guided feature selection."""

import json

from ._core import (
    SnbError,
    UsageError,
    __version__,
    auc,
    cluster,
    dependence,
    mdlp_cuts,
    mutual_information,
    synth_blocks,
    synth_pair,
)
from ._core import select as _select


def select(data, **kwargs):
    """Run cross-validated selection on a CSV file and return the report as a dict."""
    return json.loads(_select(str(data), **kwargs))


__all__ = [
    "SnbError",
    "UsageError",
    "__version__",
    "auc",
    "cluster",
    "dependence",
    "mdlp_cuts",
    "mutual_information",
    "select",
    "synth_blocks",
    "synth_pair",
]
