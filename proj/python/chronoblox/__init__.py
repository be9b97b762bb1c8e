"""Chronophotographic layout of graph sequences."""

import json

from ._core import (
    generate_scenario,
    hhi_keep_mask,
    jaccard,
    louvain,
    pacmap,
    parse_sequence,
    pca_axis,
)
from ._core import run as _run
from ._core import validate_artifact as _validate_artifact

__all__ = [
    "generate_scenario",
    "hhi_keep_mask",
    "jaccard",
    "louvain",
    "pacmap",
    "parse_sequence",
    "pca_axis",
    "run",
    "validate_artifact",
]


def run(edges, format="csv", partitions=None, metadata=None, config=None):
    """Run the full pipeline and return the artifact as a dict."""
    text = _run(edges, format, partitions, metadata, json.dumps(config) if config else "")
    return json.loads(text)


def validate_artifact(artifact):
    """Return the list of invariant violations of an artifact dict or JSON string."""
    if not isinstance(artifact, str):
        artifact = json.dumps(artifact)
    return _validate_artifact(artifact)
