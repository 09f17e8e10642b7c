"""Meta-path triple embeddings for heterogeneous information networks."""

import json

from ._mshine import (
    DataError,
    DivergenceError,
    __version__,
    decompose,
    embeddings,
    eval_classify,
    eval_link,
    export,
    main,
    metapath_ids,
    select_for_schema,
    select_metapaths,
)
from ._mshine import train as _train


def train(nodes, edges, out, log, **config):
    """Train a model and return the run manifest as a dict."""
    return json.loads(_train(str(nodes), str(edges), str(out), str(log), **config))


__all__ = [
    "DataError",
    "DivergenceError",
    "__version__",
    "decompose",
    "embeddings",
    "eval_classify",
    "eval_link",
    "export",
    "main",
    "metapath_ids",
    "select_for_schema",
    "select_metapaths",
    "train",
]
