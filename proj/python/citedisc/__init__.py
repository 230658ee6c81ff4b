# Copyright 2026 The citedisc Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Citation discovery: relation-based retrieval and LLM citation selection."""

import json
import os

from ._core import (
    ConfigError,
    DatasetError,
    Document,
    Error,
    IoError,
    QueryInstance,
    TransportError,
    __version__,
    aggregate,
    build_citation_prompt,
    build_extraction_prompt,
    dense_retrieve_topk,
    f1,
    hashed_embedding,
    load_dataset,
    parse_cited_ids,
    parse_triples,
    render_relation_query,
    retrieve_topk,
    run_cli,
    score_query,
    tokenize,
    write_dataset,
)
from ._core import _Gateway, _predict


class Gateway:
    """LLM gateway built from a config dict (mock script or remote endpoint)."""

    def __init__(self, config, base_dir=""):
        self._impl = _Gateway(json.dumps(config), os.fspath(base_dir))

    def complete(self, user_text, system_text=None):
        return self._impl.complete(user_text, system_text)

    @property
    def call_count(self):
        return self._impl.call_count

    @property
    def backend_id(self):
        return self._impl.backend_id


def predict(instance, retriever="relation", k=20, mode="pipeline", gateway=None, embed_dim=256):
    """Runs retrieval and, in pipeline mode, LLM selection for one instance.

    Returns a dict with query_id, predicted, retrieved and warnings.
    """
    impl = gateway._impl if gateway is not None else None
    return json.loads(_predict(instance, retriever, k, mode, impl, embed_dim))


__all__ = [
    "ConfigError",
    "DatasetError",
    "Document",
    "Error",
    "Gateway",
    "IoError",
    "QueryInstance",
    "TransportError",
    "aggregate",
    "build_citation_prompt",
    "build_extraction_prompt",
    "dense_retrieve_topk",
    "f1",
    "hashed_embedding",
    "load_dataset",
    "parse_cited_ids",
    "parse_triples",
    "predict",
    "render_relation_query",
    "retrieve_topk",
    "run_cli",
    "score_query",
    "tokenize",
    "write_dataset",
]
