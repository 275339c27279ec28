# Copyright 2026 The guivec Authors.
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

"""GUI screen embeddings: corpus parsing, model training and embedding queries."""

from guivec._guivec import (
    Corpus,
    DegenerateScreen,
    DimensionMismatch,
    EmbeddingStore,
    EmptyCorpus,
    Error,
    FingerprintMismatch,
    MalformedDocument,
    ModelBundle,
    QueryService,
    Screen,
    SyntheticCorpus,
    Trace,
    UnknownScreenId,
    build_store,
    classify,
    embed_text,
    evaluate_predictions,
    load_corpus,
    make_synthetic_corpus,
    normalize_text,
    parse_screen,
    render_layout,
    run_cli,
    write_synthetic_corpus,
)

__all__ = [
    "Corpus",
    "DegenerateScreen",
    "DimensionMismatch",
    "EmbeddingStore",
    "EmptyCorpus",
    "Error",
    "FingerprintMismatch",
    "MalformedDocument",
    "ModelBundle",
    "QueryService",
    "Screen",
    "SyntheticCorpus",
    "Trace",
    "UnknownScreenId",
    "build_store",
    "classify",
    "embed_text",
    "evaluate_predictions",
    "load_corpus",
    "make_synthetic_corpus",
    "normalize_text",
    "parse_screen",
    "render_layout",
    "run_cli",
    "write_synthetic_corpus",
]
