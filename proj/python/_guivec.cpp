// Copyright 2026 The guivec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "guivec/cli.hpp"
#include "guivec/error.hpp"
#include "guivec/pipeline.hpp"
#include "guivec/service.hpp"
#include "guivec/synthetic.hpp"

namespace py = pybind11;
using namespace guivec;

namespace {

QueryOptions make_options(const std::string& similarity, const std::string& space) {
  return {similarity_from_name(similarity), space_from_name(space)};
}

py::list neighbors_to_list(const QueryResult& r) {
  py::list out;
  for (const Neighbor& n : r) out.append(py::make_tuple(n.id, n.score));
  return out;
}

Eigen::MatrixXf bitmap_array(const LayoutBitmap& b) {
  Eigen::MatrixXf m(b.grid().height, b.grid().width);
  for (int y = 0; y < b.grid().height; ++y) {
    for (int x = 0; x < b.grid().width; ++x) m(y, x) = b.at(x, y);
  }
  return m;
}

}  // namespace

PYBIND11_MODULE(_guivec, m) {
  m.doc() = "GUI screen embeddings: corpus parsing, model training and embedding queries";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<MalformedDocument>(m, "MalformedDocument", base.ptr());
  py::register_exception<UnknownScreenId>(m, "UnknownScreenId", base.ptr());
  py::register_exception<DimensionMismatch>(m, "DimensionMismatch", base.ptr());
  py::register_exception<FingerprintMismatch>(m, "FingerprintMismatch", base.ptr());
  py::register_exception<DegenerateScreen>(m, "DegenerateScreen", base.ptr());
  py::register_exception<EmptyCorpus>(m, "EmptyCorpus", base.ptr());

  py::class_<GuiScreen>(m, "Screen")
      .def_readonly("screen_id", &GuiScreen::screen_id)
      .def_readonly("app_id", &GuiScreen::app_id)
      .def_property_readonly("num_nodes", [](const GuiScreen& s) { return s.nodes.size(); })
      .def_property_readonly("texts",
                             [](const GuiScreen& s) {
                               std::vector<std::string> out;
                               for (const GuiComponent& c : s.nodes) {
                                 if (c.text) out.push_back(*c.text);
                               }
                               return out;
                             })
      .def_property_readonly("categories", [](const GuiScreen& s) {
        std::vector<std::string> out;
        for (NodeId id : s.embeddable) out.emplace_back(category_name(s.node(id).category));
        return out;
      });

  py::class_<InteractionTrace>(m, "Trace")
      .def_readonly("trace_id", &InteractionTrace::trace_id)
      .def_readonly("app_id", &InteractionTrace::app_id)
      .def_readonly("screens", &InteractionTrace::screens);

  py::class_<Corpus>(m, "Corpus")
      .def_readonly("screens", &Corpus::screens)
      .def_readonly("traces", &Corpus::traces)
      .def("screen", &Corpus::screen, py::return_value_policy::reference_internal)
      .def("description_of", &Corpus::description_of);

  m.def(
      "load_corpus",
      [](const std::filesystem::path& root, std::optional<std::filesystem::path> metadata) {
        return load_corpus(root, metadata);
      },
      py::arg("root"), py::arg("metadata") = py::none());
  m.def(
      "parse_screen",
      [](const std::string& document, const std::string& screen_id) {
        ParseOptions opts;
        opts.screen_id = screen_id;
        return parse_screen(nlohmann::json::parse(document), opts);
      },
      py::arg("document"), py::arg("screen_id") = "");
  m.def(
      "classify",
      [](const std::string& class_name, bool editable, bool clickable, bool has_text) {
        return std::string(category_name(classify_component(class_name, editable, clickable, has_text, {})));
      },
      py::arg("class_name"), py::arg("editable") = false, py::arg("clickable") = false,
      py::arg("has_text") = false);

  py::class_<SyntheticCorpus>(m, "SyntheticCorpus")
      .def_readonly("corpus", &SyntheticCorpus::corpus)
      .def_readonly("screen_type", &SyntheticCorpus::screen_type)
      .def_readonly("screen_app", &SyntheticCorpus::screen_app)
      .def_property_readonly("tasks", [](const SyntheticCorpus& s) {
        py::list out;
        for (const SyntheticTask& t : s.tasks) out.append(py::make_tuple(t.name, t.variant_a, t.variant_b));
        return out;
      });
  m.def(
      "make_synthetic_corpus",
      [](int apps, std::uint64_t seed) { return make_synthetic_corpus({apps, seed}); },
      py::arg("apps") = 20, py::arg("seed") = 7);
  m.def("write_synthetic_corpus", &write_synthetic_corpus, py::arg("synthetic"), py::arg("root"));

  m.def("normalize_text", &normalize_text);
  m.def("embed_text", [](const std::string& text) { return fallback_embed(text).values(); });
  m.def("render_layout", [](const GuiScreen& s) { return bitmap_array(render_layout(s)); });

  py::class_<ModelBundle>(m, "ModelBundle")
      .def_static("load", &ModelBundle::load, py::arg("directory"))
      .def(
          "embed_screen",
          [](const ModelBundle& b, const GuiScreen& s, const std::string& description,
             const std::string& text_provider) {
            const auto provider = make_text_provider(text_provider);
            const ScreenInput in = prepare_screen(s, *provider, b.components, b.autoencoder);
            return embed_screen(in, provider->embed(description).values(), b.screen).full;
          },
          py::arg("screen"), py::arg("description") = "", py::arg("text_provider") = "fallback")
      .def(
          "fingerprint",
          [](const ModelBundle& b, const std::string& text_provider) {
            return b.fingerprint(*make_text_provider(text_provider));
          },
          py::arg("text_provider") = "fallback");

  py::class_<EmbeddingStore>(m, "EmbeddingStore")
      .def_static("load", &EmbeddingStore::load, py::arg("path"))
      .def("save", &EmbeddingStore::save, py::arg("path"))
      .def("__len__", &EmbeddingStore::size)
      .def("__contains__", &EmbeddingStore::contains)
      .def_property_readonly("dim", &EmbeddingStore::dim)
      .def_property_readonly("content_dim", &EmbeddingStore::content_dim)
      .def_property_readonly("fingerprint", &EmbeddingStore::fingerprint)
      .def_property_readonly("ids",
                             [](const EmbeddingStore& s) {
                               std::vector<std::string> ids;
                               for (const StoreEntry& e : s.entries()) ids.push_back(e.id);
                               return ids;
                             })
      .def("vector", py::overload_cast<const std::string&>(&EmbeddingStore::vector, py::const_))
      .def(
          "nearest",
          [](const EmbeddingStore& s, const Eigen::VectorXd& q, std::size_t k, const std::string& similarity,
             const std::string& space) {
            return neighbors_to_list(nearest_neighbors(q, k, s, make_options(similarity, space)));
          },
          py::arg("query"), py::arg("k") = 10, py::arg("similarity") = "cosine", py::arg("space") = "full")
      .def(
          "compose",
          [](const EmbeddingStore& s, const std::vector<std::string>& plus, const std::vector<std::string>& minus) {
            std::vector<ComposeTerm> terms;
            for (const auto& id : plus) terms.push_back({1, s.vector(id)});
            for (const auto& id : minus) terms.push_back({-1, s.vector(id)});
            return compose(terms);
          },
          py::arg("plus"), py::arg("minus") = std::vector<std::string>{})
      .def(
          "embed_task", [](const EmbeddingStore& s, const std::vector<std::string>& ids) { return embed_task(ids, s); },
          py::arg("screen_ids"));

  m.def(
      "build_store",
      [](const Corpus& corpus, const ModelBundle& models, const std::string& text_provider) {
        return build_store(corpus, *make_text_provider(text_provider), models);
      },
      py::arg("corpus"), py::arg("models"), py::arg("text_provider") = "fallback");

  m.def(
      "evaluate_predictions",
      [](const std::vector<std::pair<Eigen::VectorXd, std::string>>& predictions, const EmbeddingStore& store,
         const std::string& similarity, const std::string& space) {
        std::vector<Prediction> preds;
        for (const auto& [v, id] : predictions) preds.push_back({v, id});
        EvaluationOptions opts;
        opts.query = make_options(similarity, space);
        return evaluate_predictions(preds, store, opts).dump();
      },
      py::arg("predictions"), py::arg("store"), py::arg("similarity") = "cosine", py::arg("space") = "full");

  py::class_<QueryService>(m, "QueryService")
      .def(py::init<EmbeddingStore>())
      .def(
          "handle",
          [](const QueryService& s, const std::string& method, const std::string& target, const std::string& body) {
            const HttpResponse r = s.handle(method, target, body);
            return py::make_tuple(r.status, r.body);
          },
          py::arg("method"), py::arg("target"), py::arg("body") = "");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out;
        std::ostringstream err;
        int code;
        {
          py::gil_scoped_release release;
          code = run_cli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
