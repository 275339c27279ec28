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

#include "guivec/cli.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>

#include "CLI11.hpp"
#include "guivec/error.hpp"
#include "guivec/pipeline.hpp"
#include "guivec/service.hpp"
#include "guivec/synthetic.hpp"
#include "guivec/util.hpp"
#include "httplib.h"
#include "json.hpp"

namespace guivec {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

class UsageError : public Error {
 public:
  using Error::Error;
};

struct Options {
  std::string output = "guivec-out";
  std::uint64_t seed = 0;
  std::string text_provider = "fallback";
  bool quiet = false;

  std::string corpus;
  std::string metadata;
  std::string models;
  std::string store;

  AutoencoderTrainingConfig autoencoder;
  ComponentTrainingConfig component;
  std::string component_metric = "euclidean";
  ScreenTrainingConfig screen;

  std::vector<std::string> query_screens;
  std::string query_vector;
  std::vector<std::string> plus;
  std::vector<std::string> minus;
  std::size_t k = 10;
  std::string space = "full";
  std::string similarity = "cosine";

  std::string predictions;
  bool table = false;

  std::string host = "127.0.0.1";
  int port = 8080;
  std::string static_dir;

  std::string synth_dir;
  int synth_apps = 20;
};

std::uint64_t hash_path(const fs::path& p) {
  if (fs::is_regular_file(p)) return fnv1a64(read_file(p));
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(p)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::uint64_t h = fnv1a64("");
  for (const fs::path& f : files) {
    h = fnv1a64(fs::relative(f, p).generic_string(), h);
    h = fnv1a64(read_file(f), h);
  }
  return h;
}

// Records what a run read and wrote so it can be repeated exactly.
class Manifest {
 public:
  Manifest(std::string command, const std::vector<std::string>& args, const Options& opt)
      : command_(std::move(command)), args_(args), seed_(opt.seed), provider_(opt.text_provider) {}

  void input(const std::string& role, const fs::path& p) {
    inputs_.push_back({{"role", role}, {"path", p.generic_string()}, {"fnv1a64", to_hex(hash_path(p))}});
  }
  void artifact(const fs::path& p) {
    const std::string bytes = read_file(p);
    artifacts_.push_back(
        {{"path", p.generic_string()}, {"bytes", bytes.size()}, {"fnv1a64", to_hex(fnv1a64(bytes))}});
  }
  void config(json c) { config_ = std::move(c); }

  void write(const fs::path& output_dir) const {
    json j = {{"tool", "guivec"},
              {"version", kVersion},
              {"command", command_},
              {"args", args_},
              {"seed", seed_},
              {"text_provider", provider_},
              {"config", config_},
              {"inputs", inputs_},
              {"artifacts", artifacts_}};
    write_file(output_dir / ("manifest." + command_ + ".json"), j.dump(2) + "\n");
  }

 private:
  std::string command_;
  std::vector<std::string> args_;
  std::uint64_t seed_;
  std::string provider_;
  json config_ = json::object();
  json inputs_ = json::array();
  json artifacts_ = json::array();
};

Corpus read_corpus(const Options& opt, Manifest& m) {
  m.input("corpus", opt.corpus);
  std::optional<fs::path> csv;
  if (!opt.metadata.empty()) {
    csv = fs::path(opt.metadata);
    m.input("metadata", *csv);
  }
  Corpus corpus = load_corpus(opt.corpus, csv);
  if (corpus.screens.empty()) throw EmptyCorpus("no screens found under " + opt.corpus);
  return corpus;
}

fs::path models_dir(const Options& opt) { return opt.models.empty() ? fs::path(opt.output) : fs::path(opt.models); }
fs::path store_path(const Options& opt) {
  return opt.store.empty() ? fs::path(opt.output) / kStoreFile : fs::path(opt.store);
}

void write_json_artifact(const fs::path& path, const json& j, Manifest& m) {
  write_file(path, j.dump(2) + "\n");
  m.artifact(path);
}

void save_checkpoint(const Checkpoint& ckpt, const fs::path& path, Manifest& m) {
  ckpt.save(path);
  m.artifact(path);
}

void check_provider(const Checkpoint& ckpt, const TextProvider& provider, const std::string& what) {
  if (!ckpt.header.contains("text_provider_id")) return;
  const std::string expected = ckpt.header.at("text_provider_id").get<std::string>();
  if (expected != provider.describe()) {
    throw FingerprintMismatch(what + " was trained with text provider " + expected + ", current is " +
                              provider.describe());
  }
}

// ---- commands --------------------------------------------------------------

int cmd_ingest(const Options& opt, Manifest& m, std::ostream& out) {
  const Corpus corpus = read_corpus(opt, m);
  std::set<std::string> apps;
  std::size_t components = 0;
  std::size_t embeddable = 0;
  std::map<std::string, std::size_t> categories;
  std::vector<const GuiScreen*> ptrs;
  for (const GuiScreen& s : corpus.screens) {
    apps.insert(s.app_id);
    components += s.nodes.size();
    embeddable += s.embeddable.size();
    for (NodeId id : s.embeddable) ++categories[std::string(category_name(s.node(id).category))];
    ptrs.push_back(&s);
  }
  std::size_t min_len = 0;
  std::size_t max_len = 0;
  std::size_t total_len = 0;
  for (const InteractionTrace& t : corpus.traces) {
    min_len = min_len == 0 ? t.screens.size() : std::min(min_len, t.screens.size());
    max_len = std::max(max_len, t.screens.size());
    total_len += t.screens.size();
  }
  json stats = {{"screens", corpus.screens.size()},
                {"traces", corpus.traces.size()},
                {"apps", apps.size()},
                {"apps_with_metadata", corpus.apps.size()},
                {"components", components},
                {"embeddable_components", embeddable},
                {"vocabulary", vocabulary_texts(ptrs).size()},
                {"trace_length",
                 {{"min", min_len},
                  {"max", max_len},
                  {"mean", corpus.traces.empty() ? 0.0
                                                 : static_cast<double>(total_len) /
                                                       static_cast<double>(corpus.traces.size())}}},
                {"categories", categories}};
  write_json_artifact(fs::path(opt.output) / "ingest.json", stats, m);
  out << stats.dump(2) << "\n";
  return kExitOk;
}

int cmd_export_texts(const Options& opt, Manifest& m, std::ostream& out) {
  const Corpus corpus = read_corpus(opt, m);
  const std::vector<std::string> texts = collect_corpus_texts(corpus);
  std::string lines;
  for (const std::string& t : texts) lines += base64_encode(t) + "\n";
  const fs::path path = fs::path(opt.output) / "texts.b64";
  write_file(path, lines);
  m.artifact(path);
  out << "exported " << texts.size() << " texts to " << path.generic_string() << "\n";
  return kExitOk;
}

int cmd_train_autoencoder(const Options& opt, Manifest& m, std::ostream& out) {
  const Corpus corpus = read_corpus(opt, m);
  AutoencoderTrainingConfig config = opt.autoencoder;
  config.seed = opt.seed;
  m.config({{"learning_rate", config.learning_rate}, {"batch_size", config.batch_size}, {"epochs", config.epochs}});
  const LayoutGrid grid;
  std::vector<LayoutBitmap> bitmaps;
  std::size_t skipped = 0;
  for (const GuiScreen& s : corpus.screens) {
    try {
      bitmaps.push_back(render_layout(s, grid));
    } catch (const DegenerateScreen& e) {
      ++skipped;
      log_warning(std::string("skipping ") + s.screen_id + ": " + e.what());
    }
  }
  const AutoencoderTrainingResult r = train_autoencoder(bitmaps, config);
  const fs::path out_dir(opt.output);
  save_checkpoint(r.model.to_checkpoint(grid), out_dir / kAutoencoderFile, m);
  const json report = {{"layouts", bitmaps.size()},
                       {"skipped", skipped},
                       {"initial_mse", r.initial_mse},
                       {"epoch_mse", r.epoch_mse},
                       {"final_mse", r.final_mse},
                       {"final_over_initial", r.initial_mse > 0 ? r.final_mse / r.initial_mse : 0.0}};
  write_json_artifact(out_dir / "autoencoder_report.json", report, m);
  out << report.dump(2) << "\n";
  return kExitOk;
}

int cmd_train_component(const Options& opt, Manifest& m, std::ostream& out) {
  const Corpus corpus = read_corpus(opt, m);
  const auto provider = make_text_provider(opt.text_provider);
  ComponentTrainingConfig config = opt.component;
  config.seed = opt.seed;
  config.metric = metric_from_name(opt.component_metric);
  m.config({{"context_k", config.context_k},
            {"metric", metric_name(config.metric)},
            {"learning_rate", config.learning_rate},
            {"batch_size", config.batch_size},
            {"epochs", config.epochs},
            {"train_fraction", config.train_fraction}});
  const ComponentTrainingResult r = train_component_model(corpus, config, *provider);
  Checkpoint ckpt = r.model.to_checkpoint();
  ckpt.header["text_provider_id"] = provider->describe();
  const fs::path out_dir(opt.output);
  save_checkpoint(ckpt, out_dir / kComponentFile, m);
  const json report = r.report();
  write_json_artifact(out_dir / "component_report.json", report, m);
  out << report.dump(2) << "\n";
  return kExitOk;
}

int cmd_train_screen(const Options& opt, Manifest& m, std::ostream& out) {
  const Corpus corpus = read_corpus(opt, m);
  const auto provider = make_text_provider(opt.text_provider);
  const fs::path dir = models_dir(opt);
  m.input("autoencoder", dir / kAutoencoderFile);
  m.input("component", dir / kComponentFile);
  const Checkpoint ae_ckpt = Checkpoint::load(dir / kAutoencoderFile);
  const Checkpoint comp_ckpt = Checkpoint::load(dir / kComponentFile);
  check_provider(comp_ckpt, *provider, "component model");
  LayoutGrid grid;
  const LayoutAutoencoder autoencoder = LayoutAutoencoder::from_checkpoint(ae_ckpt, &grid);
  const ComponentModel components = ComponentModel::from_checkpoint(comp_ckpt);
  ScreenTrainingConfig config = opt.screen;
  config.seed = opt.seed;
  m.config({{"window", config.window},
            {"negatives", config.negatives},
            {"learning_rate", config.learning_rate},
            {"batch_size", config.batch_size},
            {"epochs", config.epochs},
            {"train_fraction", config.train_fraction},
            {"combiner_gain", config.combiner_gain}});
  const ScreenTrainingResult r = train_screen_model(corpus, config, *provider, components, autoencoder);
  Checkpoint ckpt = r.model.to_checkpoint();
  ckpt.header["autoencoder_fingerprint"] = checkpoint_fingerprint(ae_ckpt);
  ckpt.header["component_fingerprint"] = checkpoint_fingerprint(comp_ckpt);
  ckpt.header["text_provider_id"] = provider->describe();
  const fs::path out_dir(opt.output);
  save_checkpoint(ckpt, out_dir / kScreenFile, m);
  const json report = r.report();
  write_json_artifact(out_dir / "screen_report.json", report, m);
  out << report.dump(2) << "\n";
  return kExitOk;
}

ModelBundle load_models(const Options& opt, const TextProvider& provider, Manifest& m) {
  const fs::path dir = models_dir(opt);
  for (const char* f : {kAutoencoderFile, kComponentFile, kScreenFile}) m.input("model", dir / f);
  check_provider(Checkpoint::load(dir / kScreenFile), provider, "screen model");
  return ModelBundle::load(dir);
}

int cmd_embed(const Options& opt, Manifest& m, std::ostream& out) {
  const Corpus corpus = read_corpus(opt, m);
  const auto provider = make_text_provider(opt.text_provider);
  const ModelBundle models = load_models(opt, *provider, m);
  const EmbeddingStore store = build_store(corpus, *provider, models);
  const fs::path path = store_path(opt);
  store.save(path);
  m.artifact(path);
  out << "stored " << store.size() << " screens (dim " << store.dim() << ", fingerprint " << store.fingerprint()
      << ") in " << path.generic_string() << "\n";
  return kExitOk;
}

EmbeddingStore open_store(const Options& opt, Manifest& m) {
  const fs::path path = store_path(opt);
  m.input("store", path);
  EmbeddingStore store = EmbeddingStore::load(path);
  if (!opt.models.empty()) {
    const auto provider = make_text_provider(opt.text_provider);
    const std::string expected = load_models(opt, *provider, m).fingerprint(*provider);
    if (expected != store.fingerprint()) {
      throw FingerprintMismatch("store " + path.generic_string() + " was built by models " + store.fingerprint() +
                                ", found " + expected);
    }
  }
  return store;
}

json query_options_json(const Options& opt) {
  return {{"k", opt.k}, {"space", opt.space}, {"similarity", opt.similarity}};
}

// Query commands go through the same handler as the HTTP service, so their
// output is the response body byte for byte.
int run_query(const Options& opt, Manifest& m, const std::string& route, const json& request, std::ostream& out,
              std::ostream& err) {
  const QueryService service(open_store(opt, m));
  const HttpResponse r = service.handle("POST", route, request.dump());
  if (r.status != 200) {
    err << r.body;
    if (r.status == 409) return kExitIncompatible;
    return kExitData;
  }
  const fs::path path = fs::path(opt.output) / (route.substr(1) + ".json");
  write_file(path, r.body);
  m.artifact(path);
  m.config({{"request", request}});
  out << r.body;
  return kExitOk;
}

int cmd_nn(const Options& opt, Manifest& m, std::ostream& out, std::ostream& err) {
  json request = query_options_json(opt);
  if (opt.query_screens.size() == 1 && opt.query_vector.empty()) {
    request["screen_id"] = opt.query_screens.front();
  } else if (opt.query_screens.empty() && !opt.query_vector.empty()) {
    m.input("vector", opt.query_vector);
    request["vector"] = json::parse(read_file(opt.query_vector));
  } else {
    throw UsageError("nn needs exactly one of --screen or --vector");
  }
  return run_query(opt, m, "/nn", request, out, err);
}

int cmd_compose(const Options& opt, Manifest& m, std::ostream& out, std::ostream& err) {
  if (opt.plus.empty() && opt.minus.empty()) throw UsageError("compose needs at least one --plus or --minus");
  json request = query_options_json(opt);
  json terms = json::array();
  for (const std::string& id : opt.plus) terms.push_back({{"sign", 1}, {"screen_id", id}});
  for (const std::string& id : opt.minus) terms.push_back({{"sign", -1}, {"screen_id", id}});
  request["terms"] = terms;
  return run_query(opt, m, "/compose", request, out, err);
}

int cmd_task(const Options& opt, Manifest& m, std::ostream& out, std::ostream& err) {
  if (opt.query_screens.empty()) throw UsageError("task needs --screens");
  json request = query_options_json(opt);
  request["screen_ids"] = opt.query_screens;
  return run_query(opt, m, "/task", request, out, err);
}

int cmd_eval(const Options& opt, Manifest& m, std::ostream& out) {
  const EmbeddingStore store = open_store(opt, m);
  m.input("predictions", opt.predictions);
  const json doc = json::parse(read_file(opt.predictions));
  if (!doc.is_array()) throw FormatError("predictions file must hold a JSON array");
  std::vector<Prediction> predictions;
  for (const json& p : doc) {
    Prediction pred;
    const auto values = p.at("predicted").get<std::vector<double>>();
    pred.predicted = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
    pred.correct = p.at("correct").get<std::string>();
    predictions.push_back(std::move(pred));
  }
  EvaluationOptions options;
  options.query.space = space_from_name(opt.space);
  options.query.similarity = similarity_from_name(opt.similarity);
  const json metrics = evaluate_predictions(predictions, store, options);
  m.config({{"space", opt.space}, {"similarity", opt.similarity}});
  const fs::path path = fs::path(opt.output) / "eval.json";
  write_file(path, render_json(metrics));
  m.artifact(path);
  if (opt.table) {
    out << format_metrics_table({{"predictions", metrics}});
  } else {
    out << render_json(metrics);
  }
  return kExitOk;
}

int cmd_serve(const Options& opt, Manifest& m, std::ostream& out) {
  const QueryService service(open_store(opt, m));
  httplib::Server server;
  mount_service(server, service, opt.static_dir);
  int port = opt.port;
  if (port == 0) {
    port = server.bind_to_any_port(opt.host);
  } else if (!server.bind_to_port(opt.host, port)) {
    port = -1;
  }
  if (port < 0) throw Error("cannot bind " + opt.host + ":" + std::to_string(opt.port));
  m.config({{"host", opt.host}, {"port", port}, {"static", opt.static_dir}});
  m.write(opt.output);
  out << "serving " << service.store().size() << " screens on http://" << opt.host << ":" << port << std::endl;
  server.listen_after_bind();
  return kExitOk;
}

int cmd_synth(const Options& opt, Manifest& m, std::ostream& out) {
  SyntheticConfig config;
  config.apps = opt.synth_apps;
  config.seed = opt.seed;
  const SyntheticCorpus synthetic = make_synthetic_corpus(config);
  const fs::path root = opt.synth_dir.empty() ? fs::path(opt.output) / "synthetic" : fs::path(opt.synth_dir);
  write_synthetic_corpus(synthetic, root);
  json tasks = json::array();
  for (const SyntheticTask& t : synthetic.tasks) {
    tasks.push_back({{"name", t.name}, {"domain", t.domain}, {"variant_a", t.variant_a}, {"variant_b", t.variant_b}});
  }
  write_json_artifact(root / "tasks.json", tasks, m);
  m.config({{"apps", config.apps}, {"directory", root.generic_string()}});
  out << "wrote " << synthetic.corpus.screens.size() << " screens in " << synthetic.corpus.traces.size()
      << " traces to " << root.generic_string() << "\n";
  return kExitOk;
}

}  // namespace

void mount_service(httplib::Server& server, const QueryService& service, const std::filesystem::path& static_dir) {
  if (!static_dir.empty()) server.set_mount_point("/", static_dir.string());
  auto handler = [&service](const httplib::Request& req, httplib::Response& res) {
    const HttpResponse r = service.handle(req.method, req.target, req.body);
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  server.Get(".*", handler);
  server.Post(".*", handler);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"guivec: train GUI screen embeddings and query them", "guivec"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "TOML file of option defaults; command-line flags win");
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("-o,--output", opt.output, "Output directory for artifacts and manifests")
      ->envname("GUIVEC_OUTPUT")
      ->capture_default_str();
  app.add_option("--seed", opt.seed, "Seed shared by every stage")->capture_default_str();
  app.add_option("--text-provider", opt.text_provider, "fallback | lookup:<file>")->capture_default_str();
  app.add_flag("-q,--quiet", opt.quiet, "Suppress warnings");

  auto add_corpus = [&](CLI::App* sub) {
    sub->add_option("--corpus", opt.corpus, "Corpus root (trace directories)")
        ->required()
        ->check(CLI::ExistingDirectory);
    sub->add_option("--metadata", opt.metadata, "App metadata CSV (default <corpus>/app_details.csv)")
        ->check(CLI::ExistingFile);
  };
  auto add_models = [&](CLI::App* sub) {
    sub->add_option("--models", opt.models, "Directory holding the model checkpoints (default: output dir)");
  };
  auto add_store = [&](CLI::App* sub) {
    sub->add_option("--store", opt.store, "Store file (default <output>/store.gvs)");
    sub->add_option("--models", opt.models, "Check the store against the checkpoints in this directory");
  };
  auto add_query = [&](CLI::App* sub) {
    sub->add_option("-k,--k", opt.k, "Number of neighbors")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--space", opt.space, "full | content")
        ->capture_default_str()
        ->check(CLI::IsMember({"full", "content"}));
    sub->add_option("--similarity", opt.similarity, "cosine | dot")
        ->capture_default_str()
        ->check(CLI::IsMember({"cosine", "dot"}));
  };

  auto* ingest = app.add_subcommand("ingest", "Parse and validate a corpus, report statistics");
  add_corpus(ingest);
  auto* export_texts = app.add_subcommand("export-texts", "Write every corpus text, base64 per line");
  add_corpus(export_texts);

  auto* train_ae = app.add_subcommand("train-autoencoder", "Train the layout autoencoder");
  add_corpus(train_ae);
  train_ae->add_option("--epochs", opt.autoencoder.epochs)->capture_default_str();
  train_ae->add_option("--batch-size", opt.autoencoder.batch_size)->capture_default_str();
  train_ae->add_option("--lr", opt.autoencoder.learning_rate)->capture_default_str();

  auto* train_comp = app.add_subcommand("train-component", "Train the component embedding model");
  add_corpus(train_comp);
  train_comp->add_option("--epochs", opt.component.epochs)->capture_default_str();
  train_comp->add_option("--batch-size", opt.component.batch_size)->capture_default_str();
  train_comp->add_option("--lr", opt.component.learning_rate)->capture_default_str();
  train_comp->add_option("--context-k", opt.component.context_k)->capture_default_str();
  train_comp->add_option("--metric", opt.component_metric, "euclidean | hierarchical")
      ->capture_default_str()
      ->check(CLI::IsMember({"euclidean", "hierarchical"}));
  train_comp->add_option("--train-fraction", opt.component.train_fraction)
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));

  auto* train_scr = app.add_subcommand("train-screen", "Train the screen embedding model");
  add_corpus(train_scr);
  add_models(train_scr);
  train_scr->add_option("--epochs", opt.screen.epochs)->capture_default_str();
  train_scr->add_option("--batch-size", opt.screen.batch_size)->capture_default_str();
  train_scr->add_option("--lr", opt.screen.learning_rate)->capture_default_str();
  train_scr->add_option("--window", opt.screen.window)->capture_default_str();
  train_scr->add_option("--negatives", opt.screen.negatives)->capture_default_str();
  train_scr->add_option("--train-fraction", opt.screen.train_fraction)
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));

  auto* embed = app.add_subcommand("embed", "Embed every corpus screen into a store");
  add_corpus(embed);
  add_models(embed);
  embed->add_option("--store", opt.store, "Store file to write (default <output>/store.gvs)");

  auto* nn = app.add_subcommand("nn", "Nearest neighbors of a screen or a vector");
  add_store(nn);
  add_query(nn);
  nn->add_option("--screen", opt.query_screens, "Query screen id")->expected(1);
  nn->add_option("--vector", opt.query_vector, "JSON file holding the query vector")->check(CLI::ExistingFile);

  auto* compose = app.add_subcommand("compose", "Nearest neighbors of a signed sum of screens");
  add_store(compose);
  add_query(compose);
  compose->add_option("--plus", opt.plus, "Screen id added to the query")->allow_extra_args(false);
  compose->add_option("--minus", opt.minus, "Screen id subtracted from the query")->allow_extra_args(false);

  auto* task = app.add_subcommand("task", "Embed a task as the mean of its screens");
  add_store(task);
  add_query(task);
  task->add_option("--screens", opt.query_screens, "Screen ids of the task, in order")->required();

  auto* eval = app.add_subcommand("eval", "Score predicted vectors against a store");
  add_store(eval);
  eval->add_option("--predictions", opt.predictions, "JSON array of {predicted, correct}")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--space", opt.space)->capture_default_str()->check(CLI::IsMember({"full", "content"}));
  eval->add_option("--similarity", opt.similarity)->capture_default_str()->check(CLI::IsMember({"cosine", "dot"}));
  eval->add_flag("--table", opt.table, "Print an aligned table instead of JSON");

  auto* serve = app.add_subcommand("serve", "Serve the query API over HTTP");
  add_store(serve);
  serve->add_option("--host", opt.host)->capture_default_str();
  serve->add_option("--port", opt.port, "0 picks a free port")->capture_default_str();
  serve->add_option("--static", opt.static_dir, "Directory of static files served at /")
      ->check(CLI::ExistingDirectory);

  auto* synth = app.add_subcommand("synth", "Write the planted synthetic corpus");
  synth->add_option("--dir", opt.synth_dir, "Target directory (default <output>/synthetic)");
  synth->add_option("--apps", opt.synth_apps)->capture_default_str()->check(CLI::Range(1, 20));

  std::vector<const char*> argv = {"guivec"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  set_quiet(opt.quiet);
  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  try {
    fs::create_directories(opt.output);
    Manifest manifest(name, args, opt);
    int code = kExitOk;
    if (sub == ingest) code = cmd_ingest(opt, manifest, out);
    else if (sub == export_texts) code = cmd_export_texts(opt, manifest, out);
    else if (sub == train_ae) code = cmd_train_autoencoder(opt, manifest, out);
    else if (sub == train_comp) code = cmd_train_component(opt, manifest, out);
    else if (sub == train_scr) code = cmd_train_screen(opt, manifest, out);
    else if (sub == embed) code = cmd_embed(opt, manifest, out);
    else if (sub == nn) code = cmd_nn(opt, manifest, out, err);
    else if (sub == compose) code = cmd_compose(opt, manifest, out, err);
    else if (sub == task) code = cmd_task(opt, manifest, out, err);
    else if (sub == eval) code = cmd_eval(opt, manifest, out);
    else if (sub == serve) return cmd_serve(opt, manifest, out);
    else if (sub == synth) code = cmd_synth(opt, manifest, out);
    if (code == kExitOk) manifest.write(opt.output);
    return code;
  } catch (const UsageError& e) {
    err << "guivec " << name << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const FingerprintMismatch& e) {
    err << "guivec " << name << ": " << e.what() << "\n";
    return kExitIncompatible;
  } catch (const std::exception& e) {
    err << "guivec " << name << ": " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace guivec
