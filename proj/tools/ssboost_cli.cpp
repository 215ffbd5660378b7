// Command-line front end; talks to the library only through ssboost.h.
#include "ssboost/ssboost.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace {

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(ssb_status s) {
  if (s != SSB_OK) throw Failure(ssb_last_error());
}

struct OwnedString {
  char* p = nullptr;
  ~OwnedString() { ssb_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

struct DatasetDeleter {
  void operator()(ssb_dataset_s* d) const { ssb_dataset_free(d); }
};
struct ModelDeleter {
  void operator()(ssb_model_s* m) const { ssb_model_free(m); }
};
using Dataset = std::unique_ptr<ssb_dataset_s, DatasetDeleter>;
using Model = std::unique_ptr<ssb_model_s, ModelDeleter>;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure("cannot open " + path + ": file not found");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure("cannot write " + path);
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
  if (!out) throw Failure("cannot write " + path);
}

Dataset read_dataset(const std::string& path) {
  ssb_dataset d = nullptr;
  check(ssb_dataset_read(path.c_str(), 0, &d));
  return Dataset(d);
}

Model load_model(const std::string& path) {
  ssb_model m = nullptr;
  check(ssb_model_load(path.c_str(), &m));
  return Model(m);
}

struct Globals {
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  bool verbose = false;

  const std::uint64_t* seed_ptr() const { return seed ? &*seed : nullptr; }
  unsigned thread_count() const {
    if (threads > 0) return threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatial-spectral precondition boosting for two-class multichannel trials"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Override every RNG seed");
  app.add_option("--threads", g.threads, "Worker threads (0 = hardware); results do not depend on it");
  app.add_flag("-v,--verbose", g.verbose, "Progress on stderr");

  // generate
  std::string gen_spec, gen_out;
  auto* generate = app.add_subcommand("generate", "Synthesize EEGB session(s) from a PlantSpec or drift schedule");
  generate->add_option("--spec", gen_spec, "JSON PlantSpec, DriftSchedule or drift request")->required();
  generate->add_option("--out", gen_out, "EEGB output; series become <stem>_s<t>.eegb")->required();

  // bands
  std::string bands_spec, bands_out;
  auto* bands = app.add_subcommand("bands", "Dump the band universe and its constraint report");
  bands->add_option("--spec", bands_spec, "JSON BandUniverseSpec (defaults otherwise)");
  bands->add_option("--out", bands_out, "Output JSON (stdout by default)");

  // train
  std::string train_input, train_mode = "sfb", train_config, train_model_out, train_trace_out;
  auto* train = app.add_subcommand("train", "Train one boosted model on an EEGB session");
  train->add_option("--input", train_input, "EEGB session")->required();
  train->add_option("--mode", train_mode, "plain | sb | fb | sfb")
      ->check(CLI::IsMember({"plain", "sb", "fb", "sfb"}, CLI::ignore_case));
  train->add_option("--config", train_config,
                    "JSON BoostConfig, or {\"boost\": {...}, \"universe\": {...}}");
  train->add_option("--model-out", train_model_out, "Model JSON path")->required();
  train->add_option("--trace-out", train_trace_out, "Trace JSON path");

  // evaluate
  std::string eval_model, eval_input, eval_out;
  auto* evaluate = app.add_subcommand("evaluate", "Accuracy and confusion counts of a model on a session");
  evaluate->add_option("--model", eval_model)->required();
  evaluate->add_option("--input", eval_input)->required();
  evaluate->add_option("--out", eval_out, "Output JSON (stdout by default)");

  // predict
  std::string pred_model, pred_input, pred_out;
  auto* predict = app.add_subcommand("predict", "Per-trial scores as CSV");
  predict->add_option("--model", pred_model)->required();
  predict->add_option("--input", pred_input)->required();
  predict->add_option("--out", pred_out, "Output CSV (stdout by default)");

  // importance
  std::vector<std::string> imp_models;
  std::string imp_csv, imp_drift;
  bool imp_absolute = false;
  auto* importance = app.add_subcommand("importance", "Channel/band importance table and drift summary");
  importance->add_option("--models", imp_models, "Session-ordered model files")->required();
  importance->add_option("--csv-out", imp_csv, "Importance CSV (stdout by default)");
  importance->add_option("--drift-out", imp_drift, "Drift summary JSON");
  importance->add_flag("--absolute", imp_absolute, "Sum |alpha| instead of alpha");

  // run
  std::string run_config;
  auto* run = app.add_subcommand("run", "Run a full experiment from a JSON config");
  run->add_option("--config", run_config, "Experiment config JSON")->required();

  // inspect
  std::string insp_input, insp_model;
  auto* inspect = app.add_subcommand("inspect", "Describe an EEGB file or a model");
  auto* insp_in_opt = inspect->add_option("--input", insp_input, "EEGB session");
  auto* insp_model_opt = inspect->add_option("--model", insp_model, "Model JSON");
  insp_in_opt->excludes(insp_model_opt);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) {
      const std::string spec = slurp(gen_spec);
      OwnedString written;
      check(ssb_generate_files(spec.c_str(), gen_out.c_str(), &written.p));
      if (g.verbose) std::cerr << "wrote " << written.str() << '\n';
    } else if (*bands) {
      std::string spec;
      if (!bands_spec.empty()) spec = slurp(bands_spec);
      OwnedString out;
      check(ssb_bands(spec.empty() ? nullptr : spec.c_str(), &out.p));
      emit(out.str(), bands_out);
    } else if (*train) {
      auto ds = read_dataset(train_input);
      std::string boost_json, universe_json;
      if (!train_config.empty()) {
        const auto j = nlohmann::json::parse(slurp(train_config));
        if (j.contains("boost") || j.contains("universe")) {
          if (j.contains("boost")) boost_json = j["boost"].dump();
          if (j.contains("universe")) universe_json = j["universe"].dump();
        } else {
          boost_json = j.dump();
        }
      }
      ssb_model m = nullptr;
      OwnedString trace;
      check(ssb_train(ds.get(), train_mode.c_str(), boost_json.empty() ? nullptr : boost_json.c_str(),
                      universe_json.empty() ? nullptr : universe_json.c_str(), g.seed_ptr(), g.thread_count(), &m,
                      train_trace_out.empty() ? nullptr : &trace.p));
      Model model(m);
      check(ssb_model_save(model.get(), train_model_out.c_str()));
      if (!train_trace_out.empty()) emit(trace.str(), train_trace_out);
      if (g.verbose) {
        int k = 0;
        check(ssb_model_selected_k(model.get(), &k));
        std::cerr << "trained " << train_mode << " model, selected_k=" << k << '\n';
      }
    } else if (*evaluate) {
      auto model = load_model(eval_model);
      auto ds = read_dataset(eval_input);
      OwnedString out;
      check(ssb_evaluate(model.get(), ds.get(), g.thread_count(), &out.p));
      emit(out.str(), eval_out);
    } else if (*predict) {
      auto model = load_model(pred_model);
      auto ds = read_dataset(pred_input);
      std::size_t n = 0;
      check(ssb_dataset_info(ds.get(), &n, nullptr, nullptr, nullptr));
      std::vector<double> scores(n);
      std::vector<int> predicted(n), labels(n);
      check(ssb_predict(model.get(), ds.get(), g.thread_count(), scores.data(), predicted.data(), n));
      check(ssb_dataset_labels(ds.get(), labels.data(), n));
      std::ostringstream csv;
      csv << "trial,label,score,predicted\n";
      char buf[64];
      for (std::size_t i = 0; i < n; ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", scores[i]);
        csv << i << ',' << labels[i] << ',' << buf << ',' << predicted[i] << '\n';
      }
      emit(csv.str(), pred_out);
    } else if (*importance) {
      std::vector<Model> owned;
      std::vector<ssb_model> handles;
      for (const auto& p : imp_models) {
        owned.push_back(load_model(p));
        handles.push_back(owned.back().get());
      }
      OwnedString csv, drift;
      check(ssb_importance(handles.data(), handles.size(), imp_absolute ? 1 : 0, &csv.p, &drift.p));
      emit(csv.str(), imp_csv);
      if (!imp_drift.empty()) emit(drift.str(), imp_drift);
    } else if (*run) {
      OwnedString summary;
      check(ssb_run_experiment(run_config.c_str(), g.seed_ptr(), g.thread_count(), g.verbose ? 1 : 0, &summary.p));
      if (g.verbose) std::cerr << summary.str() << '\n';
    } else if (*inspect) {
      nlohmann::json info;
      if (!insp_input.empty()) {
        auto ds = read_dataset(insp_input);
        std::size_t n = 0, s = 0, c = 0;
        double fs = 0;
        check(ssb_dataset_info(ds.get(), &n, &s, &c, &fs));
        std::vector<int> labels(n);
        check(ssb_dataset_labels(ds.get(), labels.data(), n));
        long positives = 0;
        for (int l : labels) positives += l > 0;
        OwnedString problems;
        check(ssb_dataset_validate(ds.get(), &problems.p));
        info = {{"n_trials", n},          {"n_samples", s},
                {"n_channels", c},        {"sample_rate_hz", fs},
                {"n_positive", positives}, {"n_negative", static_cast<long>(n) - positives},
                {"problems", nlohmann::json::parse(problems.str())}};
      } else if (!insp_model.empty()) {
        auto model = load_model(insp_model);
        OwnedString text;
        check(ssb_model_to_json(model.get(), &text.p));
        const auto j = nlohmann::json::parse(text.str());
        nlohmann::json terms = nlohmann::json::array();
        for (const auto& t : j.at("terms")) terms.push_back({{"alpha", t.at("alpha")}, {"precondition", t.at("precondition")}});
        info = {{"mode", j.at("mode")},
                {"intercept", j.at("intercept")},
                {"selected_k", j.at("selected_k")},
                {"n_terms", j.at("terms").size()},
                {"terms", terms}};
      } else {
        throw Failure("inspect needs --input or --model");
      }
      std::cout << info.dump(1) << '\n';
    }
  } catch (const Failure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
