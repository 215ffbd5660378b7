#include "ssboost/ssboost.h"

#include "ssboost/experiment.hpp"
#include "ssboost/io.hpp"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <iostream>
#include <new>

struct ssb_dataset_s {
  ssb::SessionDataset data;
};

struct ssb_model_s {
  ssb::AdditiveModel model;
};

namespace {

thread_local std::string g_last_error;

// Classifies an ssb::Error message into a status code.
ssb_status classify(const std::string& msg) {
  auto has = [&](const char* s) { return msg.find(s) != std::string::npos; };
  if (has("cannot open") || has("cannot write") || has("cannot create") || has("not found") || has("cannot move"))
    return SSB_ERROR_IO;
  if (has("EEGB") || has("length mismatch") || has("invalid label") || has("JSON") || has("not a model") ||
      has("invalid ") || has("unsupported"))
    return SSB_ERROR_FORMAT;
  return SSB_ERROR_COMPUTE;
}

// Invalid option values supplied by the caller.
struct ArgumentError : ssb::Error {
  using ssb::Error::Error;
};

template <class F>
ssb_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return SSB_OK;
  } catch (const ArgumentError& e) {
    g_last_error = e.what();
    return SSB_ERROR_ARGUMENT;
  } catch (const ssb::Error& e) {
    g_last_error = e.what();
    return classify(g_last_error);
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return SSB_ERROR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SSB_ERROR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

ssb::Json parse_optional(const char* text, const char* what) {
  if (!text || !*text) return ssb::Json::object();
  return ssb::parse_json(text, what);
}

}  // namespace

extern "C" {

const char* ssb_version(void) { return "1.0.0"; }

const char* ssb_last_error(void) { return g_last_error.c_str(); }

void ssb_string_free(char* s) { std::free(s); }

ssb_status ssb_dataset_read(const char* path, int session_index, ssb_dataset* out) {
  if (!path || !out) {
    g_last_error = "null argument";
    return SSB_ERROR_ARGUMENT;
  }
  return guarded([&] {
    if (!std::filesystem::exists(path)) throw ssb::Error(std::string("cannot open ") + path + ": file not found");
    *out = new ssb_dataset_s{ssb::read_eegb(path, session_index)};
  });
}

ssb_status ssb_dataset_write(ssb_dataset ds, const char* path) {
  if (!ds || !path) {
    g_last_error = "null argument";
    return SSB_ERROR_ARGUMENT;
  }
  return guarded([&] { ssb::write_eegb(ds->data, path); });
}

ssb_status ssb_dataset_generate(const char* plant_spec_json, ssb_dataset* out) {
  if (!plant_spec_json || !out) {
    g_last_error = "null argument";
    return SSB_ERROR_ARGUMENT;
  }
  return guarded([&] {
    const auto spec = ssb::json_as<ssb::PlantSpec>(ssb::parse_json(plant_spec_json, "plant spec"), "plant spec");
    *out = new ssb_dataset_s{ssb::generate_session(spec)};
  });
}

ssb_status ssb_dataset_info(ssb_dataset ds, size_t* n_trials, size_t* n_samples, size_t* n_channels,
                            double* sample_rate_hz) {
  if (!ds) {
    g_last_error = "null dataset";
    return SSB_ERROR_ARGUMENT;
  }
  if (n_trials) *n_trials = ds->data.n_trials();
  if (n_samples) *n_samples = static_cast<size_t>(ds->data.n_samples());
  if (n_channels) *n_channels = static_cast<size_t>(ds->data.n_channels());
  if (sample_rate_hz) *sample_rate_hz = ds->data.sample_rate_hz;
  return SSB_OK;
}

ssb_status ssb_dataset_labels(ssb_dataset ds, int* labels, size_t capacity) {
  if (!ds || !labels) {
    g_last_error = "null argument";
    return SSB_ERROR_ARGUMENT;
  }
  if (capacity < ds->data.n_trials()) {
    g_last_error = "label buffer too small";
    return SSB_ERROR_ARGUMENT;
  }
  for (size_t i = 0; i < ds->data.n_trials(); ++i) labels[i] = ds->data.trials[i].label;
  return SSB_OK;
}

ssb_status ssb_dataset_validate(ssb_dataset ds, char** report_json) {
  if (!ds || !report_json) {
    g_last_error = "null argument";
    return SSB_ERROR_ARGUMENT;
  }
  return guarded([&] { *report_json = dup_string(ssb::Json(ssb::validate_dataset(ds->data)).dump()); });
}

void ssb_dataset_free(ssb_dataset ds) { delete ds; }

ssb_status ssb_generate_files(const char* spec_json, const char* out_path, char** written_json) {
  if (!spec_json || !out_path) {
    g_last_error = "null argument";
    return SSB_ERROR_ARGUMENT;
  }
  return guarded([&] {
    const auto schedule = ssb::schedule_from_json(ssb::parse_json(spec_json, "generator spec"));
    const std::filesystem::path out(out_path);
    std::vector<std::string> written;
    for (std::size_t t = 0; t < schedule.sessions.size(); ++t) {
      std::filesystem::path target = out;
      if (schedule.sessions.size() > 1)
        target = out.parent_path() / (out.stem().string() + "_s" + std::to_string(t) + out.extension().string());
      ssb::write_eegb(ssb::generate_session(schedule.sessions[t], static_cast<int>(t)), target);
      written.push_back(target.string());
    }
    if (written_json) *written_json = dup_string(ssb::Json(written).dump());
  });
}

ssb_status ssb_bands(const char* spec_json, char** out_json) {
  if (!out_json) {
    g_last_error = "null argument";
    return SSB_ERROR_ARGUMENT;
  }
  return guarded([&] {
    const auto spec = ssb::json_as<ssb::BandUniverseSpec>(parse_optional(spec_json, "band spec"), "band spec");
    const auto bands = ssb::generate_band_universe(spec);
    const auto report = ssb::verify_band_constraints(bands, spec.global());
    ssb::Json j{{"spec", spec}, {"count", bands.size()}, {"bands", bands}, {"report", report}};
    *out_json = dup_string(j.dump(1));
  });
}

ssb_status ssb_train(ssb_dataset ds, const char* mode, const char* boost_json, const char* universe_json,
                     const uint64_t* seed, unsigned threads, ssb_model* model, char** trace_json) {
  if (!ds || !mode || !model) {
    g_last_error = "null argument";
    return SSB_ERROR_ARGUMENT;
  }
  ssb::Mode m;
  try {
    m = ssb::parse_mode(mode);
  } catch (const ssb::Error& e) {
    g_last_error = e.what();
    return SSB_ERROR_ARGUMENT;
  }
  return guarded([&] {
    auto boost = ssb::json_as<ssb::BoostConfig>(parse_optional(boost_json, "boost config"), "boost config");
    try {
      boost.validate();
    } catch (const ssb::Error& e) {
      throw ArgumentError(e.what());
    }
    auto ucfg = ssb::json_as<ssb::UniverseConfig>(parse_optional(universe_json, "universe config"), "universe config");
    if (seed) {
      boost.rng_seed = *seed;
      ucfg.seed = *seed;
    }
    ucfg.n_channels = static_cast<int>(ds->data.n_channels());
    ucfg.min_channels = boost.min_channels;
    const auto universe = ssb::build_universe(m, ucfg);
    auto result = ssb::train_session(ds->data, universe, boost, m, threads);
    if (trace_json) *trace_json = dup_string(ssb::Json(result.trace).dump(1));
    *model = new ssb_model_s{std::move(result.model)};
  });
}

ssb_status ssb_model_load(const char* path, ssb_model* out) {
  if (!path || !out) {
    g_last_error = "null argument";
    return SSB_ERROR_ARGUMENT;
  }
  return guarded([&] { *out = new ssb_model_s{ssb::load_model(path)}; });
}

ssb_status ssb_model_save(ssb_model model, const char* path) {
  if (!model || !path) {
    g_last_error = "null argument";
    return SSB_ERROR_ARGUMENT;
  }
  return guarded([&] { ssb::save_model(model->model, path); });
}

ssb_status ssb_model_to_json(ssb_model model, char** out_json) {
  if (!model || !out_json) {
    g_last_error = "null argument";
    return SSB_ERROR_ARGUMENT;
  }
  return guarded([&] { *out_json = dup_string(ssb::Json(model->model).dump(1)); });
}

ssb_status ssb_model_selected_k(ssb_model model, int* selected_k) {
  if (!model || !selected_k) {
    g_last_error = "null argument";
    return SSB_ERROR_ARGUMENT;
  }
  *selected_k = model->model.selected_k;
  return SSB_OK;
}

void ssb_model_free(ssb_model model) { delete model; }

ssb_status ssb_predict(ssb_model model, ssb_dataset ds, unsigned threads, double* scores, int* labels,
                       size_t capacity) {
  if (!model || !ds || !scores) {
    g_last_error = "null argument";
    return SSB_ERROR_ARGUMENT;
  }
  if (capacity < ds->data.n_trials()) {
    g_last_error = "output buffer too small";
    return SSB_ERROR_ARGUMENT;
  }
  return guarded([&] {
    const auto predictions = ssb::predict_all(model->model, ds->data, threads);
    for (size_t i = 0; i < predictions.size(); ++i) {
      scores[i] = predictions[i].score;
      if (labels) labels[i] = predictions[i].label;
    }
  });
}

ssb_status ssb_evaluate(ssb_model model, ssb_dataset ds, unsigned threads, char** out_json) {
  if (!model || !ds || !out_json) {
    g_last_error = "null argument";
    return SSB_ERROR_ARGUMENT;
  }
  return guarded([&] { *out_json = dup_string(ssb::to_json(ssb::evaluate(model->model, ds->data, threads)).dump(1)); });
}

ssb_status ssb_importance(const ssb_model* models, size_t n_models, int absolute, char** csv, char** drift_json) {
  if (!models || n_models == 0) {
    g_last_error = "no models";
    return SSB_ERROR_ARGUMENT;
  }
  for (size_t i = 0; i < n_models; ++i)
    if (!models[i]) {
      g_last_error = "null model";
      return SSB_ERROR_ARGUMENT;
    }
  return guarded([&] {
    std::vector<ssb::ImportanceProfile> profiles;
    const auto& names = models[0]->model.channel_names;
    for (size_t i = 0; i < n_models; ++i) {
      if (models[i]->model.channel_names != names) throw ssb::Error("models use different channel names");
      profiles.push_back(ssb::make_profile(models[i]->model, static_cast<int>(i), ssb::ImportanceOptions{absolute != 0}));
    }
    if (csv) *csv = dup_string(ssb::importance_csv(profiles, names));
    if (drift_json) *drift_json = dup_string(ssb::drift_summary(profiles, names).dump(1));
  });
}

ssb_status ssb_run_experiment(const char* config_path, const uint64_t* seed, unsigned threads, int verbose,
                              char** summary_json) {
  if (!config_path) {
    g_last_error = "null argument";
    return SSB_ERROR_ARGUMENT;
  }
  return guarded([&] {
    const std::filesystem::path path(config_path);
    if (!std::filesystem::exists(path)) throw ssb::Error("cannot open " + path.string() + ": file not found");
    auto json = ssb::parse_json(ssb::read_text_file(path), "experiment config " + path.string());
    auto config = ssb::experiment_config_from_json(json, path.parent_path());
    if (seed) {
      config.boost.rng_seed = *seed;
      config.universe.seed = *seed;
    }
    ssb::Logger log;
    if (verbose) log = [](const std::string& m) { std::cerr << m << '\n'; };
    const auto result = ssb::run_experiment(config, threads, log);
    if (summary_json) {
      ssb::Json modes = ssb::Json::array();
      for (auto m : result.modes) modes.push_back(ssb::to_string(m));
      ssb::Json j{{"output_dir", result.output_dir.string()},
                  {"sessions", result.sessions},
                  {"modes", modes},
                  {"accuracy", result.accuracy}};
      *summary_json = dup_string(j.dump(1));
    }
  });
}

}  // extern "C"
