#include "hawkes/pipeline.hpp"

#include "hawkes/book.hpp"
#include "hawkes/error.hpp"
#include "hawkes/io.hpp"
#include "hawkes/model_io.hpp"
#include "hawkes/simulate.hpp"

#include <json.hpp>

#include <chrono>
#include <algorithm>
#include <cmath>

namespace hawkes {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json config_to_json(const PipelineConfig& c) {
  auto path_or_null = [](const std::optional<fs::path>& p) { return p ? json(p->generic_string()) : json(nullptr); };
  return json{{"model", path_or_null(c.model_path)},
              {"events", path_or_null(c.events_path)},
              {"book", path_or_null(c.book_path)},
              {"horizon", c.horizon},
              {"seed", c.seed},
              {"simulator", c.simulator},
              {"h_min", c.h_min},
              {"h_max", c.h_max},
              {"h_delta", c.h_delta},
              {"resolution", c.resolution},
              {"k", c.k},
              {"t_min", c.t_min},
              {"t_max", c.t_max},
              {"scheme", to_string(c.scheme)},
              {"strict_coverage", c.strict_coverage},
              {"pairing", c.pairing},
              {"symmetry_threshold", c.symmetry_threshold},
              {"output_dir", c.output_dir.generic_string()},
              {"event_format", c.event_format},
              {"emit_plots", c.emit_plots},
              {"threads", c.threads}};
}

template <class F>
auto stage(const char* name, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string("stage '") + name + "': " + e.what());
  }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string event_extension(const std::string& format) {
  if (format == "tsv") return ".tsv";
  if (format == "ndjson") return ".ndjson";
  if (format == "bin") return ".bin";
  fail(ErrorKind::Domain, "event format must be tsv, ndjson or bin");
}

}  // namespace

PipelineConfig apply_config_json(const std::string& text, PipelineConfig c) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::Format, std::string("config is not valid JSON: ") + e.what());
  }
  require(doc.is_object(), ErrorKind::Format, "config must be a JSON object");
  static const std::vector<std::string> known{
      "model", "events", "book", "horizon", "seed", "simulator", "h_min", "h_max", "h_delta", "resolution", "k",
      "t_min", "t_max", "scheme", "strict_coverage", "pairing", "symmetry_threshold", "output_dir", "event_format",
      "emit_plots", "threads"};
  for (const auto& [key, value] : doc.items()) {
    require(std::find(known.begin(), known.end(), key) != known.end(), ErrorKind::Format,
            "config: unknown key '" + key + "'");
  }
  try {
    auto path = [&](const char* key, std::optional<fs::path>& target) {
      if (!doc.contains(key)) return;
      if (doc[key].is_null()) {
        target.reset();
      } else {
        target = fs::path(doc[key].get<std::string>());
      }
    };
    path("model", c.model_path);
    path("events", c.events_path);
    path("book", c.book_path);
    c.horizon = doc.value("horizon", c.horizon);
    c.seed = doc.value("seed", c.seed);
    c.simulator = doc.value("simulator", c.simulator);
    c.h_min = doc.value("h_min", c.h_min);
    c.h_max = doc.value("h_max", c.h_max);
    c.h_delta = doc.value("h_delta", c.h_delta);
    c.resolution = doc.value("resolution", c.resolution);
    c.k = doc.value("k", c.k);
    c.t_min = doc.value("t_min", c.t_min);
    c.t_max = doc.value("t_max", c.t_max);
    if (doc.contains("scheme")) c.scheme = parse_scheme(doc["scheme"].get<std::string>());
    c.strict_coverage = doc.value("strict_coverage", c.strict_coverage);
    c.pairing = doc.value("pairing", c.pairing);
    c.symmetry_threshold = doc.value("symmetry_threshold", c.symmetry_threshold);
    if (doc.contains("output_dir")) c.output_dir = doc["output_dir"].get<std::string>();
    c.event_format = doc.value("event_format", c.event_format);
    c.emit_plots = doc.value("emit_plots", c.emit_plots);
    c.threads = doc.value("threads", c.threads);
  } catch (const json::exception& e) {
    fail(ErrorKind::Format, std::string("config: ") + e.what());
  }
  return c;
}

std::string config_json(const PipelineConfig& config) { return config_to_json(config).dump(2) + "\n"; }

std::string file_token(const std::string& label) {
  std::string out;
  for (char ch : label) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') || ch == '_' ||
                    ch == '-' || ch == '.';
    out += ok ? ch : '_';
  }
  return out;
}

void write_plot_tables(const fs::path& dir, const ConditionalLawMatrix* claw, const KernelEstimate* estimate,
                       const CausalityReport* report) {
  auto name = [](const std::string& what, const std::string& source, const std::string& target) {
    return what + "_" + file_token(source) + "_to_" + file_token(target) + ".tsv";
  };
  if (claw) {
    const std::size_t d = claw->dimension();
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        std::string text = "log10_t\tg\tstderr\treliable\n";
        const auto& p = claw->pair(i, j);
        for (std::size_t l = 0; l < p.values.size(); ++l) {
          text += format_double(std::log10(claw->midpoints()[l])) + "\t" + format_double(p.values[l]) + "\t" +
                  format_double(claw->standard_error(i, j, l)) + "\t" + (claw->reliable(l) ? "1" : "0") + "\n";
        }
        write_file_atomic(dir / name("claw", claw->labels()[j], claw->labels()[i]), text);
      }
    }
  }
  if (estimate) {
    const std::size_t d = estimate->dimension();
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        std::string text = "log10_t\tphi\n";
        const auto& v = estimate->values(i, j);
        for (std::size_t k = 0; k < v.size(); ++k) {
          if (estimate->nodes[k] <= 0.0) continue;
          text += format_double(std::log10(estimate->nodes[k])) + "\t" + format_double(v[k]) + "\n";
        }
        write_file_atomic(dir / name("kernel", estimate->labels[j], estimate->labels[i]), text);
      }
    }
  }
  if (report) {
    for (const auto& c : report->cumulated) {
      std::string text = "log10_t\tcumulated\n";
      for (std::size_t k = 0; k < c.normalized.size(); ++k) {
        if (report->nodes[k] <= 0.0) continue;
        text += format_double(std::log10(report->nodes[k])) + "\t" + format_double(c.normalized[k]) + "\n";
      }
      write_file_atomic(dir / name("cumulated", report->labels[c.source], report->labels[c.target]), text);
    }
    write_file_atomic(dir / "norm_matrix.tsv", matrix_tsv(report->norm_matrix, report->labels));
    if (report->psi_norms.size() > 0) {
      write_file_atomic(dir / "psi_norms.tsv", matrix_tsv(report->psi_norms, report->labels));
      write_file_atomic(dir / "dressed_fractions.tsv", matrix_tsv(report->dressed_fractions, report->labels));
    }
  }
}

PipelineResult run_pipeline(const PipelineConfig& config) {
  const int inputs = (config.model_path ? 1 : 0) + (config.events_path ? 1 : 0) + (config.book_path ? 1 : 0);
  require(inputs == 1, ErrorKind::Domain, "pipeline needs exactly one of a model, an event file or a book file");
  const auto started = std::chrono::steady_clock::now();
  const fs::path out = config.output_dir;
  PipelineResult result;
  json manifest;
  manifest["format"] = "hawkes-manifest";
  manifest["version"] = 1;
  manifest["parameters"] = config_to_json(config);
  json inputs_json = json::object();
  json outputs = json::object();
  json timing = json::object();
  json warnings = json::array();

  // 1. events
  auto t0 = std::chrono::steady_clock::now();
  result.events = stage("events", [&] {
    if (config.model_path) {
      const HawkesModel model = load_model(*config.model_path);
      inputs_json["model_hash"] = model_hash(model);
      SimulationResult sim;
      if (config.simulator == "thinning" || model.mode() == Mode::Rectified) {
        sim = simulate_thinning(model, config.horizon, config.seed);
      } else {
        require(config.simulator == "branching", ErrorKind::Domain, "simulator must be branching or thinning");
        sim = simulate_branching(model, config.horizon, config.seed);
      }
      manifest["simulation"] = {{"warmup", sim.diagnostics.warmup},
                                {"radius", sim.diagnostics.radius},
                                {"generated", sim.diagnostics.generated},
                                {"ancient_immigrants", sim.diagnostics.ancient_immigrants},
                                {"positive_fraction", sim.diagnostics.positive_fraction}};
      for (const auto& w : sim.diagnostics.warnings) warnings.push_back("simulate: " + w);
      return sim.stream;
    }
    if (config.events_path) {
      inputs_json["events_hash"] = hex64(fnv1a64(read_file(*config.events_path)));
      return read_events(*config.events_path);
    }
    inputs_json["book_hash"] = hex64(fnv1a64(read_file(*config.book_path)));
    const auto classified = classify_book_events(load_book_updates(*config.book_path));
    json dropped = json::object();
    for (const auto& [reason, count] : classified.dropped) dropped[reason] = count;
    manifest["classification"] = {{"input", classified.input},
                                  {"emitted", classified.emitted},
                                  {"price_events", classified.price_events},
                                  {"inferred", classified.inferred},
                                  {"dropped", dropped},
                                  {"jittered", classified.stream.jittered}};
    return classified.stream;
  });
  const fs::path events_file = out / ("events" + event_extension(config.event_format));
  write_events(result.events, events_file);
  timing["events"] = seconds_since(t0);

  // 2. conditional laws
  t0 = std::chrono::steady_clock::now();
  result.claw = stage("claw", [&] {
    const auto grid = build_multiscale_grid(config.h_min, config.h_max, config.h_delta);
    return estimate_claw(result.events, grid, ClawOptions{config.resolution, config.threads});
  });
  save_claw(*result.claw, out / "claw.json");
  timing["claw"] = seconds_since(t0);

  // 3. kernels
  t0 = std::chrono::steady_clock::now();
  result.estimate = stage("solve", [&] {
    SolverOptions options;
    options.strict_coverage = config.strict_coverage;
    options.threads = config.threads;
    if (config.scheme == Scheme::Adapted) {
      return solve_kernels(*result.claw, build_quadrature_grid(config.t_min, config.t_max, config.k), options,
                           result.events.labels);
    }
    return solve_kernels_gauss_logcv(*result.claw, config.k, config.t_min, config.t_max, options,
                                     result.events.labels);
  });
  save_estimate(result.estimate, out / "estimate.json");
  timing["solve"] = seconds_since(t0);

  // 4. analytics
  t0 = std::chrono::steady_clock::now();
  result.report = stage("analyze", [&] {
    std::optional<Pairing> pairing;
    if (config.pairing == "book") {
      require(result.estimate.labels == book_labels(), ErrorKind::Pairing,
              "the book pairing preset needs the level-I component labels");
      pairing = book_pairing();
    } else if (!config.pairing.empty()) {
      pairing = parse_pairing(config.pairing, result.estimate.labels);
    }
    SymmetryOptions sym;
    sym.threshold = config.symmetry_threshold;
    return analyze(result.estimate, pairing, sym);
  });
  write_file_atomic(out / "report.json", write_report(result.report));
  write_file_atomic(out / "report.txt", format_tables(result.report));
  write_file_atomic(out / "norm_matrix.tsv", matrix_tsv(result.report.norm_matrix, result.report.labels));
  if (config.emit_plots) write_plot_tables(out / "plots", &*result.claw, &result.estimate, &result.report);
  timing["analyze"] = seconds_since(t0);

  for (const auto& w : result.report.warnings) warnings.push_back("analyze: " + w);
  for (const char* file : {"claw.json", "estimate.json", "report.json", "report.txt", "norm_matrix.tsv"}) {
    outputs[file] = hex64(fnv1a64(read_file(out / file)));
  }
  outputs[events_file.filename().string()] = hex64(fnv1a64(read_file(events_file)));
  manifest["seed"] = config.seed;
  manifest["inputs"] = inputs_json;
  manifest["outputs"] = outputs;
  manifest["warnings"] = warnings;
  timing["total"] = seconds_since(started);
  manifest["wall_clock"] = timing;
  result.manifest_path = out / "manifest.json";
  write_file_atomic(result.manifest_path, manifest.dump(2) + "\n");
  return result;
}

}  // namespace hawkes
