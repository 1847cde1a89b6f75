#pragma once

#include "hawkes/analytics.hpp"
#include "hawkes/claw.hpp"
#include "hawkes/event_stream.hpp"
#include "hawkes/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace hawkes {

struct PipelineConfig {
  // exactly one input: a model to simulate, an event file, or a book-update file
  std::optional<std::filesystem::path> model_path;
  std::optional<std::filesystem::path> events_path;
  std::optional<std::filesystem::path> book_path;

  double horizon = 1e6;
  std::uint64_t seed = 1;
  std::string simulator = "branching";  // branching | thinning

  double h_min = 1e-3;
  double h_max = 1000.0;
  double h_delta = 0.05;
  double resolution = 0.0;

  std::size_t k = 200;
  double t_min = 1e-3;
  double t_max = 2000.0;
  Scheme scheme = Scheme::Adapted;
  bool strict_coverage = false;

  /// "a:b,c:d", "book" for the level-I preset, empty for none.
  std::string pairing;
  double symmetry_threshold = 0.1;

  std::filesystem::path output_dir = "hawkes-out";
  std::string event_format = "tsv";  // tsv | ndjson | bin
  bool emit_plots = false;
  unsigned threads = 0;
};

/// Applies the keys present in a JSON object (same names as the fields) on top of `base`.
PipelineConfig apply_config_json(const std::string& text, PipelineConfig base);
/// Canonical JSON of every parameter.
std::string config_json(const PipelineConfig& config);

struct PipelineResult {
  EventStream events;
  std::optional<ConditionalLawMatrix> claw;
  KernelEstimate estimate;
  CausalityReport report;
  std::filesystem::path manifest_path;
};

/// simulate or ingest -> claw -> solve -> analyze, writing every intermediate
/// artifact plus a manifest into config.output_dir. Module errors are
/// rethrown with the failing stage named.
PipelineResult run_pipeline(const PipelineConfig& config);

/// Figure-style tables written by --emit-plots into `dir`.
void write_plot_tables(const std::filesystem::path& dir, const ConditionalLawMatrix* claw,
                       const KernelEstimate* estimate, const CausalityReport* report);

/// Label turned into a file-name fragment.
std::string file_token(const std::string& label);

}  // namespace hawkes
