// Command-line front end: simulate, classify, claw, solve, analyze, pipeline.

#include "hawkes/analytics.hpp"
#include "hawkes/book.hpp"
#include "hawkes/claw.hpp"
#include "hawkes/error.hpp"
#include "hawkes/event_stream.hpp"
#include "hawkes/io.hpp"
#include "hawkes/model_io.hpp"
#include "hawkes/pipeline.hpp"
#include "hawkes/simulate.hpp"
#include "hawkes/solver.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

namespace {

using namespace hawkes;
namespace fs = std::filesystem;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return 2;
    case ErrorKind::DivergentNorm: return 3;
    case ErrorKind::Instability: return 4;
    case ErrorKind::NonConvergence: return 5;
    case ErrorKind::Singular: return 6;
    case ErrorKind::Coverage: return 7;
    case ErrorKind::EmptyComponent: return 8;
    case ErrorKind::Pairing: return 9;
    case ErrorKind::Format: return 10;
    case ErrorKind::Io: return 11;
  }
  return 1;
}

struct Flags {
  PipelineConfig config;
  std::string model;
  std::string events;
  std::string book;
  std::string claw;
  std::string estimate;
  std::string output;
  std::string output_dir;
  std::string scheme = "adapted";
  std::string config_file;
  std::string plots_dir;
  std::string genealogy;
  bool quiet = false;
};

// flags first, then the config file on top of them
PipelineConfig resolve(const Flags& f) {
  PipelineConfig c = f.config;
  if (!f.model.empty()) c.model_path = f.model;
  if (!f.events.empty()) c.events_path = f.events;
  if (!f.book.empty()) c.book_path = f.book;
  if (!f.output_dir.empty()) c.output_dir = f.output_dir;
  c.scheme = parse_scheme(f.scheme);
  if (!f.config_file.empty()) c = apply_config_json(read_file(f.config_file), c);
  return c;
}

void add_claw_flags(CLI::App* app, Flags& f) {
  app->add_option("--h-min", f.config.h_min, "finest conditional-law lag (s)")->capture_default_str();
  app->add_option("--h-max", f.config.h_max, "largest conditional-law lag (s)")->capture_default_str();
  app->add_option("--h-delta", f.config.h_delta, "log step of the claw grid")->capture_default_str();
  app->add_option("--resolution", f.config.resolution, "timestamp resolution (s); finer bins are flagged")
      ->capture_default_str();
}

void add_solver_flags(CLI::App* app, Flags& f) {
  app->add_option("-k,--k", f.config.k, "quadrature size K")->capture_default_str();
  app->add_option("--t-min", f.config.t_min, "end of the uniform part (s)")->capture_default_str();
  app->add_option("--t-max", f.config.t_max, "kernel support (s)")->capture_default_str();
  app->add_option("--scheme", f.scheme, "adapted | gauss-logcv")->capture_default_str();
  app->add_flag("--strict-coverage", f.config.strict_coverage, "fail when the claw ends before T_max");
}

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config_file, "JSON config; its keys override flags");
  app->add_option("--threads", f.config.threads, "worker threads (0: all cores)")->capture_default_str();
  app->add_flag("-q,--quiet", f.quiet, "no summary on stdout");
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multivariate Hawkes simulation, non-parametric kernel estimation and causality analytics"};
  app.require_subcommand(1);
  Flags f;

  auto* sim = app.add_subcommand("simulate", "simulate a model into an event file");
  sim->add_option("--model", f.model, "model JSON")->required();
  sim->add_option("-o,--out", f.output, "event file (.tsv, .ndjson or .bin)")->required();
  sim->add_option("--horizon", f.config.horizon, "horizon T (s)")->capture_default_str();
  sim->add_option("--seed", f.config.seed, "random seed")->capture_default_str();
  sim->add_option("--simulator", f.config.simulator, "branching | thinning")->capture_default_str();
  sim->add_option("--genealogy", f.genealogy, "TSV of ancestor type per event (branching only)");
  add_common(sim, f);

  auto* cls = app.add_subcommand("classify", "classify level-I book updates into the 8 event types");
  cls->add_option("--book", f.book, "book update file")->required();
  cls->add_option("-o,--out", f.output, "event file")->required();
  add_common(cls, f);

  auto* claw = app.add_subcommand("claw", "estimate conditional laws from an event file");
  claw->add_option("--events", f.events, "event file")->required();
  claw->add_option("-o,--out", f.output, "claw JSON")->required();
  claw->add_option("--emit-plots", f.plots_dir, "directory for (log10 t, g) tables");
  add_claw_flags(claw, f);
  add_common(claw, f);

  auto* solve = app.add_subcommand("solve", "solve the Wiener-Hopf system for the kernels");
  solve->add_option("--claw", f.claw, "claw JSON")->required();
  solve->add_option("-o,--out", f.output, "estimate JSON")->required();
  solve->add_option("--emit-plots", f.plots_dir, "directory for (log10 t, phi) tables");
  add_solver_flags(solve, f);
  add_common(solve, f);

  auto* an = app.add_subcommand("analyze", "norms, psi norms, exogeneity ratios, symmetry");
  an->add_option("--estimate", f.estimate, "estimate JSON")->required();
  an->add_option("-o,--out", f.output, "report JSON")->required();
  an->add_option("--pairing", f.config.pairing, "involution 'a:b,c:d' or 'book'");
  an->add_option("--symmetry-threshold", f.config.symmetry_threshold, "flag level")->capture_default_str();
  an->add_option("--emit-plots", f.plots_dir, "directory for cumulated-kernel and heat-map tables");
  add_common(an, f);

  auto* pipe = app.add_subcommand("pipeline", "simulate or ingest, estimate, solve and analyze");
  pipe->add_option("--model", f.model, "model JSON to simulate");
  pipe->add_option("--events", f.events, "event file to ingest");
  pipe->add_option("--book", f.book, "book update file to classify");
  pipe->add_option("-o,--out-dir", f.output_dir, "output directory");
  pipe->add_option("--horizon", f.config.horizon, "horizon T (s)")->capture_default_str();
  pipe->add_option("--seed", f.config.seed, "random seed")->capture_default_str();
  pipe->add_option("--simulator", f.config.simulator, "branching | thinning")->capture_default_str();
  pipe->add_option("--event-format", f.config.event_format, "tsv | ndjson | bin")->capture_default_str();
  pipe->add_option("--pairing", f.config.pairing, "involution 'a:b,c:d' or 'book'");
  pipe->add_option("--symmetry-threshold", f.config.symmetry_threshold, "flag level")->capture_default_str();
  pipe->add_flag("--emit-plots", f.config.emit_plots, "write figure-style tables under plots/");
  add_claw_flags(pipe, f);
  add_solver_flags(pipe, f);
  add_common(pipe, f);

  CLI11_PARSE(app, argc, argv);

  try {
    const PipelineConfig c = resolve(f);
    if (*sim) {
      const HawkesModel model = load_model(*c.model_path);
      SimulationResult result;
      if (c.simulator == "thinning" || model.mode() == Mode::Rectified) {
        result = simulate_thinning(model, c.horizon, c.seed);
      } else {
        require(c.simulator == "branching", ErrorKind::Domain, "simulator must be branching or thinning");
        BranchingOptions opts;
        opts.record_genealogy = !f.genealogy.empty();
        result = simulate_branching(model, c.horizon, c.seed, opts);
      }
      write_events(result.stream, f.output);
      if (result.genealogy) {
        std::string text = "#component\ttime\tancestor\timmigrant\tcluster\n";
        const auto& g = *result.genealogy;
        for (std::size_t i = 0; i < result.stream.dimension(); ++i) {
          for (std::size_t k = 0; k < result.stream.events[i].size(); ++k) {
            const auto a = g.ancestor_type[i][k];
            text += result.stream.labels[i] + "\t" + format_double(result.stream.events[i][k]) + "\t" +
                    (a < 0 ? std::string("-") : result.stream.labels[static_cast<std::size_t>(a)]) + "\t" +
                    std::to_string(g.immigrant[i][k]) + "\t" + std::to_string(g.cluster[i][k]) + "\n";
          }
        }
        write_file_atomic(f.genealogy, text);
      }
      print_warnings(result.diagnostics.warnings);
      if (!f.quiet) {
        std::cout << "events " << result.stream.total_events() << ", warm-up " << result.diagnostics.warmup
                  << " s, spectral radius " << result.diagnostics.radius << "\n";
      }
    } else if (*cls) {
      const auto out = classify_book_events(load_book_updates(*c.book_path));
      write_events(out.stream, f.output);
      if (!f.quiet) {
        std::cout << "input " << out.input << ", emitted " << out.emitted << " (" << out.price_events
                  << " price moves, " << out.inferred << " inferred), dropped " << out.dropped_total() << "\n";
        for (const auto& [reason, count] : out.dropped) std::cout << "  " << reason << ": " << count << "\n";
      }
    } else if (*claw) {
      const EventStream events = read_events(*c.events_path);
      const auto grid = build_multiscale_grid(c.h_min, c.h_max, c.h_delta);
      const auto result = estimate_claw(events, grid, ClawOptions{c.resolution, c.threads});
      save_claw(result, f.output);
      if (!f.plots_dir.empty()) write_plot_tables(f.plots_dir, &result, nullptr, nullptr);
      if (!f.quiet) std::cout << grid.bins() << " bins up to " << grid.end() << " s\n";
    } else if (*solve) {
      const auto law = load_claw(f.claw);
      SolverOptions options;
      options.strict_coverage = c.strict_coverage;
      options.threads = c.threads;
      const KernelEstimate est =
          c.scheme == Scheme::Adapted
              ? solve_kernels(law, build_quadrature_grid(c.t_min, c.t_max, c.k), options, law.labels())
              : solve_kernels_gauss_logcv(law, c.k, c.t_min, c.t_max, options, law.labels());
      save_estimate(est, f.output);
      if (!f.plots_dir.empty()) write_plot_tables(f.plots_dir, nullptr, &est, nullptr);
      print_warnings(est.diagnostics.warnings);
      if (!f.quiet) {
        std::cout << "condition " << est.diagnostics.condition << ", residual " << est.diagnostics.residual << "\n"
                  << matrix_tsv(est.norm_matrix(), est.labels);
      }
    } else if (*an) {
      const auto est = load_estimate(f.estimate);
      std::optional<Pairing> pairing;
      if (c.pairing == "book") {
        require(est.labels == book_labels(), ErrorKind::Pairing,
                "the book pairing preset needs the level-I component labels");
        pairing = book_pairing();
      } else if (!c.pairing.empty()) {
        pairing = parse_pairing(c.pairing, est.labels);
      }
      SymmetryOptions sym;
      sym.threshold = c.symmetry_threshold;
      const auto report = analyze(est, pairing, sym);
      write_file_atomic(f.output, write_report(report));
      if (!f.plots_dir.empty()) write_plot_tables(f.plots_dir, nullptr, nullptr, &report);
      if (!f.quiet) std::cout << format_tables(report);
    } else if (*pipe) {
      const auto result = run_pipeline(c);
      if (!f.quiet) {
        std::cout << format_tables(result.report) << "manifest: " << result.manifest_path.string() << "\n";
      }
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
