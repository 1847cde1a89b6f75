#pragma once

#include "hawkes/event_stream.hpp"
#include "hawkes/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hawkes {

struct BranchingOptions {
  /// Upper bound on the burn-in window preceding t = 0.
  double max_warmup = 20000.0;
  /// Replace the history before the burn-in window by its mean field: extra
  /// Poisson immigrants of type i with intensity sum_j Lambda^j * tail_ij(t + W).
  /// Keeps the first-order law exact for long-memory kernels.
  bool ancient_history = true;
  bool record_genealogy = false;
};

struct ThinningOptions {
  double max_warmup = 20000.0;
  bool ancient_history = true;
  /// Past events stop contributing once the residual kernel mass is below
  /// this fraction of the kernel norm.
  double tail_tolerance = 1e-4;
  /// Uniform probe times at which the unclamped intensity sign is recorded.
  std::size_t intensity_probes = 100000;
};

/// Ancestry of every emitted event, aligned with EventStream::events.
struct Genealogy {
  std::vector<std::vector<std::int32_t>> ancestor_type;  // -1: mean-field history
  std::vector<std::vector<std::uint8_t>> immigrant;
  std::vector<std::vector<std::uint64_t>> cluster;       // id of the root immigrant
};

struct SimulationDiagnostics {
  double warmup = 0.0;
  double radius = 0.0;
  bool stationary = true;
  std::size_t generated = 0;           // including burn-in events
  std::size_t ancient_immigrants = 0;  // mean-field history events
  std::size_t proposals = 0;           // thinning only
  /// Fraction of probe times at which every component's raw intensity
  /// mu + phi * dN was positive (thinning only).
  double positive_fraction = 1.0;
  std::vector<double> positive_fraction_per_component;
  std::vector<std::string> warnings;
};

struct SimulationResult {
  EventStream stream;
  SimulationDiagnostics diagnostics;
  std::optional<Genealogy> genealogy;
};

/// Exact cluster construction of a linear Hawkes process on [0, horizon).
SimulationResult simulate_branching(const HawkesModel& model, double horizon, std::uint64_t seed,
                                    const BranchingOptions& options = {});

/// Ogata thinning with a non-increasing dominating intensity; the only
/// simulator for rectified models.
SimulationResult simulate_thinning(const HawkesModel& model, double horizon, std::uint64_t seed,
                                   const ThinningOptions& options = {});

/// Burn-in length: smallest W (doubling search, capped at max_warmup) for
/// which the expected number of events in [0, horizon) descending from
/// immigrants older than -W is below one.
double choose_warmup(const HawkesModel& model, double horizon, double max_warmup, bool* capped = nullptr);

}  // namespace hawkes
