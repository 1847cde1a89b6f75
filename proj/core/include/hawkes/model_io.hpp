#pragma once

#include "hawkes/model.hpp"

#include <filesystem>
#include <string>

namespace hawkes {

/// Model description document (JSON):
///
///   {
///     "format": "hawkes-model", "version": 1,
///     "dimension": D, "labels": [...], "mode": "linear" | "rectified",
///     "mu": [mu_1, ..., mu_D],
///     "kernels": [ { "target": label_i, "source": label_j, "type": ..., params }, ... ]
///   }
///
/// Kernel blocks are listed row-major (target-major). Parameters per type:
///   power_law:   amplitude, offset, exponent
///   exponential: branching, rate
///   tabulated:   abscissae [...], values [...]
/// Output is canonical, so write(read(x)) == x for any x produced by write.
std::string write_model(const HawkesModel& model);
HawkesModel read_model(const std::string& text);

void save_model(const HawkesModel& model, const std::filesystem::path& path);
HawkesModel load_model(const std::filesystem::path& path);

/// FNV-1a hash of the canonical document, as 16 hex digits.
std::string model_hash(const HawkesModel& model);

}  // namespace hawkes
