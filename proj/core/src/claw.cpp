#include "hawkes/claw.hpp"

#include "hawkes/error.hpp"
#include "hawkes/io.hpp"
#include "parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace hawkes {

using nlohmann::json;

MultiscaleGrid build_multiscale_grid(double h_min, double h_max, double h_delta) {
  require(std::isfinite(h_min) && std::isfinite(h_max) && h_min > 0.0 && h_max >= h_min, ErrorKind::Domain,
          "claw grid needs 0 < h_min <= h_max");
  require(h_delta > 0.0 && h_delta < 1.0, ErrorKind::Domain, "claw grid needs 0 < h_delta < 1");
  MultiscaleGrid grid;
  grid.h_min = h_min;
  grid.h_max = h_max;
  grid.h_delta = h_delta;
  grid.uniform_intervals = static_cast<std::size_t>(std::max(1.0, std::round(1.0 / h_delta)));
  const double step = h_min / static_cast<double>(grid.uniform_intervals);
  for (std::size_t k = 0; k < grid.uniform_intervals; ++k) grid.points.push_back(static_cast<double>(k) * step);
  grid.points.push_back(h_min);
  // the small slack keeps exact ratios such as e^{k h_delta} from gaining a point
  const auto n = static_cast<std::size_t>(std::ceil(std::log(h_max / h_min) / h_delta - 1e-9));
  for (std::size_t k = 1; k <= n; ++k) grid.points.push_back(h_min * std::exp(static_cast<double>(k) * h_delta));
  return grid;
}

// ---------------------------------------------------------------------------
// ConditionalLawMatrix

ConditionalLawMatrix::ConditionalLawMatrix(std::vector<std::string> labels, MultiscaleGrid grid,
                                           std::vector<double> lambda, double horizon, std::vector<Pair> pairs,
                                           double resolution)
  : labels_(std::move(labels)),
    grid_(std::move(grid)),
    lambda_(std::move(lambda)),
    horizon_(horizon),
    pairs_(std::move(pairs)),
    resolution_(resolution) {
  const std::size_t d = labels_.size();
  require(d >= 1, ErrorKind::Domain, "conditional law needs at least one component");
  require(grid_.points.size() >= 2, ErrorKind::Domain, "conditional law grid needs at least one bin");
  for (std::size_t l = 1; l < grid_.points.size(); ++l) {
    require(grid_.points[l] > grid_.points[l - 1], ErrorKind::Domain, "claw grid must be strictly increasing");
  }
  require(grid_.points.front() == 0.0, ErrorKind::Domain, "claw grid must start at 0");
  require(lambda_.size() == d, ErrorKind::Domain, "one mean intensity per component");
  for (double l : lambda_) {
    require(std::isfinite(l) && l > 0.0, ErrorKind::EmptyComponent, "mean intensities must be > 0");
  }
  require(pairs_.size() == d * d, ErrorKind::Domain, "conditional law needs D x D pairs");
  const std::size_t bins = grid_.bins();
  for (auto& p : pairs_) {
    require(p.values.size() == bins, ErrorKind::Domain, "one conditional-law value per bin");
    if (p.counts.empty()) p.counts.assign(bins, 0);
    if (p.conditioning.empty()) p.conditioning.assign(bins, 0);
    require(p.counts.size() == bins && p.conditioning.size() == bins, ErrorKind::Domain,
            "counts and conditioning sizes must match the grid");
    for (double v : p.values) require(std::isfinite(v), ErrorKind::Domain, "conditional-law values must be finite");
  }
  midpoints_.resize(bins);
  for (std::size_t l = 0; l < bins; ++l) midpoints_[l] = grid_.midpoint(l);
}

double ConditionalLawMatrix::positive_value(std::size_t i, std::size_t j, double lag) const {
  const auto& v = pair(i, j).values;
  if (lag > midpoints_.back()) return 0.0;
  if (lag <= midpoints_.front()) return v.front();
  const auto k = static_cast<std::size_t>(std::upper_bound(midpoints_.begin(), midpoints_.end(), lag) -
                                          midpoints_.begin()) - 1;
  if (k + 1 >= midpoints_.size()) return v.back();
  const double s = (lag - midpoints_[k]) / (midpoints_[k + 1] - midpoints_[k]);
  return v[k] + s * (v[k + 1] - v[k]);
}

double ConditionalLawMatrix::value(std::size_t i, std::size_t j, double lag) const {
  if (lag >= 0.0) return positive_value(i, j, lag);
  return positive_value(j, i, -lag) * (lambda_[i] / lambda_[j]);
}

double ConditionalLawMatrix::positive_weighted(std::size_t i, std::size_t j, double lo, double hi, double a,
                                               double b) const {
  hi = std::min(hi, midpoints_.back());
  if (!(hi > lo)) return 0.0;
  const auto& v = pair(i, j).values;
  // interpolant nodes: (0, v0), (m_0, v_0), (m_1, v_1), ...
  auto node_x = [&](std::size_t k) { return k == 0 ? 0.0 : midpoints_[k - 1]; };
  auto node_y = [&](std::size_t k) { return k == 0 ? v.front() : v[k - 1]; };
  std::size_t k = 0;
  if (lo > midpoints_.front()) {
    k = static_cast<std::size_t>(std::upper_bound(midpoints_.begin(), midpoints_.end(), lo) - midpoints_.begin());
  }
  double total = 0.0;
  const std::size_t nodes = midpoints_.size() + 1;
  for (; k + 1 < nodes; ++k) {
    const double x0 = node_x(k);
    const double x1 = node_x(k + 1);
    if (x0 >= hi) break;
    const double p = std::max(lo, x0);
    const double q = std::min(hi, x1);
    if (!(q > p)) continue;
    const double y0 = node_y(k);
    const double y1 = node_y(k + 1);
    const double slope = (y1 - y0) / (x1 - x0);
    const double fp = y0 + slope * (p - x0);
    const double fq = y0 + slope * (q - x0);
    const double wp = a + b * p;
    const double wq = a + b * q;
    total += (q - p) / 6.0 * (wp * (2.0 * fp + fq) + wq * (fp + 2.0 * fq));
  }
  return total;
}

double ConditionalLawMatrix::weighted_integral(std::size_t i, std::size_t j, double lo, double hi, double a,
                                               double b) const {
  double total = 0.0;
  if (hi > 0.0) total += positive_weighted(i, j, std::max(lo, 0.0), hi, a, b);
  if (lo < 0.0) {
    // u = -s on the negative half-line
    total += positive_weighted(j, i, -std::min(hi, 0.0), -lo, a, -b) * (lambda_[i] / lambda_[j]);
  }
  return total;
}

ConditionalLaw::SegmentIntegrals ConditionalLawMatrix::integrals(std::size_t i, std::size_t j, double lo,
                                                                 double hi) const {
  return {weighted_integral(i, j, lo, hi, 1.0, 0.0), weighted_integral(i, j, lo, hi, hi, -1.0)};
}

double ConditionalLawMatrix::standard_error(std::size_t i, std::size_t j, std::size_t l) const {
  const auto& p = pair(i, j);
  const double m = static_cast<double>(p.conditioning[l]);
  if (m <= 0.0) return std::numeric_limits<double>::infinity();
  const double w = grid_.width(l);
  const double expected = lambda_[i] * w * m;
  return std::sqrt(std::max(static_cast<double>(p.counts[l]), expected)) / (w * m);
}

bool ConditionalLawMatrix::operator==(const ConditionalLawMatrix& other) const {
  if (labels_ != other.labels_ || grid_.points != other.grid_.points || lambda_ != other.lambda_ ||
      horizon_ != other.horizon_ || resolution_ != other.resolution_ || pairs_.size() != other.pairs_.size()) {
    return false;
  }
  for (std::size_t k = 0; k < pairs_.size(); ++k) {
    const auto& a = pairs_[k];
    const auto& b = other.pairs_[k];
    if (a.values != b.values || a.counts != b.counts || a.conditioning != b.conditioning) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Estimation

std::vector<double> estimate_lambda(const EventStream& events) {
  require(events.horizon > 0.0, ErrorKind::Domain, "horizon must be > 0");
  std::vector<double> lambda;
  for (const auto& seq : events.events) lambda.push_back(static_cast<double>(seq.size()) / events.horizon);
  return lambda;
}

namespace {

// First guess of the bin holding lag u; callers correct it against the grid.
std::size_t guess_bin(const MultiscaleGrid& grid, double u) {
  if (grid.uniform_intervals == 0 || grid.h_min <= 0.0 || grid.h_delta <= 0.0) {
    const auto it = std::upper_bound(grid.points.begin(), grid.points.end(), u);
    return it == grid.points.begin() ? 0 : static_cast<std::size_t>(it - grid.points.begin()) - 1;
  }
  if (u < grid.h_min) {
    return static_cast<std::size_t>(std::max(0.0, u / grid.h_min * static_cast<double>(grid.uniform_intervals)));
  }
  return grid.uniform_intervals + static_cast<std::size_t>(std::log(u / grid.h_min) / grid.h_delta);
}

// sum over k in [k0, k1) of #{x < tj[k] + lag}; x ends with a +inf sentinel.
// Independent lanes run interleaved so the merge is not latency bound.
std::uint64_t shifted_count_sum(const std::vector<double>& x, const std::vector<double>& tj, double lag,
                                std::size_t k0, std::size_t k1) {
  constexpr std::size_t lanes = 8;
  if (k1 <= k0) return 0;
  const std::size_t n = k1 - k0;
  std::array<std::size_t, lanes> k{};
  std::array<std::size_t, lanes> stop{};
  std::array<std::size_t, lanes> a{};
  std::array<std::uint64_t, lanes> acc{};
  for (std::size_t q = 0; q < lanes; ++q) {
    k[q] = k0 + n * q / lanes;
    stop[q] = k0 + n * (q + 1) / lanes;
    const double first = k[q] < k1 ? tj[k[q]] + lag : 0.0;
    a[q] = static_cast<std::size_t>(std::lower_bound(x.begin(), x.end() - 1, first) - x.begin());
  }
  const double* xs = x.data();
  const double* ts = tj.data();
  bool busy = true;
  while (busy) {
    busy = false;
    for (std::size_t q = 0; q < lanes; ++q) {
      const bool live = k[q] < stop[q];
      busy |= live;
      const std::size_t kk = live ? k[q] : k0;
      const bool step_i = xs[a[q]] < ts[kk] + lag;
      acc[q] += (live && !step_i) ? a[q] : 0;
      a[q] += live && step_i;
      k[q] += live && !step_i;
    }
  }
  std::uint64_t total = 0;
  for (auto v : acc) total += v;
  return total;
}

ConditionalLawMatrix::Pair estimate_pair(const std::vector<double>& ti, const std::vector<double>& tj, bool self,
                                         double lambda_i, double horizon, const MultiscaleGrid& grid) {
  const std::size_t bins = grid.bins();
  const auto& t = grid.points;
  ConditionalLawMatrix::Pair out;
  out.values.assign(bins, 0.0);
  out.counts.assign(bins, 0);
  out.conditioning.resize(bins);
  for (std::size_t l = 0; l < bins; ++l) {
    out.conditioning[l] = static_cast<std::uint64_t>(
        std::upper_bound(tj.begin(), tj.end(), horizon - t[l + 1]) - tj.begin());
  }
  const std::size_t ni = ti.size();
  const std::size_t nj = tj.size();

  // Short lags are counted pair by pair, long lags by a merge sweep per grid
  // point. The split balances the two costs (a pair visit costs a few sweep steps).
  const double ni_d = static_cast<double>(ni);
  const double nj_d = static_cast<double>(nj);
  const double log_step = grid.h_delta > 0.0 ? grid.h_delta : 0.05;
  const double tau = (ni_d + nj_d) * horizon / (12.0 * log_step * ni_d * nj_d);
  std::size_t split = 0;  // bins [0, split) by enumeration
  while (split < bins && t[split + 1] <= tau) ++split;

  if (split > 0) {
    const double reach = t[split];
    std::size_t start = 0;
    for (std::size_t k = 0; k < out.conditioning[0]; ++k) {
      const double base = tj[k];
      while (start < ni && ti[start] < base) ++start;
      for (std::size_t b = start; b < ni && ti[b] < base + reach; ++b) {
        std::size_t l = std::min(guess_bin(grid, ti[b] - base), split - 1);
        while (l > 0 && ti[b] < base + t[l]) --l;
        while (l + 1 < split && ti[b] >= base + t[l + 1]) ++l;
        if (k < out.conditioning[l]) ++out.counts[l];
      }
    }
  }

  // For grid point p, A_p(m) = sum over k < m of #{T^i < T^j_k + t_p};
  // bin l holds A_{l+1}(m_l) - A_l(m_l).
  std::vector<double> padded(ti);
  padded.push_back(std::numeric_limits<double>::infinity());
  std::vector<std::uint64_t> lower(bins, 0);  // A_l(m_l)
  std::vector<std::uint64_t> upper(bins, 0);  // A_{l+1}(m_l)
  for (std::size_t p = split; p <= bins; ++p) {
    const std::size_t m_here = p < bins ? out.conditioning[p] : 0;
    const std::size_t m_prev = p > split ? out.conditioning[p - 1] : 0;
    const std::size_t lo = std::min(m_here, m_prev);
    const std::size_t hi = std::max(m_here, m_prev);
    const std::uint64_t a_lo = shifted_count_sum(padded, tj, t[p], 0, lo);
    const std::uint64_t a_hi = a_lo + shifted_count_sum(padded, tj, t[p], lo, hi);
    if (p < bins) lower[p] = m_here == lo ? a_lo : a_hi;
    if (p > split) upper[p - 1] = m_prev == lo ? a_lo : a_hi;
  }
  for (std::size_t l = 0; l < bins; ++l) {
    std::uint64_t count = l < split ? out.counts[l] : upper[l] - lower[l];
    if (self && l == 0) count -= out.conditioning[0];
    out.counts[l] = count;
    const double m = static_cast<double>(out.conditioning[l]);
    if (m > 0.0) out.values[l] = static_cast<double>(count) / (grid.width(l) * m) - lambda_i;
  }
  return out;
}

}  // namespace

ConditionalLawMatrix estimate_claw(const EventStream& events, const MultiscaleGrid& grid, const ClawOptions& options) {
  events.validate();
  const std::size_t d = events.dimension();
  require(grid.points.size() >= 2, ErrorKind::Domain, "claw grid needs at least one bin");
  require(grid.end() <= events.horizon, ErrorKind::Domain,
          "claw grid end " + format_double(grid.end()) + " s exceeds the horizon " + format_double(events.horizon) +
              " s");
  for (std::size_t i = 0; i < d; ++i) {
    require(!events.events[i].empty(), ErrorKind::EmptyComponent,
            "component '" + events.labels[i] + "' has no events");
  }
  const auto lambda = estimate_lambda(events);
  std::vector<ConditionalLawMatrix::Pair> pairs(d * d);
  detail::parallel_for(d * d, options.threads, [&](std::size_t k) {
    const std::size_t i = k / d;
    const std::size_t j = k % d;
    pairs[k] = estimate_pair(events.events[i], events.events[j], i == j, lambda[i], events.horizon, grid);
  });
  return ConditionalLawMatrix(events.labels, grid, lambda, events.horizon, std::move(pairs), options.resolution);
}

double claw_eval(const ConditionalLaw& claw, std::size_t i, std::size_t j, double t) { return claw.value(i, j, t); }

ClawIntegrals claw_integrals(const ConditionalLawMatrix& claw, std::size_t i, std::size_t j, double x) {
  if (x >= 0.0) return {claw.weighted_integral(i, j, 0.0, x, 1.0, 0.0), claw.weighted_integral(i, j, 0.0, x, 0.0, 1.0)};
  return {-claw.weighted_integral(i, j, x, 0.0, 1.0, 0.0), -claw.weighted_integral(i, j, x, 0.0, 0.0, 1.0)};
}

// ---------------------------------------------------------------------------
// Serialization

std::string write_claw(const ConditionalLawMatrix& claw) {
  json doc;
  doc["format"] = "hawkes-claw";
  doc["version"] = 1;
  doc["labels"] = claw.labels();
  doc["horizon"] = claw.horizon();
  doc["resolution"] = claw.resolution();
  const auto& g = claw.grid();
  doc["grid"] = {{"h_min", g.h_min},
                 {"h_max", g.h_max},
                 {"h_delta", g.h_delta},
                 {"uniform_intervals", g.uniform_intervals},
                 {"points", g.points}};
  doc["lambda"] = claw.lambda();
  json pairs = json::array();
  const std::size_t d = claw.dimension();
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const auto& p = claw.pair(i, j);
      pairs.push_back({{"target", claw.labels()[i]},
                       {"source", claw.labels()[j]},
                       {"values", p.values},
                       {"counts", p.counts},
                       {"conditioning", p.conditioning}});
    }
  }
  doc["pairs"] = std::move(pairs);
  return doc.dump(1) + "\n";
}

ConditionalLawMatrix read_claw(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::Format, std::string("claw file is not valid JSON: ") + e.what());
  }
  try {
    require(doc.value("format", std::string()) == "hawkes-claw", ErrorKind::Format,
            "claw file: missing format tag 'hawkes-claw'");
    require(doc.at("version").get<int>() == 1, ErrorKind::Format, "claw file: unsupported version");
    auto labels = doc.at("labels").get<std::vector<std::string>>();
    const auto& gj = doc.at("grid");
    MultiscaleGrid grid;
    grid.h_min = gj.at("h_min").get<double>();
    grid.h_max = gj.at("h_max").get<double>();
    grid.h_delta = gj.at("h_delta").get<double>();
    grid.uniform_intervals = gj.at("uniform_intervals").get<std::size_t>();
    grid.points = gj.at("points").get<std::vector<double>>();
    const std::size_t d = labels.size();
    std::vector<ConditionalLawMatrix::Pair> pairs(d * d);
    std::vector<bool> seen(d * d, false);
    auto index_of = [&labels](const std::string& label) {
      const auto it = std::find(labels.begin(), labels.end(), label);
      require(it != labels.end(), ErrorKind::Format, "claw file: unknown label '" + label + "'");
      return static_cast<std::size_t>(it - labels.begin());
    };
    for (const auto& block : doc.at("pairs")) {
      const std::size_t k =
          index_of(block.at("target").get<std::string>()) * d + index_of(block.at("source").get<std::string>());
      require(!seen[k], ErrorKind::Format, "claw file: duplicate pair");
      seen[k] = true;
      pairs[k].values = block.at("values").get<std::vector<double>>();
      pairs[k].counts = block.value("counts", std::vector<std::uint64_t>{});
      pairs[k].conditioning = block.value("conditioning", std::vector<std::uint64_t>{});
    }
    require(std::all_of(seen.begin(), seen.end(), [](bool s) { return s; }), ErrorKind::Format,
            "claw file: missing pairs");
    return ConditionalLawMatrix(std::move(labels), std::move(grid), doc.at("lambda").get<std::vector<double>>(),
                                doc.at("horizon").get<double>(), std::move(pairs),
                                doc.value("resolution", 0.0));
  } catch (const json::exception& e) {
    fail(ErrorKind::Format, std::string("claw file: ") + e.what());
  }
}

void save_claw(const ConditionalLawMatrix& claw, const std::filesystem::path& path) {
  write_file_atomic(path, write_claw(claw));
}

ConditionalLawMatrix load_claw(const std::filesystem::path& path) { return read_claw(read_file(path)); }

}  // namespace hawkes
