#include "ppinfer/events.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "ppinfer/error.hpp"

namespace ppinfer {

EventSeries::EventSeries(double horizon, std::vector<std::vector<double>> replicates)
    : horizon_(horizon), replicates_(std::move(replicates)) {
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) {
    throw ParameterError("event series horizon must be positive and finite");
  }
  if (replicates_.empty()) throw ParameterError("event series needs at least one replicate");
  for (std::size_t j = 0; j < replicates_.size(); ++j) {
    std::sort(replicates_[j].begin(), replicates_[j].end());
    for (double t : replicates_[j]) {
      if (!(t >= 0.0 && t <= horizon_)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "event time " << t << " in replicate " << (j + 1) << " lies outside [0, "
            << horizon_ << "]";
        throw DataError(msg.str());
      }
    }
  }
}

EventSeries EventSeries::empty(double horizon, std::size_t replicate_count) {
  return EventSeries(horizon, std::vector<std::vector<double>>(replicate_count));
}

std::size_t EventSeries::total_events() const {
  std::size_t total = 0;
  for (const auto& r : replicates_) total += r.size();
  return total;
}

BinGrid::BinGrid(std::vector<double> edges) : BinGrid(std::move(edges), false) {}

BinGrid::BinGrid(std::vector<double> edges, bool uniform)
    : edges_(std::move(edges)), uniform_(uniform) {
  if (edges_.size() < 2) throw ParameterError("bin grid needs at least one bin");
  if (edges_.front() != 0.0) throw ParameterError("bin grid must start at 0");
  if (!std::isfinite(edges_.back())) throw ParameterError("bin grid edges must be finite");
  const std::size_t n = edges_.size() - 1;
  widths_.resize(n);
  const double uniform_width = edges_.back() / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!(edges_[k + 1] > edges_[k])) {
      throw ParameterError("bin grid edges must be strictly increasing");
    }
    widths_[k] = uniform_ ? uniform_width : edges_[k + 1] - edges_[k];
  }
}

BinGrid BinGrid::uniform(double horizon, std::size_t bins) {
  if (bins == 0) throw ParameterError("bin count must be at least 1");
  if (!(horizon > 0.0)) throw ParameterError("grid horizon must be positive");
  std::vector<double> edges(bins + 1);
  for (std::size_t k = 0; k < bins; ++k) {
    edges[k] = horizon * static_cast<double>(k) / static_cast<double>(bins);
  }
  edges[bins] = horizon;
  return BinGrid(std::move(edges), true);
}

std::size_t BinGrid::locate(double x) const {
  const std::size_t n = size();
  std::size_t k;
  if (uniform_) {
    const double pos = x / horizon() * static_cast<double>(n);
    k = pos <= 0.0 ? 0 : std::min(n - 1, static_cast<std::size_t>(pos));
    // Rounding in pos can land one bin off an exact edge; the edges decide.
    while (k > 0 && x < edges_[k]) --k;
    while (k + 1 < n && x >= edges_[k + 1]) ++k;
  } else {
    auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
    const auto idx = static_cast<std::size_t>(std::distance(edges_.begin(), it));
    k = idx == 0 ? 0 : std::min(n, idx) - 1;
  }
  return k;
}

std::uint64_t BinnedCounts::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

PiecewiseIntensity::PiecewiseIntensity(BinGrid grid, std::vector<double> heights)
    : grid_(std::move(grid)), heights_(std::move(heights)) {
  if (heights_.size() != grid_.size()) {
    throw ParameterError("intensity has " + std::to_string(heights_.size()) +
                         " heights for a grid of " + std::to_string(grid_.size()) + " bins");
  }
  for (double h : heights_) {
    if (!(h >= 0.0) || !std::isfinite(h)) {
      throw ParameterError("intensity heights must be finite and nonnegative");
    }
  }
}

double PiecewiseIntensity::evaluate(double x) const {
  if (x < 0.0 || x > grid_.horizon()) return 0.0;
  return heights_[grid_.locate(x)];
}

double PiecewiseIntensity::integral() const {
  double total = 0.0;
  for (std::size_t k = 0; k < heights_.size(); ++k) total += heights_[k] * grid_.width(k);
  return total;
}

BinnedCounts bin_events(const EventSeries& data, const BinGrid& grid) {
  if (data.horizon() != grid.horizon()) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "data horizon " << data.horizon() << " does not match grid horizon " << grid.horizon();
    throw ConfigError(msg.str());
  }
  BinnedCounts out{grid, std::vector<std::uint64_t>(grid.size(), 0), data.replicate_count()};
  for (const auto& rep : data.replicates()) {
    for (double t : rep) ++out.counts[grid.locate(t)];
  }
  return out;
}

double log_likelihood(const BinnedCounts& counts, const PiecewiseIntensity& lambda) {
  if (!(counts.grid == lambda.grid())) {
    throw ConfigError("log_likelihood: counts and intensity use different grids");
  }
  double ll = 0.0;
  const auto& psi = lambda.heights();
  for (std::size_t k = 0; k < psi.size(); ++k) {
    const auto h = static_cast<double>(counts.counts[k]);
    if (h > 0.0) {
      if (psi[k] == 0.0) return -std::numeric_limits<double>::infinity();
      ll += h * std::log(psi[k]);
    }
    ll -= counts.exposure(k) * psi[k];
  }
  return ll;
}

double l2_distance(const PiecewiseIntensity& a, const std::function<double(double)>& b) {
  using Quad = boost::math::quadrature::gauss<double, 10>;
  const auto& grid = a.grid();
  double total = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double lo = grid.lower(k);
    const double hi = grid.upper(k);
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    const double psi = a.heights()[k];
    // Symmetric Gauss-Legendre rule: abscissa 0 is absent for an even order.
    double s = 0.0;
    const auto& x = Quad::abscissa();
    const auto& w = Quad::weights();
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d1 = psi - b(mid + half * x[i]);
      const double d2 = psi - b(mid - half * x[i]);
      s += w[i] * (d1 * d1 + d2 * d2);
    }
    total += half * s;
  }
  return std::sqrt(total);
}

double l2_distance(const PiecewiseIntensity& a, const PiecewiseIntensity& b) {
  if (a.grid().horizon() != b.grid().horizon()) {
    throw ConfigError("l2_distance: step functions live on different horizons");
  }
  std::vector<double> cuts = a.grid().edges();
  cuts.insert(cuts.end(), b.grid().edges().begin(), b.grid().edges().end());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    const double d = a.evaluate(mid) - b.evaluate(mid);
    total += d * d * (cuts[i + 1] - cuts[i]);
  }
  return std::sqrt(total);
}

EventSeries fold_periodic(const EventSeries& data, double period) {
  if (!(period > 0.0) || !std::isfinite(period)) {
    throw ParameterError("fold period must be positive and finite");
  }
  const auto periods =
      static_cast<std::size_t>(std::max(1.0, std::ceil(data.horizon() / period)));
  std::vector<std::vector<double>> out(data.replicate_count() * periods);
  for (std::size_t j = 0; j < data.replicate_count(); ++j) {
    for (double t : data.replicate(j)) {
      double r = std::fmod(t, period);
      auto p = static_cast<std::size_t>(std::llround((t - r) / period));
      if (p >= periods) {
        // t = T on an exact multiple of the period closes the last period.
        p = periods - 1;
        r = t - static_cast<double>(p) * period;
      }
      out[j * periods + p].push_back(std::min(r, period));
    }
  }
  return EventSeries(period, std::move(out));
}

}  // namespace ppinfer
