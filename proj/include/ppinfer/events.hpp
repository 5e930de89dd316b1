#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace ppinfer {

/// n replicated point patterns observed on [0, T]. Each replicate is kept sorted.
class EventSeries {
 public:
  /// Throws DataError when a time falls outside [0, T]; ParameterError for T <= 0 or n = 0.
  EventSeries(double horizon, std::vector<std::vector<double>> replicates);

  /// n replicates with no events.
  static EventSeries empty(double horizon, std::size_t replicate_count = 1);

  [[nodiscard]] double horizon() const { return horizon_; }
  [[nodiscard]] std::size_t replicate_count() const { return replicates_.size(); }
  [[nodiscard]] std::span<const double> replicate(std::size_t j) const { return replicates_.at(j); }
  [[nodiscard]] const std::vector<std::vector<double>>& replicates() const { return replicates_; }
  /// Total number of points over all replicates.
  [[nodiscard]] std::size_t total_events() const;

  friend bool operator==(const EventSeries&, const EventSeries&) = default;

 private:
  double horizon_;
  std::vector<std::vector<double>> replicates_;
};

/// Partition 0 = b_0 < b_1 < ... < b_N = T into bins [b_{k-1}, b_k), last bin closed.
class BinGrid {
 public:
  /// Arbitrary strictly increasing edges starting at 0.
  explicit BinGrid(std::vector<double> edges);
  /// N bins of width exactly T / N.
  static BinGrid uniform(double horizon, std::size_t bins);

  [[nodiscard]] std::size_t size() const { return widths_.size(); }
  [[nodiscard]] double horizon() const { return edges_.back(); }
  [[nodiscard]] const std::vector<double>& edges() const { return edges_; }
  [[nodiscard]] const std::vector<double>& widths() const { return widths_; }
  [[nodiscard]] double width(std::size_t k) const { return widths_[k]; }
  [[nodiscard]] double lower(std::size_t k) const { return edges_[k]; }
  [[nodiscard]] double upper(std::size_t k) const { return edges_[k + 1]; }
  [[nodiscard]] bool is_uniform() const { return uniform_; }

  /// 0-based index of the bin containing x in [0, T]; x = T belongs to the last bin.
  [[nodiscard]] std::size_t locate(double x) const;

  friend bool operator==(const BinGrid&, const BinGrid&) = default;

 private:
  BinGrid(std::vector<double> edges, bool uniform);

  std::vector<double> edges_;
  std::vector<double> widths_;
  bool uniform_ = false;
};

/// Per-bin event counts H_k pooled over n replicates: the sufficient statistics.
struct BinnedCounts {
  BinGrid grid;
  std::vector<std::uint64_t> counts;
  std::size_t replicates = 1;

  [[nodiscard]] std::uint64_t total() const;
  /// n * Delta_k, the exposure of bin k.
  [[nodiscard]] double exposure(std::size_t k) const {
    return static_cast<double>(replicates) * grid.width(k);
  }
};

/// Step function sum_k psi_k 1_{B_k}.
class PiecewiseIntensity {
 public:
  PiecewiseIntensity(BinGrid grid, std::vector<double> heights);

  [[nodiscard]] const BinGrid& grid() const { return grid_; }
  [[nodiscard]] const std::vector<double>& heights() const { return heights_; }
  [[nodiscard]] double evaluate(double x) const;
  [[nodiscard]] double operator()(double x) const { return evaluate(x); }
  /// sum_k psi_k Delta_k.
  [[nodiscard]] double integral() const;

 private:
  BinGrid grid_;
  std::vector<double> heights_;
};

BinnedCounts bin_events(const EventSeries& data, const BinGrid& grid);

/// sum_k [H_k log psi_k - n Delta_k psi_k]; -infinity when some psi_k = 0 has H_k > 0.
double log_likelihood(const BinnedCounts& counts, const PiecewiseIntensity& lambda);

/// ||a - b||_2 on [0, T] by 10-point Gauss-Legendre quadrature on every bin of a.
double l2_distance(const PiecewiseIntensity& a, const std::function<double(double)>& b);
/// Exact ||a - b||_2 for two step functions on the same horizon.
double l2_distance(const PiecewiseIntensity& a, const PiecewiseIntensity& b);

/// Wraps times modulo `period`; every period of every replicate becomes one replicate.
EventSeries fold_periodic(const EventSeries& data, double period);

}  // namespace ppinfer
