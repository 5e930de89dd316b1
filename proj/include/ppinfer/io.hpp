#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ppinfer/events.hpp"
#include "ppinfer/gmc.hpp"

namespace ppinfer {

// ---------------------------------------------------------------------------
// Event files
//
// csv:   optional "# horizon=T replicates=n" comment, then a "replicate,time"
//        header and one row per event. Labels are positive integers.
// plain: one time per line, a single replicate. '#' lines are comments.
// ---------------------------------------------------------------------------

enum class EventFormat { Auto, Csv, Plain };

EventFormat parse_event_format(const std::string& name);

struct IngestResult {
  EventSeries events;
  std::vector<std::string> warnings;
  /// The horizon was not supplied and was taken from the largest time.
  bool horizon_from_data = false;
};

/// `horizon` overrides any horizon in the file. `source` names the input in messages.
IngestResult ingest_events(std::istream& in, EventFormat format,
                           std::optional<double> horizon = std::nullopt,
                           const std::string& source = "<input>");
/// Reads `path`, or standard input when `path` is "-".
IngestResult ingest_events_file(const std::string& path, EventFormat format,
                                std::optional<double> horizon = std::nullopt);

/// Writes the csv form with its metadata comment; re-ingesting gives back `events` exactly.
void write_events(std::ostream& out, const EventSeries& events);

// ---------------------------------------------------------------------------
// Fit configuration and report
// ---------------------------------------------------------------------------

enum class FitMethod { Conjugate, Gmc, Rj };

std::string to_string(FitMethod m);
FitMethod parse_fit_method(const std::string& name);

/// "N" | "rule" | "ebayes" | "ebayes:a..b"
struct GridSpec {
  enum class Mode { Explicit, Rule, EBayes };

  Mode mode = Mode::Rule;
  std::size_t bins = 0;
  /// EBayes range; last == 0 means the default candidate range.
  std::size_t first = 1;
  std::size_t last = 0;

  static GridSpec parse(const std::string& text);
  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// "exp:r" | "gamma:a,b" | "uniform:u" | "levy"
AlphaPrior parse_alpha_prior(const std::string& text);
std::string to_string(const AlphaPrior& prior);

struct FitConfig {
  FitMethod method = FitMethod::Gmc;
  GridSpec grid;
  /// Independent gamma prior (conjugate fit, rj within-model prior, ebayes).
  double alpha = 0.1;
  /// Empty means "auto": solve the fixed-point equation for beta.
  std::optional<double> beta = 0.1;
  double alpha1 = 0.1;
  double beta1 = 0.1;
  std::string alpha_prior = "exp:0.1";
  bool tie_alpha = true;
  double alpha_zeta = 1.0;
  double alpha_psi = 1.0;
  double eta = 0.45;
  /// "uniform:Nmax" | "poisson:mean,Nmax"
  std::string model_prior = "uniform:50";
  std::size_t iterations = 30000;
  double burn_in_fraction = 0.5;
  std::optional<std::uint64_t> seed;
  std::vector<double> levels{0.75, 0.95};
  std::optional<double> period;
  std::optional<double> horizon;

  void validate() const;
  [[nodiscard]] std::size_t burn_in() const;

  friend bool operator==(const FitConfig&, const FitConfig&) = default;
};

struct TraceSummary {
  double mean = 0.0;
  double sd = 0.0;
  double q025 = 0.0;
  double median = 0.0;
  double q975 = 0.0;

  friend bool operator==(const TraceSummary&, const TraceSummary&) = default;
};

struct Diagnostics {
  /// Name of the monitored scalar ("alpha", "psi[k]" or "N"); empty for exact fits.
  std::string monitored;
  std::optional<double> acceptance_rate;
  std::optional<TraceSummary> trace;
  /// Autocorrelation at lags 1..20.
  std::vector<double> acf;
  std::optional<double> ess;

  friend bool operator==(const Diagnostics&, const Diagnostics&) = default;
};

struct FitReport {
  FitConfig config;
  double horizon = 1.0;
  bool horizon_from_data = false;
  std::size_t replicates = 1;
  std::size_t total_events = 0;
  std::vector<double> edges;
  std::vector<double> mean;
  std::vector<BandLevel> bands;
  /// Beta actually used by the conjugate fit (differs from the config under "auto").
  std::optional<double> beta_used;
  /// Empirical-Bayes profile (N, log marginal likelihood) when the grid was selected.
  std::vector<std::pair<std::size_t, double>> bin_profile;
  /// (N, kept iterations) for rj fits.
  std::vector<std::pair<std::size_t, std::size_t>> model_frequencies;
  Diagnostics diagnostics;
  std::vector<std::string> warnings;
  double elapsed_seconds = 0.0;
  std::optional<std::uint64_t> seed;

  [[nodiscard]] std::size_t bins() const { return mean.size(); }

  friend bool operator==(const FitReport&, const FitReport&) = default;
};

/// Saved chain: one row per kept iteration with named columns.
struct ChainTable {
  std::vector<std::string> columns;
  /// Row-major values.
  std::vector<double> values;

  [[nodiscard]] std::size_t rows() const { return columns.empty() ? 0 : values.size() / columns.size(); }
  [[nodiscard]] std::vector<double> column(const std::string& name) const;

  friend bool operator==(const ChainTable&, const ChainTable&) = default;
};

struct FitResult {
  FitReport report;
  /// Kept draws of the stochastic methods; empty for the conjugate fit.
  ChainTable chain;
};

/// Runs the configured method. Stochastic methods without a seed draw one from the OS.
FitResult run_fit(const EventSeries& data, const FitConfig& config);

Diagnostics compute_diagnostics(const std::string& name, const std::vector<double>& series,
                                std::size_t max_lag = 20);

std::string report_to_json(const FitReport& report);
FitReport report_from_json(const std::string& text);

/// Long format: bin_index, edge_lo, edge_hi, mean, then lo_<level>, hi_<level> per level.
void write_report_csv(std::ostream& out, const FitReport& report);
/// Recovers edges, mean and bands; everything else keeps its default value.
FitReport read_report_csv(std::istream& in);

enum class ReportFormat { Json, Csv };
ReportFormat parse_report_format(const std::string& name);

/// Writes to `path` ("-" for `stdout`). Throws Error with the OS message on failure.
void write_report(const FitReport& report, const std::string& path, ReportFormat format,
                  std::ostream& stdout_stream);
FitReport read_report(const std::string& path, ReportFormat format);

void write_chain_csv(std::ostream& out, const ChainTable& chain);
ChainTable read_chain_csv(std::istream& in, const std::string& source = "<chain>");

}  // namespace ppinfer
