#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "balnet/balance.hpp"
#include "balnet/correlation.hpp"
#include "balnet/matrix_io.hpp"
#include "balnet/panel.hpp"
#include "balnet/preprocess.hpp"

namespace balnet {

struct PipelineOptions {
  CorrKind corr_kind = CorrKind::kPhi;
  MedianScope median_scope = MedianScope::kUniverse;
  double alpha = 0.1;
  // Optional on-disk cache of per-window correlation matrices.
  const MatrixCache* cache = nullptr;
  std::string cache_tag;
};

/// Correlation matrix of one return window over its surviving assets:
///   phi              binarized partial returns (complete-case, non-constant),
///   pearson          partial (median-removed) returns,
///   partial_pearson  raw returns with the leading eigenpair removed.
CorrMatrix window_correlation(const ReturnPanel& window, CorrKind kind, MedianScope scope);

/// A contiguous run of `length` return rows ending at row `end`.
struct WindowRef {
  std::size_t end = 0;
  std::size_t length = 0;
  std::size_t first() const { return end + 1 - length; }
};

/// Sign-switch classification problem for one (in, out) window pair.
/// `labels[k]` is 1 when pair k changed sign between the windows. Scores
/// are oriented so that larger means "more likely to switch".
struct SignChangeDataset {
  std::string end_in;
  std::size_t T_in = 0;
  std::size_t T_out = 0;
  std::vector<std::string> assets;  // common to both windows
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<std::uint8_t> labels;
  std::vector<double> delta_in;   // in-sample Delta_ij
  std::vector<double> absphi_in;  // in-sample |corr_ij|
  std::vector<double> scores_delta;   // -Delta_ij
  std::vector<double> scores_absphi;  // -|corr_ij|
  double H_in = 0.0;
  double H_out = 0.0;
  double volatility_in = 0.0;

  std::size_t num_pairs() const { return pairs.size(); }
  std::size_t num_switches() const;
};

/// Core construction from the two windows' correlation matrices. Both are
/// restricted to their common assets (in `in.assets` order); throws
/// DataError with fewer than 3 common assets.
SignChangeDataset build_dataset(const CorrMatrix& in, const CorrMatrix& out);

/// Windows given explicitly on a return panel; throws DomainError if the
/// out-of-sample window does not start strictly after the in-sample one.
SignChangeDataset build_dataset(const ReturnPanel& returns, WindowRef in, WindowRef out,
                                const PipelineOptions& opts);

/// In-sample window of T_in returns ending at `end_in`, out-of-sample window
/// of the next T_out returns.
SignChangeDataset build_dataset(const PricePanel& panel, std::string_view end_in, std::size_t T_in,
                                std::size_t T_out, const PipelineOptions& opts);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocResult {
  std::vector<RocPoint> points;  // (0,0) ... (1,1)
  double auc = 0.5;
};

/// Threshold sweep over distinct scores (descending) plus the rank-statistic
/// AUC. Label 1 is the positive class. Throws DomainError unless both classes
/// are present.
RocResult roc(std::span<const std::uint8_t> labels, std::span<const double> scores);

/// Mann-Whitney AUC: P(score_pos > score_neg) + P(tie) / 2, via midranks.
double rank_auc(std::span<const std::uint8_t> labels, std::span<const double> scores);

double trapezoid_area(std::span<const RocPoint> points);

enum class Discriminator { kDelta, kAbsPhi };

std::string_view to_string(Discriminator d);

struct ProfileBin {
  double center = 0.0;
  std::optional<double> p_preserved;  // nullopt for empty bins
  std::size_t count = 0;
};

/// Fraction of pairs keeping their sign, per bin of the raw discriminator
/// (Delta over [-1, 1], |phi| over [0, 1]).
std::vector<ProfileBin> stability_profile(const SignChangeDataset& ds, Discriminator which,
                                          double bin_width = 0.05);

struct ExperimentRecord {
  std::string end_date;
  std::size_t T_in = 0;
  std::size_t T_out = 0;
  double q_in = 0.0;
  double q_out = 0.0;
  double auc_delta = 0.5;
  double auc_absphi = 0.5;
  double H_in = 0.0;
  double H_out = 0.0;
  double volatility = 0.0;
  std::size_t n_pairs = 0;
};

/// Scores one dataset; nullopt when labels are single-class.
std::optional<ExperimentRecord> score_dataset(const SignChangeDataset& ds);

struct GridCell {
  std::size_t T_in = 0;
  std::size_t T_out = 0;
  std::size_t n_records = 0;
  std::size_t n_skipped = 0;   // feasible dates with single-class labels or < 3 common assets
  double mean_auc_delta = 0.0;   // NaN without records
  double mean_auc_absphi = 0.0;  // NaN without records
};

struct GridResult {
  std::vector<std::size_t> t_values;
  std::vector<ExperimentRecord> records;  // sorted by (T_in, T_out, end_date)
  std::vector<GridCell> cells;            // row-major over (T_in, T_out)

  const GridCell& cell(std::size_t T_in, std::size_t T_out) const;
};

/// Ten window lengths from 20 to 2000 in geometric progression.
std::vector<std::size_t> default_window_lengths();

/// Candidate in-sample end rows: every `step`-th return row (rows with
/// (row + 1) % step == 0), kept when both windows fit in the panel.
std::vector<std::size_t> feasible_ends(std::size_t num_returns, std::size_t T_in, std::size_t T_out,
                                       std::size_t step);

/// Runs every (T_in, T_out) cell over every feasible end date. `jobs` worker
/// threads (0 = hardware concurrency); results do not depend on `jobs`.
GridResult run_grid(const ReturnPanel& returns, const std::vector<std::size_t>& t_values, std::size_t step,
                    const PipelineOptions& opts, std::size_t jobs = 1);
GridResult run_grid(const PricePanel& panel, const std::vector<std::size_t>& t_values, std::size_t step,
                    const PipelineOptions& opts, std::size_t jobs = 1);

struct Association {
  double pearson = 0.0;
  double spearman = 0.0;
};

/// Correlation between auc_delta and H_out across records.
Association h_auc_association(std::span<const ExperimentRecord> records);

/// Network and balance diagnostics of one rolling window.
struct TimeseriesRow {
  std::string end_date;
  double H = 0.0;
  std::optional<double> G;  // positive SVN assortativity, when reportable
  double density = 0.0;
  std::int64_t m = 0;
  std::size_t n = 0;
  double volatility = 0.0;
  double lambda1_frac = 0.0;
  std::optional<double> v1_overlap;  // against the next non-overlapping window
};

std::vector<TimeseriesRow> run_timeseries(const ReturnPanel& returns, std::size_t window, std::size_t step,
                                          const PipelineOptions& opts, std::size_t jobs = 1);

// CSV renderings (fixed 12-digit numbers, "NA" for undefined values).
std::string records_csv(std::span<const ExperimentRecord> records);
std::string cells_csv(const GridResult& grid);
enum class HeatmapValue { kAucDelta, kAucAbsPhi, kDifference };
std::string heatmap_csv(const GridResult& grid, HeatmapValue which);
std::string timeseries_csv(std::span<const TimeseriesRow> rows);
std::string roc_csv(const RocResult& delta, const RocResult& absphi);
std::string stability_profile_csv(const std::vector<ProfileBin>& delta, const std::vector<ProfileBin>& absphi);

}  // namespace balnet
