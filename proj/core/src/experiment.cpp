#include "balnet/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>
#include <unordered_set>

#include "balnet/csv.hpp"
#include "balnet/errors.hpp"
#include "balnet/graphmetrics.hpp"
#include "balnet/stats.hpp"
#include "balnet/svn.hpp"
#include "parallel.hpp"

namespace balnet {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_window(const ReturnPanel& r, WindowRef w, std::string_view what) {
  if (w.length == 0) throw DomainError(std::string(what) + " window length must be positive");
  if (w.end >= r.num_dates()) {
    throw DataError("insufficient history: " + std::string(what) + " window ends past the last available return");
  }
  if (w.end + 1 < w.length) {
    throw DataError("insufficient history: " + std::string(what) + " window of " + std::to_string(w.length) +
                    " returns ending at " + r.dates[w.end] + " starts before the first return");
  }
}

CorrMatrix cached_correlation(const ReturnPanel& returns, WindowRef w, const PipelineOptions& opts) {
  CacheKey key;
  if (opts.cache) {
    key = CacheKey{returns.dates[w.end], w.length, opts.corr_kind,
                   opts.cache_tag.empty() ? std::string(to_string(opts.median_scope))
                                          : opts.cache_tag + "-" + std::string(to_string(opts.median_scope))};
    if (auto hit = opts.cache->load(key)) return std::move(*hit);
  }
  CorrMatrix m = window_correlation(slice_rows(returns, w.end, w.length), opts.corr_kind, opts.median_scope);
  if (opts.cache) opts.cache->store(key, m);
  return m;
}

std::vector<std::string> common_assets(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::unordered_set<std::string_view> in_b(b.begin(), b.end());
  std::vector<std::string> out;
  for (const auto& x : a) {
    if (in_b.count(x)) out.push_back(x);
  }
  return out;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return kNaN;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::string fmt_opt(const std::optional<double>& v) {
  return v ? csv::format_number(*v) : std::string(csv::kNull);
}

}  // namespace

CorrMatrix window_correlation(const ReturnPanel& window, CorrKind kind, MedianScope scope) {
  switch (kind) {
    case CorrKind::kPhi:
      return phi_matrix(binarize(window, scope));
    case CorrKind::kPearson: {
      const ReturnPanel partial = drop_constant_columns(partial_returns(window, scope));
      if (partial.num_assets() == 0) throw DataError("no usable assets in window");
      CorrMatrix m = pearson_matrix(partial, false);
      m.kind = CorrKind::kPearson;
      return m;
    }
    case CorrKind::kPartialPearson: {
      const ReturnPanel raw = drop_constant_columns(complete_case(window));
      if (raw.num_assets() == 0) throw DataError("no usable assets in window");
      return partial_pearson(raw);
    }
  }
  throw DomainError("unknown correlation kind");
}

std::size_t SignChangeDataset::num_switches() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), std::uint8_t{1}));
}

SignChangeDataset build_dataset(const CorrMatrix& in, const CorrMatrix& out) {
  SignChangeDataset ds;
  ds.assets = common_assets(in.assets, out.assets);
  if (ds.assets.size() < 3) {
    throw DataError("fewer than 3 assets common to both windows (" + std::to_string(ds.assets.size()) + ")");
  }
  const CorrMatrix ci = restrict_to(in, ds.assets);
  const CorrMatrix co = restrict_to(out, ds.assets);
  const SignedMatrix s_in = sign_matrix(ci);
  const SignedMatrix s_out = sign_matrix(co);
  const Eigen::MatrixXd delta = delta_matrix(s_in);
  ds.H_in = hamiltonian(s_in);
  ds.H_out = hamiltonian(s_out);

  const auto n = static_cast<Eigen::Index>(ds.assets.size());
  const auto np = static_cast<std::size_t>(n * (n - 1) / 2);
  ds.pairs.reserve(np);
  ds.labels.reserve(np);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      ds.pairs.emplace_back(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      ds.labels.push_back(s_in.values(i, j) != s_out.values(i, j) ? 1 : 0);
      ds.delta_in.push_back(delta(i, j));
      ds.absphi_in.push_back(std::abs(ci.values(i, j)));
      ds.scores_delta.push_back(-delta(i, j));
      ds.scores_absphi.push_back(-std::abs(ci.values(i, j)));
    }
  }
  return ds;
}

SignChangeDataset build_dataset(const ReturnPanel& returns, WindowRef in, WindowRef out,
                                const PipelineOptions& opts) {
  check_window(returns, in, "in-sample");
  check_window(returns, out, "out-of-sample");
  if (out.first() <= in.end) throw DomainError("out-of-sample window overlaps the in-sample window");
  SignChangeDataset ds = build_dataset(cached_correlation(returns, in, opts), cached_correlation(returns, out, opts));
  ds.end_in = returns.dates[in.end];
  ds.T_in = in.length;
  ds.T_out = out.length;
  ds.volatility_in = volatility(slice_rows(returns, in.end, in.length));
  return ds;
}

SignChangeDataset build_dataset(const PricePanel& panel, std::string_view end_in, std::size_t T_in,
                                std::size_t T_out, const PipelineOptions& opts) {
  const ReturnPanel returns = log_returns(panel);
  const auto end = find_date(returns.dates, end_in);
  if (!end) throw DataError("in-sample end date '" + std::string(end_in) + "' is not a return date of the panel");
  if (T_out == 0) throw DomainError("out-of-sample window length must be positive");
  if (*end + T_out >= returns.num_dates()) {
    throw DataError("insufficient history: out-of-sample window of " + std::to_string(T_out) + " returns after " +
                    std::string(end_in) + " runs past the end of the panel");
  }
  return build_dataset(returns, WindowRef{*end, T_in}, WindowRef{*end + T_out, T_out}, opts);
}

double rank_auc(std::span<const std::uint8_t> labels, std::span<const double> scores) {
  if (labels.size() != scores.size()) throw DomainError("roc: labels and scores differ in length");
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] > 1) throw DomainError("roc: labels must be 0 or 1");
    if (std::isnan(scores[i])) throw DomainError("roc: NaN score");
    n_pos += labels[i];
  }
  const std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw DomainError("roc: need at least one positive and one negative label");
  const auto ranks = stats::midranks(scores);
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i]) rank_sum += ranks[i];
  }
  const double np = static_cast<double>(n_pos);
  const double u = rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(n_neg));
}

RocResult roc(std::span<const std::uint8_t> labels, std::span<const double> scores) {
  RocResult r;
  r.auc = rank_auc(labels, scores);
  std::size_t n_pos = 0;
  for (auto l : labels) n_pos += l;
  const double np = static_cast<double>(n_pos);
  const double nn = static_cast<double>(labels.size() - n_pos);
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  r.points.push_back({0.0, 0.0});
  std::size_t tp = 0, fp = 0;
  for (std::size_t k = 0; k < order.size();) {
    std::size_t g = k;
    while (g < order.size() && scores[order[g]] == scores[order[k]]) {
      if (labels[order[g]]) ++tp; else ++fp;
      ++g;
    }
    r.points.push_back({static_cast<double>(fp) / nn, static_cast<double>(tp) / np});
    k = g;
  }
  return r;
}

double trapezoid_area(std::span<const RocPoint> points) {
  double area = 0.0;
  for (std::size_t k = 1; k < points.size(); ++k) {
    area += (points[k].fpr - points[k - 1].fpr) * (points[k].tpr + points[k - 1].tpr) * 0.5;
  }
  return area;
}

std::string_view to_string(Discriminator d) { return d == Discriminator::kDelta ? "delta" : "absphi"; }

std::vector<ProfileBin> stability_profile(const SignChangeDataset& ds, Discriminator which, double bin_width) {
  if (!(bin_width > 0.0)) throw DomainError("stability profile: bin width must be positive");
  if (ds.num_pairs() == 0) throw DomainError("stability profile: empty dataset");
  const double lo = which == Discriminator::kDelta ? -1.0 : 0.0;
  const double hi = 1.0;
  const auto nbins = static_cast<std::size_t>(std::ceil((hi - lo) / bin_width - 1e-9));
  std::vector<std::size_t> count(nbins, 0), kept(nbins, 0);
  const auto& x = which == Discriminator::kDelta ? ds.delta_in : ds.absphi_in;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double pos = std::floor((x[k] - lo) / bin_width + 1e-9);
    const auto b = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(nbins - 1)));
    ++count[b];
    if (!ds.labels[k]) ++kept[b];
  }
  std::vector<ProfileBin> out(nbins);
  for (std::size_t b = 0; b < nbins; ++b) {
    out[b].center = lo + (static_cast<double>(b) + 0.5) * bin_width;
    out[b].count = count[b];
    if (count[b]) out[b].p_preserved = static_cast<double>(kept[b]) / static_cast<double>(count[b]);
  }
  return out;
}

std::optional<ExperimentRecord> score_dataset(const SignChangeDataset& ds) {
  const std::size_t sw = ds.num_switches();
  if (sw == 0 || sw == ds.num_pairs()) return std::nullopt;
  ExperimentRecord rec;
  rec.end_date = ds.end_in;
  rec.T_in = ds.T_in;
  rec.T_out = ds.T_out;
  const double n = static_cast<double>(ds.assets.size());
  rec.q_in = static_cast<double>(ds.T_in) / n;
  rec.q_out = static_cast<double>(ds.T_out) / n;
  rec.auc_delta = rank_auc(ds.labels, ds.scores_delta);
  rec.auc_absphi = rank_auc(ds.labels, ds.scores_absphi);
  rec.H_in = ds.H_in;
  rec.H_out = ds.H_out;
  rec.volatility = ds.volatility_in;
  rec.n_pairs = ds.num_pairs();
  return rec;
}

const GridCell& GridResult::cell(std::size_t T_in, std::size_t T_out) const {
  for (const auto& c : cells) {
    if (c.T_in == T_in && c.T_out == T_out) return c;
  }
  throw DomainError("grid has no cell (" + std::to_string(T_in) + ", " + std::to_string(T_out) + ")");
}

std::vector<std::size_t> default_window_lengths() {
  std::vector<std::size_t> out;
  for (int k = 0; k < 10; ++k) {
    out.push_back(static_cast<std::size_t>(std::lround(20.0 * std::pow(100.0, k / 9.0))));
  }
  return out;
}

std::vector<std::size_t> feasible_ends(std::size_t num_returns, std::size_t T_in, std::size_t T_out,
                                       std::size_t step) {
  if (step == 0) throw DomainError("grid step must be at least 1");
  std::vector<std::size_t> out;
  if (T_in == 0 || T_out == 0) return out;
  for (std::size_t e = step - 1; e < num_returns; e += step) {
    if (e + 1 >= T_in && e + T_out < num_returns) out.push_back(e);
  }
  return out;
}

GridResult run_grid(const ReturnPanel& returns, const std::vector<std::size_t>& t_values, std::size_t step,
                    const PipelineOptions& opts, std::size_t jobs) {
  if (t_values.empty()) throw DomainError("grid needs at least one window length");
  if (step == 0) throw DomainError("grid step must be at least 1");
  GridResult grid;
  grid.t_values = t_values;
  std::sort(grid.t_values.begin(), grid.t_values.end());
  grid.t_values.erase(std::unique(grid.t_values.begin(), grid.t_values.end()), grid.t_values.end());
  if (grid.t_values.front() == 0) throw DomainError("window lengths must be positive");

  struct Task {
    std::size_t cell;
    std::size_t end;
  };
  std::vector<Task> tasks;
  for (std::size_t a = 0; a < grid.t_values.size(); ++a) {
    for (std::size_t b = 0; b < grid.t_values.size(); ++b) {
      GridCell c;
      c.T_in = grid.t_values[a];
      c.T_out = grid.t_values[b];
      for (std::size_t e : feasible_ends(returns.num_dates(), c.T_in, c.T_out, step)) {
        tasks.push_back({grid.cells.size(), e});
      }
      grid.cells.push_back(c);
    }
  }

  std::vector<std::optional<ExperimentRecord>> outcome(tasks.size());
  detail::parallel_for(tasks.size(), jobs, [&](std::size_t k) {
    const auto& cell = grid.cells[tasks[k].cell];
    const std::size_t e = tasks[k].end;
    try {
      outcome[k] = score_dataset(
          build_dataset(returns, WindowRef{e, cell.T_in}, WindowRef{e + cell.T_out, cell.T_out}, opts));
    } catch (const DataError&) {
      outcome[k].reset();
    } catch (const DomainError&) {
      outcome[k].reset();
    }
  });

  std::vector<std::vector<double>> aucs_delta(grid.cells.size()), aucs_absphi(grid.cells.size());
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    auto& cell = grid.cells[tasks[k].cell];
    if (!outcome[k]) {
      ++cell.n_skipped;
      continue;
    }
    ++cell.n_records;
    aucs_delta[tasks[k].cell].push_back(outcome[k]->auc_delta);
    aucs_absphi[tasks[k].cell].push_back(outcome[k]->auc_absphi);
    grid.records.push_back(std::move(*outcome[k]));
  }
  for (std::size_t c = 0; c < grid.cells.size(); ++c) {
    grid.cells[c].mean_auc_delta = mean_of(aucs_delta[c]);
    grid.cells[c].mean_auc_absphi = mean_of(aucs_absphi[c]);
  }
  std::stable_sort(grid.records.begin(), grid.records.end(), [](const ExperimentRecord& x, const ExperimentRecord& y) {
    return std::tie(x.T_in, x.T_out, x.end_date) < std::tie(y.T_in, y.T_out, y.end_date);
  });
  return grid;
}

GridResult run_grid(const PricePanel& panel, const std::vector<std::size_t>& t_values, std::size_t step,
                    const PipelineOptions& opts, std::size_t jobs) {
  return run_grid(log_returns(panel), t_values, step, opts, jobs);
}

Association h_auc_association(std::span<const ExperimentRecord> records) {
  if (records.size() < 3) throw DomainError("AUC/H association needs at least 3 records");
  std::vector<double> auc, h;
  for (const auto& r : records) {
    auc.push_back(r.auc_delta);
    h.push_back(r.H_out);
  }
  return {stats::pearson(auc, h), stats::spearman(auc, h)};
}

std::vector<TimeseriesRow> run_timeseries(const ReturnPanel& returns, std::size_t window, std::size_t step,
                                          const PipelineOptions& opts, std::size_t jobs) {
  if (window == 0) throw DomainError("timeseries window must be positive");
  if (step == 0) throw DomainError("timeseries step must be at least 1");
  std::vector<std::size_t> ends;
  for (std::size_t e = step - 1; e < returns.num_dates(); e += step) {
    if (e + 1 >= window) ends.push_back(e);
  }
  std::vector<std::optional<TimeseriesRow>> rows(ends.size());
  detail::parallel_for(ends.size(), jobs, [&](std::size_t k) {
    const std::size_t e = ends[k];
    try {
      const ReturnPanel w = slice_rows(returns, e, window);
      const CorrMatrix corr = cached_correlation(returns, WindowRef{e, window}, opts);
      if (corr.size() < 3) return;
      TimeseriesRow row;
      row.end_date = returns.dates[e];
      row.H = hamiltonian(sign_matrix(corr));
      row.lambda1_frac = spectral_diag(corr, 1).fractions.at(0);
      row.volatility = volatility(w);

      const Svn svn = build_svn(binarize(w, opts.median_scope), opts.alpha, Polarity::kPositive);
      const LabeledGraph g = to_graph(svn);
      row.G = reported_assortativity(g);
      row.m = g.num_links();
      row.n = g.num_nodes();
      row.density = g.num_nodes() >= 2 ? link_density(g) : 0.0;

      if (e + window < returns.num_dates()) {
        try {
          const CorrMatrix next = cached_correlation(returns, WindowRef{e + window, window}, opts);
          const auto common = common_assets(corr.assets, next.assets);
          if (common.size() >= 2) {
            row.v1_overlap = eigvec_overlap(spectral_diag(restrict_to(corr, common), 1).v1,
                                            spectral_diag(restrict_to(next, common), 1).v1);
          }
        } catch (const Error&) {
          row.v1_overlap.reset();
        }
      }
      rows[k] = std::move(row);
    } catch (const DataError&) {
    } catch (const DomainError&) {
    }
  });
  std::vector<TimeseriesRow> out;
  for (auto& r : rows) {
    if (r) out.push_back(std::move(*r));
  }
  return out;
}

std::string records_csv(std::span<const ExperimentRecord> records) {
  std::string out = "end_date,T_in,T_out,q_in,q_out,auc_delta,auc_absphi,H_in,H_out,volatility,n_pairs\n";
  for (const auto& r : records) {
    out += csv::join({r.end_date, std::to_string(r.T_in), std::to_string(r.T_out), csv::format_number(r.q_in),
                      csv::format_number(r.q_out), csv::format_number(r.auc_delta), csv::format_number(r.auc_absphi),
                      csv::format_number(r.H_in), csv::format_number(r.H_out), csv::format_number(r.volatility),
                      std::to_string(r.n_pairs)});
    out.push_back('\n');
  }
  return out;
}

std::string cells_csv(const GridResult& grid) {
  std::string out = "T_in,T_out,n_records,n_skipped,mean_auc_delta,mean_auc_absphi,diff\n";
  for (const auto& c : grid.cells) {
    out += csv::join({std::to_string(c.T_in), std::to_string(c.T_out), std::to_string(c.n_records),
                      std::to_string(c.n_skipped), csv::format_number(c.mean_auc_delta),
                      csv::format_number(c.mean_auc_absphi), csv::format_number(c.mean_auc_delta - c.mean_auc_absphi)});
    out.push_back('\n');
  }
  return out;
}

std::string heatmap_csv(const GridResult& grid, HeatmapValue which) {
  std::vector<std::string> header{"T_in"};
  for (auto t : grid.t_values) header.push_back(std::to_string(t));
  std::string out = csv::join(header) + "\n";
  for (auto tin : grid.t_values) {
    std::vector<std::string> row{std::to_string(tin)};
    for (auto tout : grid.t_values) {
      const auto& c = grid.cell(tin, tout);
      double v = c.mean_auc_delta;
      if (which == HeatmapValue::kAucAbsPhi) v = c.mean_auc_absphi;
      if (which == HeatmapValue::kDifference) v = c.mean_auc_delta - c.mean_auc_absphi;
      row.push_back(csv::format_number(v));
    }
    out += csv::join(row) + "\n";
  }
  return out;
}

std::string timeseries_csv(std::span<const TimeseriesRow> rows) {
  std::string out = "date,H,G,density,m,n,volatility,lambda1_frac,v1_overlap\n";
  for (const auto& r : rows) {
    out += csv::join({r.end_date, csv::format_number(r.H), fmt_opt(r.G), csv::format_number(r.density),
                      std::to_string(r.m), std::to_string(r.n), csv::format_number(r.volatility),
                      csv::format_number(r.lambda1_frac), fmt_opt(r.v1_overlap)});
    out.push_back('\n');
  }
  return out;
}

std::string roc_csv(const RocResult& delta, const RocResult& absphi) {
  std::string out = "predictor,fpr,tpr\n";
  auto emit = [&](std::string_view name, const RocResult& r) {
    for (const auto& p : r.points) {
      out += csv::join({std::string(name), csv::format_number(p.fpr), csv::format_number(p.tpr)});
      out.push_back('\n');
    }
  };
  emit("delta", delta);
  emit("absphi", absphi);
  return out;
}

std::string stability_profile_csv(const std::vector<ProfileBin>& delta, const std::vector<ProfileBin>& absphi) {
  std::string out = "predictor,bin_center,p_preserved,count\n";
  auto emit = [&](std::string_view name, const std::vector<ProfileBin>& bins) {
    for (const auto& b : bins) {
      out += csv::join({std::string(name), csv::format_number(b.center), fmt_opt(b.p_preserved),
                        std::to_string(b.count)});
      out.push_back('\n');
    }
  };
  emit("delta", delta);
  emit("absphi", absphi);
  return out;
}

}  // namespace balnet
