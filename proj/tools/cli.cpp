#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "balnet/balance.hpp"
#include "balnet/csv.hpp"
#include "balnet/errors.hpp"
#include "balnet/experiment.hpp"
#include "balnet/graphmetrics.hpp"
#include "balnet/matrix_io.hpp"
#include "balnet/svn.hpp"
#include "balnet/synth.hpp"

#ifndef BALNET_VERSION
#define BALNET_VERSION "dev"
#endif

namespace balnet::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Globals {
  std::size_t jobs = 0;
  bool jobs_set = false;
  std::uint64_t seed = 7;
  int verbosity = 0;
};

struct DataArgs {
  std::string prices = "-";
  std::string sectors;
  std::string format = "long";
  std::string median_scope = "universe";
};

class Context {
 public:
  Context(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}
  std::ostream& out() { return out_; }
  void log(int level, const std::string& msg) {
    if (globals.verbosity >= level) err_ << "balnet: " << msg << '\n';
  }
  Globals globals;

 private:
  std::ostream& out_;
  std::ostream& err_;
};

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  return csv::read_file(path);
}

PricePanel load_data(const DataArgs& a) {
  const PanelFormat format = parse_panel_format(a.format);
  if (a.prices == "-") {
    const std::string prices = read_input("-");
    std::optional<std::string> sectors;
    if (!a.sectors.empty()) sectors = csv::read_file(a.sectors);
    try {
      return parse_panel(prices, sectors ? std::optional<std::string_view>(*sectors) : std::nullopt, format);
    } catch (const DataError& e) {
      throw DataError(std::string("<stdin>: ") + e.what());
    }
  }
  std::optional<fs::path> sectors;
  if (!a.sectors.empty()) sectors = a.sectors;
  return load_panel(a.prices, sectors, format);
}

void add_data_options(CLI::App* sub, DataArgs& a) {
  sub->add_option("--prices", a.prices, "Price CSV ('-' reads standard input)")->capture_default_str();
  sub->add_option("--sectors", a.sectors, "ticker,sector CSV");
  sub->add_option("--format", a.format, "Price CSV layout")
      ->check(CLI::IsMember({"long", "wide"}))
      ->capture_default_str();
  sub->add_option("--median-scope", a.median_scope, "Assets entering each day's median")
      ->check(CLI::IsMember({"universe", "window"}))
      ->capture_default_str();
}

void write_output(Context& ctx, const fs::path& path, const std::string& content) {
  csv::write_file_atomic(path, content);
  ctx.log(1, "wrote " + path.string());
}

std::string json_number(double v) { return std::isfinite(v) ? csv::format_number(v) : "null"; }

std::string fingerprint(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------- ingest-check

void cmd_ingest_check(Context& ctx, const DataArgs& a) {
  const PricePanel p = load_data(a);
  const auto missing = p.present.size() - p.present.count();
  std::set<std::string> sectors(p.sectors.begin(), p.sectors.end());
  const auto unknown = std::count(p.sectors.begin(), p.sectors.end(), std::string(kUnknownSector));
  ctx.out() << "dates=" << p.num_dates() << " assets=" << p.num_assets()
            << " first=" << (p.dates.empty() ? "" : p.dates.front())
            << " last=" << (p.dates.empty() ? "" : p.dates.back()) << " missing_cells=" << missing
            << " sectors=" << sectors.size() << " unknown_sector_assets=" << unknown << '\n';
}

// ------------------------------------------------------------------------- svn

struct SvnArgs {
  std::string end_date;
  std::size_t window = 100;
  double alpha = 0.1;
  std::string polarity = "positive";
  std::string out_dir = ".";
};

void cmd_svn(Context& ctx, const DataArgs& a, const SvnArgs& s) {
  const PricePanel panel = load_data(a);
  const ReturnPanel w = slice_window(log_returns(panel), s.end_date, s.window);
  const Svn svn = build_svn(binarize(w, parse_median_scope(a.median_scope)), s.alpha, parse_polarity(s.polarity));
  const LabeledGraph g = to_graph(svn);
  const auto G = reported_assortativity(g);
  const double density = g.num_nodes() >= 2 ? link_density(g) : 0.0;
  const fs::path dir = s.out_dir;
  write_output(ctx, dir / "svn_edges.csv", svn_edges_csv(svn));
  write_output(ctx, dir / "svn_adjacency.csv", svn_adjacency_csv(svn));
  const std::string g_str = G ? csv::format_number(*G) : std::string(csv::kNull);
  write_output(ctx, dir / "svn_metrics.csv",
               "end_date,G,density,m,n\n" +
                   csv::join({s.end_date, g_str, csv::format_number(density), std::to_string(g.num_links()),
                              std::to_string(g.num_nodes())}) +
                   "\n");
  ctx.out() << "end_date=" << s.end_date << " polarity=" << s.polarity << " n=" << g.num_nodes()
            << " m=" << g.num_links() << " density=" << csv::format_number(density) << " G=" << g_str << '\n';
}

// --------------------------------------------------------------------- balance

struct BalanceArgs {
  std::string end_date;
  std::size_t window = 100;
  std::string corr_kind = "phi";
  std::string out_dir = ".";
  bool delta = false;
};

void cmd_balance(Context& ctx, const DataArgs& a, const BalanceArgs& b) {
  const PricePanel panel = load_data(a);
  const ReturnPanel w = slice_window(log_returns(panel), b.end_date, b.window);
  const CorrMatrix corr = window_correlation(w, parse_corr_kind(b.corr_kind), parse_median_scope(a.median_scope));
  const BalanceReport report = analyze_balance(corr);
  const std::string js = balance_json(b.end_date, report);
  const fs::path dir = b.out_dir;
  write_output(ctx, dir / "balance.json", js);
  if (b.delta) write_output(ctx, dir / "delta.csv", matrix_to_csv(corr.assets, report.delta));
  ctx.out() << js;
}

// --------------------------------------------------------------------- predict

struct PredictArgs {
  std::string end_date;
  std::size_t tin = 0;
  std::size_t tout = 0;
  std::string corr_kind = "phi";
  double bin_width = 0.05;
  std::string out_dir = ".";
};

void cmd_predict(Context& ctx, const DataArgs& a, const PredictArgs& p) {
  const PricePanel panel = load_data(a);
  PipelineOptions opts;
  opts.corr_kind = parse_corr_kind(p.corr_kind);
  opts.median_scope = parse_median_scope(a.median_scope);
  const SignChangeDataset ds = build_dataset(panel, p.end_date, p.tin, p.tout, opts);
  const std::size_t switches = ds.num_switches();
  if (switches == 0 || switches == ds.num_pairs()) {
    throw DataError("no " + std::string(switches == 0 ? "sign switches" : "sign-preserving pairs") +
                    " between the windows; ROC is undefined");
  }
  const RocResult roc_delta = roc(ds.labels, ds.scores_delta);
  const RocResult roc_absphi = roc(ds.labels, ds.scores_absphi);
  const fs::path dir = p.out_dir;
  write_output(ctx, dir / ("roc_" + p.end_date + ".csv"), roc_csv(roc_delta, roc_absphi));
  write_output(ctx, dir / ("stability_profile_" + p.end_date + ".csv"),
               stability_profile_csv(stability_profile(ds, Discriminator::kDelta, p.bin_width),
                                     stability_profile(ds, Discriminator::kAbsPhi, p.bin_width)));
  std::string js = "{\n";
  js += "  \"end_date\": " + json(p.end_date).dump() + ",\n";
  js += "  \"T_in\": " + std::to_string(p.tin) + ",\n";
  js += "  \"T_out\": " + std::to_string(p.tout) + ",\n";
  js += "  \"corr_kind\": " + json(p.corr_kind).dump() + ",\n";
  js += "  \"n_assets\": " + std::to_string(ds.assets.size()) + ",\n";
  js += "  \"n_pairs\": " + std::to_string(ds.num_pairs()) + ",\n";
  js += "  \"n_switches\": " + std::to_string(switches) + ",\n";
  js += "  \"auc_delta\": " + json_number(roc_delta.auc) + ",\n";
  js += "  \"auc_absphi\": " + json_number(roc_absphi.auc) + ",\n";
  js += "  \"H_in\": " + json_number(ds.H_in) + ",\n";
  js += "  \"H_out\": " + json_number(ds.H_out) + "\n}\n";
  write_output(ctx, dir / ("prediction_" + p.end_date + ".json"), js);
  ctx.out() << js;
}

// ------------------------------------------------------------------------ grid

void cmd_grid(Context& ctx, const std::string& config_path) {
  RunConfig cfg = load_config(config_path);
  if (ctx.globals.jobs_set) cfg.jobs = ctx.globals.jobs;
  ctx.globals.verbosity = std::max(ctx.globals.verbosity, cfg.verbosity);

  const std::string prices_bytes = csv::read_file(cfg.prices);
  std::optional<std::string> sectors_bytes;
  if (cfg.sectors) sectors_bytes = csv::read_file(*cfg.sectors);
  PricePanel panel;
  try {
    panel = parse_panel(prices_bytes, sectors_bytes ? std::optional<std::string_view>(*sectors_bytes) : std::nullopt,
                        cfg.format);
  } catch (const DataError& e) {
    throw DataError(cfg.prices.string() + ": " + e.what());
  }
  const ReturnPanel returns = log_returns(panel);
  ctx.log(1, "panel: " + std::to_string(panel.num_dates()) + " dates, " + std::to_string(panel.num_assets()) + " assets");

  std::optional<MatrixCache> cache;
  PipelineOptions opts;
  opts.corr_kind = cfg.corr_kind;
  opts.median_scope = cfg.median_scope;
  opts.alpha = cfg.alpha;
  if (cfg.cache_dir) {
    cache.emplace(*cfg.cache_dir);
    opts.cache = &*cache;
    opts.cache_tag = fingerprint(prices_bytes);
  }

  ctx.log(1, "grid: " + std::to_string(cfg.t_values.size() * cfg.t_values.size()) + " cells");
  const GridResult grid = run_grid(returns, cfg.t_values, cfg.step, opts, cfg.jobs);
  const fs::path dir = cfg.output_dir;
  write_output(ctx, dir / "records.csv", records_csv(grid.records));
  write_output(ctx, dir / "cells.csv", cells_csv(grid));
  write_output(ctx, dir / "heatmap_auc_delta.csv", heatmap_csv(grid, HeatmapValue::kAucDelta));
  write_output(ctx, dir / "heatmap_auc_absphi.csv", heatmap_csv(grid, HeatmapValue::kAucAbsPhi));
  write_output(ctx, dir / "heatmap_diff.csv", heatmap_csv(grid, HeatmapValue::kDifference));

  std::string assoc = "T_in,T_out,n_records,pearson,spearman\n";
  for (const auto& cell : grid.cells) {
    std::vector<ExperimentRecord> sub;
    for (const auto& r : grid.records) {
      if (r.T_in == cell.T_in && r.T_out == cell.T_out) sub.push_back(r);
    }
    std::string pr(csv::kNull), sp(csv::kNull);
    try {
      const Association a = h_auc_association(sub);
      pr = csv::format_number(a.pearson);
      sp = csv::format_number(a.spearman);
    } catch (const DomainError&) {
    }
    assoc += csv::join({std::to_string(cell.T_in), std::to_string(cell.T_out), std::to_string(sub.size()), pr, sp});
    assoc.push_back('\n');
  }
  write_output(ctx, dir / "association.csv", assoc);

  std::size_t ts_rows = 0;
  if (cfg.timeseries_window > 0) {
    const auto rows = run_timeseries(returns, cfg.timeseries_window, cfg.step, opts, cfg.jobs);
    ts_rows = rows.size();
    write_output(ctx, dir / "timeseries.csv", timeseries_csv(rows));
  }
  std::size_t skipped = 0;
  for (const auto& c : grid.cells) skipped += c.n_skipped;
  ctx.out() << "cells=" << grid.cells.size() << " records=" << grid.records.size() << " skipped=" << skipped
            << " timeseries_rows=" << ts_rows << " output_dir=" << dir.string() << '\n';
}

// ----------------------------------------------------------------------- synth

struct SynthArgs {
  std::string model = "bipolar";
  std::size_t n = 150;
  std::size_t t = 600;
  double rho_in = 0.3;
  double rho_out = -0.1;
  double noise = 0.01;
  std::size_t blocks = 0;
  std::vector<std::size_t> block_sizes;
  std::string out = "-";
  std::string sectors_out;
};

void cmd_synth(Context& ctx, const SynthArgs& s) {
  SynthSpec spec;
  spec.model = parse_synth_model(s.model);
  spec.n_assets = s.n;
  spec.n_days = s.t;
  spec.rho_in = s.rho_in;
  spec.rho_out = s.rho_out;
  spec.noise_scale = s.noise;
  spec.seed = ctx.globals.seed;
  spec.block_sizes = s.block_sizes;
  if (spec.block_sizes.empty() && s.blocks > 0) {
    for (std::size_t g = 0; g < s.blocks; ++g) {
      spec.block_sizes.push_back(s.n / s.blocks + (g < s.n % s.blocks ? 1 : 0));
    }
  }
  const PricePanel panel = generate(spec);
  const std::string body = to_long_csv(panel);
  if (s.out == "-") {
    ctx.out() << body;
  } else {
    write_output(ctx, s.out, body);
  }
  if (!s.sectors_out.empty()) write_output(ctx, s.sectors_out, to_sectors_csv(panel));
}

std::size_t get_size(const json& j, const char* key) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    throw UsageError(std::string("'") + key + "' must be a non-negative integer");
  }
  return j.get<std::size_t>();
}

}  // namespace

RunConfig load_config(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw UsageError("config file not found: " + path.string());
  json j;
  try {
    j = json::parse(csv::read_file(path));
  } catch (const json::exception& e) {
    throw UsageError("config " + path.string() + ": invalid JSON: " + e.what());
  }
  if (!j.is_object()) throw UsageError("config " + path.string() + ": top level must be an object");

  const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };
  RunConfig cfg;
  cfg.t_values = default_window_lengths();
  bool have_prices = false;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "prices") {
        cfg.prices = resolve(value.get<std::string>());
        have_prices = true;
      } else if (key == "sectors") {
        if (!value.is_null()) cfg.sectors = resolve(value.get<std::string>());
      } else if (key == "format") {
        cfg.format = parse_panel_format(value.get<std::string>());
      } else if (key == "corr_kind") {
        cfg.corr_kind = parse_corr_kind(value.get<std::string>());
      } else if (key == "alpha") {
        cfg.alpha = value.get<double>();
      } else if (key == "t_values") {
        cfg.t_values.clear();
        for (const auto& t : value) cfg.t_values.push_back(get_size(t, "t_values"));
      } else if (key == "step") {
        cfg.step = get_size(value, "step");
      } else if (key == "median_scope") {
        cfg.median_scope = parse_median_scope(value.get<std::string>());
      } else if (key == "output_dir") {
        cfg.output_dir = resolve(value.get<std::string>());
      } else if (key == "timeseries_window") {
        cfg.timeseries_window = get_size(value, "timeseries_window");
      } else if (key == "cache_dir") {
        if (!value.is_null()) cfg.cache_dir = resolve(value.get<std::string>());
      } else if (key == "jobs") {
        cfg.jobs = get_size(value, "jobs");
      } else if (key == "seed") {
        cfg.seed = value.get<std::uint64_t>();
      } else if (key == "verbosity") {
        cfg.verbosity = value.get<int>();
      } else {
        throw UsageError("unknown key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw UsageError("config " + path.string() + ": " + e.what());
  } catch (const UsageError& e) {
    throw UsageError("config " + path.string() + ": " + e.what());
  } catch (const DomainError& e) {
    throw UsageError("config " + path.string() + ": " + e.what());
  }
  const std::string where = "config " + path.string() + ": ";
  if (!have_prices) throw UsageError(where + "'prices' is required");
  if (!fs::is_regular_file(cfg.prices, ec)) throw UsageError(where + "prices file not found: " + cfg.prices.string());
  if (cfg.sectors && !fs::is_regular_file(*cfg.sectors, ec)) {
    throw UsageError(where + "sectors file not found: " + cfg.sectors->string());
  }
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw UsageError(where + "'alpha' must lie in (0, 1)");
  if (cfg.t_values.empty()) throw UsageError(where + "'t_values' must not be empty");
  for (auto t : cfg.t_values) {
    if (t == 0) throw UsageError(where + "'t_values' entries must be positive");
  }
  if (cfg.step == 0) throw UsageError(where + "'step' must be at least 1");
  return cfg;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"balnet"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Context ctx(out, err);
  CLI::App app{"Statistically validated correlation networks, Heider balance and sign-switch prediction", "balnet"};
  app.set_version_flag("--version", BALNET_VERSION);
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--jobs", ctx.globals.jobs, "Worker threads (0 = available parallelism)")
      ->each([&](const std::string&) { ctx.globals.jobs_set = true; });
  app.add_option("--seed", ctx.globals.seed, "Seed for every random draw")->capture_default_str();
  app.add_flag("-v,--verbose", ctx.globals.verbosity, "Log progress to standard error (repeat for more)");

  DataArgs data;
  auto* ingest = app.add_subcommand("ingest-check", "Load and validate a price panel, print a summary");
  add_data_options(ingest, data);

  SvnArgs svn_args;
  auto* svn = app.add_subcommand("svn", "Statistically validated network of one window");
  add_data_options(svn, data);
  svn->add_option("--end-date", svn_args.end_date, "Last return date of the window")->required();
  svn->add_option("--window", svn_args.window, "Window length in returns")->capture_default_str();
  svn->add_option("--alpha", svn_args.alpha, "FDR level")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  svn->add_option("--polarity", svn_args.polarity)
      ->check(CLI::IsMember({"positive", "negative"}))
      ->capture_default_str();
  svn->add_option("--out-dir", svn_args.out_dir)->capture_default_str();

  BalanceArgs bal_args;
  auto* bal = app.add_subcommand("balance", "Hamiltonian, pair stability and spectrum of one window");
  add_data_options(bal, data);
  bal->add_option("--end-date", bal_args.end_date)->required();
  bal->add_option("--window", bal_args.window)->capture_default_str();
  bal->add_option("--corr-kind", bal_args.corr_kind)
      ->check(CLI::IsMember({"phi", "pearson", "partial_pearson"}))
      ->capture_default_str();
  bal->add_option("--out-dir", bal_args.out_dir)->capture_default_str();
  bal->add_flag("--delta", bal_args.delta, "Also write the Delta matrix as delta.csv");

  PredictArgs pred_args;
  auto* pred = app.add_subcommand("predict", "Score sign-switch prediction for one in/out window pair");
  add_data_options(pred, data);
  pred->add_option("--end-date", pred_args.end_date, "Last return date of the in-sample window")->required();
  pred->add_option("--tin", pred_args.tin, "In-sample length")->required()->check(CLI::PositiveNumber);
  pred->add_option("--tout", pred_args.tout, "Out-of-sample length")->required()->check(CLI::PositiveNumber);
  pred->add_option("--corr-kind", pred_args.corr_kind)
      ->check(CLI::IsMember({"phi", "pearson", "partial_pearson"}))
      ->capture_default_str();
  pred->add_option("--bin-width", pred_args.bin_width)->check(CLI::PositiveNumber)->capture_default_str();
  pred->add_option("--out-dir", pred_args.out_dir)->capture_default_str();

  std::string config_path;
  auto* grid = app.add_subcommand("grid", "Rolling (T_in, T_out) experiment grid from a JSON config");
  grid->add_option("--config", config_path, "JSON run configuration")->required();

  SynthArgs syn;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic block-correlated price panel");
  synth->add_option("--model", syn.model)
      ->check(CLI::IsMember({"paradise", "bipolar", "sector_block"}))
      ->capture_default_str();
  synth->add_option("--n", syn.n, "Number of assets")->capture_default_str();
  synth->add_option("--t", syn.t, "Number of price dates")->capture_default_str();
  synth->add_option("--rho-in", syn.rho_in)->capture_default_str();
  synth->add_option("--rho-out", syn.rho_out)->capture_default_str();
  synth->add_option("--noise", syn.noise, "Daily return volatility")->capture_default_str();
  synth->add_option("--blocks", syn.blocks, "Number of equal blocks (sector_block)");
  synth->add_option("--block-sizes", syn.block_sizes, "Explicit block sizes (sector_block)")->delimiter(',');
  synth->add_option("--out", syn.out, "Long-format price CSV ('-' for standard output)")->capture_default_str();
  synth->add_option("--sectors-out", syn.sectors_out, "Also write ticker,sector CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, x;
    const int code = app.exit(e, o, x);
    out << o.str();
    err << x.str();
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*ingest) cmd_ingest_check(ctx, data);
    else if (*svn) cmd_svn(ctx, data, svn_args);
    else if (*bal) cmd_balance(ctx, data, bal_args);
    else if (*pred) cmd_predict(ctx, data, pred_args);
    else if (*grid) cmd_grid(ctx, config_path);
    else if (*synth) cmd_synth(ctx, syn);
    return kOk;
  } catch (const UsageError& e) {
    err << "balnet: usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    err << "balnet: data error: " << e.what() << '\n';
    return kData;
  } catch (const IoError& e) {
    err << "balnet: io error: " << e.what() << '\n';
    return kData;
  } catch (const DomainError& e) {
    err << "balnet: domain error: " << e.what() << '\n';
    return kData;
  }
}

}  // namespace balnet::cli
