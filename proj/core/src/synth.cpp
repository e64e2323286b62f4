#include "balnet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "balnet/correlation.hpp"
#include "balnet/errors.hpp"

namespace balnet {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::mt19937_64 stream(std::uint64_t seed, std::string_view label, std::uint64_t index, std::uint64_t salt) {
  std::uint64_t s = splitmix64(seed);
  s = splitmix64(s ^ fnv1a(label));
  s = splitmix64(s ^ index);
  s = splitmix64(s ^ salt);
  return std::mt19937_64(s);
}

// Days since 1970-01-01 to civil date (proleptic Gregorian).
void civil_from_days(long z, int& y, unsigned& m, unsigned& d) {
  z += 719468;
  const long era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp < 10 ? mp + 3 : mp - 9;
  y = static_cast<int>(yoe) + static_cast<int>(era) * 400 + (m <= 2);
}

}  // namespace

SynthModel parse_synth_model(std::string_view name) {
  if (name == "paradise") return SynthModel::kParadise;
  if (name == "bipolar") return SynthModel::kBipolar;
  if (name == "sector_block") return SynthModel::kSectorBlock;
  throw DomainError("unknown synthetic model '" + std::string(name) + "' (expected paradise|bipolar|sector_block)");
}

std::string_view to_string(SynthModel model) {
  switch (model) {
    case SynthModel::kParadise: return "paradise";
    case SynthModel::kBipolar: return "bipolar";
    case SynthModel::kSectorBlock: return "sector_block";
  }
  return "?";
}

ResolvedBlocks validate(const SynthSpec& spec) {
  if (spec.n_assets == 0) throw DomainError("synth: n_assets must be positive");
  if (spec.n_days < 2) throw DomainError("synth: n_days must be at least 2");
  if (!(spec.rho_in >= 0.0 && spec.rho_in < 1.0)) throw DomainError("synth: rho_in must lie in [0, 1)");
  if (!(spec.rho_out > -1.0 && spec.rho_out <= spec.rho_in)) throw DomainError("synth: rho_out must lie in (-1, rho_in]");
  if (!(spec.noise_scale > 0.0 && std::isfinite(spec.noise_scale))) throw DomainError("synth: noise_scale must be positive");

  ResolvedBlocks rb;
  rb.sizes = spec.block_sizes;
  if (rb.sizes.empty()) {
    switch (spec.model) {
      case SynthModel::kParadise: rb.sizes = {spec.n_assets}; break;
      case SynthModel::kBipolar: rb.sizes = {spec.n_assets / 2, spec.n_assets - spec.n_assets / 2}; break;
      case SynthModel::kSectorBlock: throw DomainError("synth: sector_block needs explicit block sizes");
    }
  }
  if (spec.model == SynthModel::kParadise && rb.sizes.size() != 1) throw DomainError("synth: paradise has exactly one block");
  if (spec.model == SynthModel::kBipolar && rb.sizes.size() != 2) throw DomainError("synth: bipolar has exactly two blocks");
  if (std::find(rb.sizes.begin(), rb.sizes.end(), std::size_t{0}) != rb.sizes.end()) {
    throw DomainError("synth: empty block");
  }
  if (std::accumulate(rb.sizes.begin(), rb.sizes.end(), std::size_t{0}) != spec.n_assets) {
    throw DomainError("synth: block sizes do not sum to n_assets");
  }
  rb.labels = spec.block_labels;
  if (rb.labels.empty()) {
    for (std::size_t g = 0; g < rb.sizes.size(); ++g) rb.labels.push_back("B" + std::to_string(g));
  }
  if (rb.labels.size() != rb.sizes.size()) throw DomainError("synth: one label per block required");
  auto sorted = rb.labels;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw DomainError("synth: duplicate block label");

  // The implied matrix is (1 - rho_in) I + L R L^T with R the block-level
  // matrix; its non-trivial spectrum is that of D^1/2 R D^1/2.
  const auto K = static_cast<Eigen::Index>(rb.sizes.size());
  Eigen::MatrixXd reduced(K, K);
  for (Eigen::Index g = 0; g < K; ++g) {
    for (Eigen::Index h = 0; h < K; ++h) {
      const double r = (g == h) ? spec.rho_in : spec.rho_out;
      reduced(g, h) = r * std::sqrt(static_cast<double>(rb.sizes[static_cast<std::size_t>(g)]) *
                                    static_cast<double>(rb.sizes[static_cast<std::size_t>(h)]));
    }
  }
  const double min_eig = eigen_descending(reduced).values.minCoeff() + (1.0 - spec.rho_in);
  if (min_eig < -1e-10) throw DomainError("synth: implied correlation matrix is not positive semidefinite");

  if (K > 1) {
    if (spec.rho_in == 0.0) {
      if (spec.rho_out != 0.0) throw DomainError("synth: rho_out != 0 needs rho_in > 0 for the block-factor model");
    } else if (spec.rho_out / spec.rho_in < -1.0 / static_cast<double>(K - 1) - 1e-12) {
      throw DomainError("synth: block factor correlation rho_out/rho_in is not positive semidefinite");
    }
  }
  return rb;
}

Eigen::MatrixXd implied_correlation(const SynthSpec& spec) {
  const auto rb = validate(spec);
  std::vector<std::size_t> block_of;
  for (std::size_t g = 0; g < rb.sizes.size(); ++g) block_of.insert(block_of.end(), rb.sizes[g], g);
  const auto n = static_cast<Eigen::Index>(spec.n_assets);
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) {
        c(i, j) = 1.0;
      } else {
        c(i, j) = block_of[static_cast<std::size_t>(i)] == block_of[static_cast<std::size_t>(j)] ? spec.rho_in : spec.rho_out;
      }
    }
  }
  return c;
}

std::vector<std::string> weekday_dates(std::size_t count) {
  std::vector<std::string> out;
  out.reserve(count);
  long day = 10957 + 2;  // 2000-01-03, a Monday
  while (out.size() < count) {
    const long weekday = (day + 4) % 7;  // 0 = Sunday
    if (weekday != 0 && weekday != 6) {
      int y;
      unsigned m, d;
      civil_from_days(day, y, m, d);
      char buf[16];
      std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", y, m, d);
      out.emplace_back(buf);
    }
    ++day;
  }
  return out;
}

PricePanel generate(const SynthSpec& spec) {
  const auto rb = validate(spec);
  const std::size_t K = rb.sizes.size();

  // Symmetric square root of the equicorrelated factor matrix
  // F = (1 - c) I + c J:  F^1/2 = a I + gamma J.
  const double c = (K > 1 && spec.rho_in > 0.0) ? spec.rho_out / spec.rho_in : 0.0;
  const double a = std::sqrt(std::max(0.0, 1.0 - c));
  const double gamma = (std::sqrt(std::max(0.0, 1.0 + static_cast<double>(K - 1) * c)) - a) / static_cast<double>(K);
  const double load = std::sqrt(spec.rho_in);
  const double idio = std::sqrt(1.0 - spec.rho_in);

  std::vector<std::size_t> label_order(K);
  std::iota(label_order.begin(), label_order.end(), 0);
  std::sort(label_order.begin(), label_order.end(),
            [&](std::size_t x, std::size_t y) { return rb.labels[x] < rb.labels[y]; });

  std::vector<std::mt19937_64> factor_rng;
  for (std::size_t g = 0; g < K; ++g) factor_rng.push_back(stream(spec.seed, rb.labels[g], 0, 0xfac7));
  struct AssetRef {
    std::size_t block;
    std::mt19937_64 rng;
  };
  std::vector<AssetRef> assets;
  PricePanel p;
  p.dates = weekday_dates(spec.n_days);
  for (std::size_t g = 0; g < K; ++g) {
    for (std::size_t w = 0; w < rb.sizes[g]; ++w) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "_%03zu", w);
      p.assets.push_back(rb.labels[g] + buf);
      p.sectors.push_back(rb.labels[g]);
      assets.push_back({g, stream(spec.seed, rb.labels[g], w + 1, 0x1d10)});
    }
  }

  const auto nd = static_cast<Eigen::Index>(spec.n_days);
  const auto na = static_cast<Eigen::Index>(spec.n_assets);
  p.prices.resize(nd, na);
  p.present = Mask::Constant(nd, na, true);
  Eigen::VectorXd log_price = Eigen::VectorXd::Constant(na, std::log(100.0));
  p.prices.row(0).setConstant(100.0);

  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> z(K), f(K);
  for (Eigen::Index t = 1; t < nd; ++t) {
    double total = 0.0;
    for (std::size_t g : label_order) {
      z[g] = normal(factor_rng[g]);
      normal.reset();
    }
    for (std::size_t g : label_order) total += z[g];
    for (std::size_t g = 0; g < K; ++g) f[g] = a * z[g] + gamma * total;
    for (Eigen::Index i = 0; i < na; ++i) {
      auto& ar = assets[static_cast<std::size_t>(i)];
      const double eps = normal(ar.rng);
      normal.reset();
      log_price(i) += spec.noise_scale * (load * f[ar.block] + idio * eps);
      p.prices(t, i) = std::exp(log_price(i));
    }
  }
  return p;
}

}  // namespace balnet
