#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "balnet/panel.hpp"

namespace balnet {

enum class SynthModel {
  kParadise,     // one block holding every asset
  kBipolar,      // two blocks, positive inside, rho_out across
  kSectorBlock,  // user-specified block sizes
};

SynthModel parse_synth_model(std::string_view name);
std::string_view to_string(SynthModel model);

struct SynthSpec {
  std::size_t n_assets = 150;
  std::size_t n_days = 600;  // price dates; the panel has n_days - 1 returns
  SynthModel model = SynthModel::kBipolar;
  // Empty means: {n} for paradise, an even split for bipolar. Required for
  // sector_block.
  std::vector<std::size_t> block_sizes;
  // Block identifiers, used as sector labels and ticker prefixes. Defaults to
  // B0, B1, ...
  std::vector<std::string> block_labels;
  double rho_in = 0.3;
  double rho_out = -0.1;
  double noise_scale = 0.01;  // daily return standard deviation
  std::uint64_t seed = 7;
};

struct ResolvedBlocks {
  std::vector<std::size_t> sizes;
  std::vector<std::string> labels;
};

/// Checks every field and that the implied correlation matrix is positive
/// semidefinite and representable by block factors. Throws DomainError.
ResolvedBlocks validate(const SynthSpec& spec);

/// Correlation matrix of daily returns implied by `spec`, assets in panel order.
Eigen::MatrixXd implied_correlation(const SynthSpec& spec);

/// One Gaussian factor per block plus idiosyncratic noise:
///   r_i = sigma (sqrt(rho_in) f_g(i) + sqrt(1 - rho_in) e_i),
/// with corr(f_g, f_h) = rho_out / rho_in across blocks. Prices start at 100.
/// Each block factor and each asset draws from its own stream keyed by
/// (seed, block label, position in block), so output is a pure function of
/// the spec and relabeling blocks permutes assets without changing paths.
PricePanel generate(const SynthSpec& spec);

/// ISO-8601 labels of `count` consecutive weekdays from 2000-01-03.
std::vector<std::string> weekday_dates(std::size_t count);

}  // namespace balnet
