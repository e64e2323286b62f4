#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "balnet/correlation.hpp"
#include "balnet/panel.hpp"
#include "balnet/preprocess.hpp"

namespace balnet::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2 };

// Settings of a `grid` run, read from the JSON config file.
struct RunConfig {
  std::filesystem::path prices;
  std::optional<std::filesystem::path> sectors;
  PanelFormat format = PanelFormat::kLong;
  CorrKind corr_kind = CorrKind::kPhi;
  double alpha = 0.1;
  std::vector<std::size_t> t_values;
  std::size_t step = 1;
  MedianScope median_scope = MedianScope::kUniverse;
  std::filesystem::path output_dir = "out";
  std::size_t timeseries_window = 100;  // 0 disables timeseries.csv
  std::optional<std::filesystem::path> cache_dir;
  std::size_t jobs = 0;  // 0 = available parallelism
  std::uint64_t seed = 7;
  int verbosity = 0;
};

// Thrown for malformed invocations and configs; maps to exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parses the config file. Relative paths resolve against the file's
// directory. Throws UsageError naming the path or the offending field.
RunConfig load_config(const std::filesystem::path& path);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace balnet::cli
