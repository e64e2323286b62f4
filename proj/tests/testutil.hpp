#pragma once

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

#include "balnet/csv.hpp"
#include "balnet/panel.hpp"
#include "balnet/preprocess.hpp"

namespace testutil {

// Scratch directory removed on scope exit.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("balnet-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string date_label(std::size_t t) {
  std::string s = std::to_string(t);
  return "d" + std::string(s.size() < 5 ? 5 - s.size() : 0, '0') + s;
}

// Complete return panel from a dates x assets matrix.
inline balnet::ReturnPanel make_returns(const Eigen::MatrixXd& r) {
  balnet::ReturnPanel p;
  for (Eigen::Index t = 0; t < r.rows(); ++t) p.dates.push_back(date_label(static_cast<std::size_t>(t)));
  for (Eigen::Index i = 0; i < r.cols(); ++i) {
    p.assets.push_back("A" + std::to_string(i));
    p.sectors.push_back("UNKNOWN");
  }
  p.returns = r;
  p.present = balnet::Mask::Constant(r.rows(), r.cols(), true);
  return p;
}

inline Eigen::MatrixXd gaussian(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = nd(rng);
  return m;
}

inline balnet::BinaryPanel binary_of(const std::vector<std::vector<int>>& cols) {
  balnet::BinaryPanel b;
  const auto T = cols.front().size();
  for (std::size_t t = 0; t < T; ++t) b.dates.push_back(date_label(t));
  b.values.resize(static_cast<Eigen::Index>(T), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) {
    b.assets.push_back("B" + std::to_string(i));
    b.sectors.push_back("UNKNOWN");
    for (std::size_t t = 0; t < T; ++t)
      b.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)) = static_cast<std::int8_t>(cols[i][t]);
  }
  return b;
}

inline balnet::BinaryPanel random_binary(std::size_t T, std::size_t N, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  std::vector<std::vector<int>> cols(N, std::vector<int>(T));
  for (auto& c : cols) {
    do {
      for (auto& v : c) v = coin(rng) ? 1 : -1;
    } while (std::all_of(c.begin(), c.end(), [&](int v) { return v == c[0]; }));
  }
  return binary_of(cols);
}


// Uniformly random symmetric ±1 matrix with zero diagonal.
inline Eigen::MatrixXi random_signs(std::size_t n, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.5);
  Eigen::MatrixXi s = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < s.rows(); ++i)
    for (Eigen::Index j = i + 1; j < s.cols(); ++j) s(i, j) = s(j, i) = coin(rng) ? 1 : -1;
  return s;
}

}  // namespace testutil
