#include "balnet/matrix_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>

#include <json.hpp>

#include "balnet/csv.hpp"
#include "balnet/errors.hpp"

namespace balnet {

namespace {

template <class Matrix, class Fmt>
std::string to_csv_impl(const std::vector<std::string>& labels, const Matrix& m, Fmt fmt) {
  if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != labels.size()) {
    throw DomainError("matrix csv: labels do not match matrix shape");
  }
  std::vector<std::string> header{"asset"};
  header.insert(header.end(), labels.begin(), labels.end());
  std::string out = csv::join(header) + "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out += csv::escape(labels[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out.push_back(',');
      out += fmt(m(i, j));
    }
    out.push_back('\n');
  }
  return out;
}

void append_le(std::string& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) {
    out.push_back(static_cast<char>(bits & 0xffu));
    bits >>= 8;
  }
}

double read_le(const char* p) {
  std::uint64_t bits = 0;
  for (int b = 7; b >= 0; --b) bits = (bits << 8) | static_cast<unsigned char>(p[b]);
  return std::bit_cast<double>(bits);
}

std::string sanitize(std::string s) {
  for (auto& c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '_';
  }
  return s;
}

}  // namespace

std::string matrix_to_csv(const std::vector<std::string>& labels, const Eigen::MatrixXd& m) {
  return to_csv_impl(labels, m, [](double v) { return csv::format_number(v); });
}

std::string matrix_to_csv(const std::vector<std::string>& labels, const Eigen::MatrixXi& m) {
  return to_csv_impl(labels, m, [](int v) { return std::to_string(v); });
}

std::string encode_matrix_cache(const CacheKey& key, const CorrMatrix& m) {
  const auto n = static_cast<Eigen::Index>(m.size());
  if (m.values.rows() != n || m.values.cols() != n) throw DomainError("matrix cache: shape mismatch");
  nlohmann::json header = {
      {"format", "balnet-matrix"}, {"version", 1},        {"end_date", key.end_date},
      {"window", key.window},      {"kind", std::string(to_string(key.kind))},
      {"tag", key.tag},            {"n", m.size()},       {"assets", m.assets},
      {"dtype", "float64-le"},     {"order", "row-major"}};
  std::string out = header.dump();
  out.push_back('\n');
  out.reserve(out.size() + static_cast<std::size_t>(n * n) * 8);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) append_le(out, m.values(i, j));
  }
  return out;
}

std::pair<CacheKey, CorrMatrix> decode_matrix_cache(const std::string& bytes) {
  const auto nl = bytes.find('\n');
  if (nl == std::string::npos) throw DataError("matrix cache: missing header line");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(0, nl));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("matrix cache: bad header: ") + e.what());
  }
  try {
    if (header.at("format") != "balnet-matrix" || header.at("dtype") != "float64-le" ||
        header.at("order") != "row-major") {
      throw DataError("matrix cache: unsupported encoding");
    }
    CacheKey key{header.at("end_date").get<std::string>(), header.at("window").get<std::size_t>(),
                 parse_corr_kind(header.at("kind").get<std::string>()), header.value("tag", std::string())};
    const auto n = header.at("n").get<std::size_t>();
    CorrMatrix m{header.at("assets").get<std::vector<std::string>>(), {}, key.kind};
    if (m.assets.size() != n) throw DataError("matrix cache: asset count does not match n");
    if (bytes.size() - nl - 1 != n * n * 8) throw DataError("matrix cache: payload size mismatch");
    const auto ni = static_cast<Eigen::Index>(n);
    m.values.resize(ni, ni);
    const char* p = bytes.data() + nl + 1;
    for (Eigen::Index i = 0; i < ni; ++i) {
      for (Eigen::Index j = 0; j < ni; ++j, p += 8) m.values(i, j) = read_le(p);
    }
    return {std::move(key), std::move(m)};
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("matrix cache: bad header field: ") + e.what());
  }
}

MatrixCache::MatrixCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::filesystem::path MatrixCache::path_for(const CacheKey& key) const {
  std::string name = std::string(to_string(key.kind)) + "_" + sanitize(key.end_date) + "_T" + std::to_string(key.window);
  if (!key.tag.empty()) name += "_" + sanitize(key.tag);
  return dir_ / (name + ".bin");
}

std::optional<CorrMatrix> MatrixCache::load(const CacheKey& key) const {
  const auto path = path_for(key);
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return std::nullopt;
  auto [stored, m] = decode_matrix_cache(csv::read_file(path));
  if (stored.end_date != key.end_date || stored.window != key.window || stored.kind != key.kind ||
      stored.tag != key.tag) {
    return std::nullopt;
  }
  return std::move(m);
}

void MatrixCache::store(const CacheKey& key, const CorrMatrix& m) const {
  csv::write_file_atomic(path_for(key), encode_matrix_cache(key, m));
}

}  // namespace balnet
