#include "skp/problem_io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

#include <openssl/evp.h>

#include "skp/rng.hpp"

static_assert(std::endian::native == std::endian::little,
              "the instance container assumes a little-endian host");

namespace skp {

namespace {

[[noreturn]] void parse_fail(const std::string& path, std::size_t line,
                             const std::string& what) {
  throw std::runtime_error("parse_libsvm: " + path + ":" +
                           std::to_string(line) + ": " + what);
}

double parse_double(const char* begin, const char* end, bool& ok) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  ok = (ec == std::errc() && ptr == end);
  return value;
}

}  // namespace

LibsvmData parse_libsvm(const std::string& path, Index n_override) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("parse_libsvm: cannot open " + path);

  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<double> labels;
  Index max_index = 0;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    std::size_t pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos) continue;

    auto next_token = [&](std::string_view& token) {
      if (pos == std::string::npos || pos >= line.size()) return false;
      std::size_t end = line.find_first_of(" \t\r", pos);
      if (end == std::string::npos) end = line.size();
      token = std::string_view(line).substr(pos, end - pos);
      pos = line.find_first_not_of(" \t\r", end);
      return true;
    };

    std::string_view token;
    if (!next_token(token)) continue;
    bool ok = false;
    const double label = parse_double(token.data(), token.data() + token.size(), ok);
    if (!ok) parse_fail(path, line_no, "label is not numeric");
    labels.push_back(label);
    const Index row = Index(labels.size()) - 1;

    Index prev_index = 0;
    while (next_token(token)) {
      const std::size_t colon = token.find(':');
      if (colon == std::string_view::npos) {
        parse_fail(path, line_no, "feature token lacks ':'");
      }
      Index feature = 0;
      {
        const auto [ptr, ec] = std::from_chars(token.data(),
                                               token.data() + colon, feature);
        if (ec != std::errc() || ptr != token.data() + colon || feature < 1) {
          parse_fail(path, line_no, "bad feature index");
        }
      }
      if (feature <= prev_index) {
        parse_fail(path, line_no, "feature indices must ascend");
      }
      prev_index = feature;
      const double value = parse_double(token.data() + colon + 1,
                                        token.data() + token.size(), ok);
      if (!ok) parse_fail(path, line_no, "feature value is not numeric");
      max_index = std::max(max_index, feature);
      triplets.emplace_back(int(row), int(feature - 1), value);
    }
  }

  if (labels.empty()) {
    throw std::runtime_error("parse_libsvm: " + path + " holds no data lines");
  }
  Index n = max_index;
  if (n_override > 0) {
    if (n_override < max_index) {
      throw std::runtime_error(
          "parse_libsvm: n_override is below the largest index seen");
    }
    n = n_override;
  }
  LibsvmData out;
  out.features.resize(Index(labels.size()), n);
  out.features.setFromTriplets(triplets.begin(), triplets.end());
  out.labels = Eigen::Map<Vector>(labels.data(), Index(labels.size()));
  return out;
}

void write_libsvm(const std::string& path, const Matrix& features,
                  const Vector& labels) {
  if (features.rows() != labels.size()) {
    throw std::invalid_argument("write_libsvm: label count mismatch");
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_libsvm: cannot open " + path);
  char buf[64];
  auto render = [&](double v) {
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string_view(buf, std::size_t(ptr - buf));
  };
  for (Index i = 0; i < features.rows(); ++i) {
    out << render(labels(i));
    for (Index j = 0; j < features.cols(); ++j) {
      const double v = features(i, j);
      if (v != 0.0) {
        out << ' ' << (j + 1) << ':' << render(v);
      }
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write_libsvm: write failed for " + path);
}

namespace {

Matrix gaussian_matrix(Index m, Index n, RngStream& rng) {
  Matrix a(m, n);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) a(i, j) = rng.normal();
  }
  return a;
}

Matrix sparse_gaussian_matrix(Index m, Index n, double density, RngStream& rng) {
  Matrix a = Matrix::Zero(m, n);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (rng.uniform() < density) a(i, j) = rng.normal();
    }
  }
  return a;
}

}  // namespace

LinearSystemInstance build_instance(const ProblemRecipe& recipe) {
  RngStream matrix_rng(recipe.seed, 0);
  RngStream rhs_rng(recipe.seed, 1);

  Matrix a;
  switch (recipe.source) {
    case ProblemRecipe::Source::kDenseGaussian:
      if (recipe.m < 1 || recipe.n < 1) {
        throw std::invalid_argument("build_instance: m, n must be positive");
      }
      a = gaussian_matrix(recipe.m, recipe.n, matrix_rng);
      break;
    case ProblemRecipe::Source::kSparseGaussian:
      if (recipe.m < 1 || recipe.n < 1) {
        throw std::invalid_argument("build_instance: m, n must be positive");
      }
      if (!(recipe.density > 0.0 && recipe.density <= 1.0)) {
        throw std::invalid_argument("build_instance: density must lie in (0, 1]");
      }
      a = sparse_gaussian_matrix(recipe.m, recipe.n, recipe.density, matrix_rng);
      break;
    case ProblemRecipe::Source::kGramGaussian: {
      if (recipe.m < 1 || recipe.n < 1) {
        throw std::invalid_argument("build_instance: m, n must be positive");
      }
      const Matrix p = gaussian_matrix(recipe.m, recipe.n, matrix_rng);
      a = p.transpose() * p;
      Eigen::LLT<Matrix> llt(a);
      if (llt.info() != Eigen::Success) {
        throw std::runtime_error(
            "build_instance: Gram matrix failed the positive-definiteness check");
      }
      break;
    }
    case ProblemRecipe::Source::kLibsvmFile:
      a = Matrix(parse_libsvm(recipe.path, recipe.libsvm_n_override).features);
      break;
  }

  if (recipe.row_normalize) {
    for (Index i = 0; i < a.rows(); ++i) {
      const double norm = a.row(i).norm();
      if (norm > 0.0) a.row(i) /= norm;
    }
  }

  Vector b;
  switch (recipe.rhs_rule) {
    case ProblemRecipe::RhsRule::kPlantedGaussian: {
      Vector z(a.cols());
      for (Index i = 0; i < z.size(); ++i) z(i) = rhs_rng.normal();
      b = a * z;
      break;
    }
    case ProblemRecipe::RhsRule::kExplicit:
      if (recipe.explicit_rhs.size() != a.rows()) {
        throw std::invalid_argument(
            "build_instance: explicit rhs length does not match the row count");
      }
      b = recipe.explicit_rhs;
      break;
  }

  switch (recipe.b_rule) {
    case ProblemRecipe::BRule::kIdentity:
      return LinearSystemInstance(std::move(a), std::move(b));
    case ProblemRecipe::BRule::kEqualToA:
      return LinearSystemInstance::with_b_equal_a(std::move(a), std::move(b));
  }
  throw std::logic_error("build_instance: unreachable");
}

// --- binary container ------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'S', 'K', 'P', 'I', 'N', 'S', 'T', '1'};
constexpr std::uint32_t kVersion = 1;

enum AStorage : std::uint32_t { kDense = 0, kCsr = 1 };

void append_bytes(std::string& buf, const void* data, std::size_t bytes) {
  buf.append(static_cast<const char*>(data), bytes);
}

template <typename T>
void append_value(std::string& buf, T value) {
  append_bytes(buf, &value, sizeof(T));
}

std::string sha256(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1) {
    throw std::runtime_error("sha256: digest failed");
  }
  return std::string(reinterpret_cast<char*>(digest), len);
}

class Reader {
 public:
  Reader(const std::string& data, std::size_t end) : data_(data), end_(end) {}

  template <typename T>
  T take() {
    if (pos_ + sizeof(T) > end_) {
      throw std::runtime_error("import_instance: truncated file");
    }
    T value;
    std::memcpy(&value, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  void take_array(double* out, std::size_t count) {
    const std::size_t bytes = count * sizeof(double);
    if (pos_ + bytes > end_) {
      throw std::runtime_error("import_instance: truncated file");
    }
    std::memcpy(out, data_.data() + pos_, bytes);
    pos_ += bytes;
  }

  void take_array(std::int64_t* out, std::size_t count) {
    const std::size_t bytes = count * sizeof(std::int64_t);
    if (pos_ + bytes > end_) {
      throw std::runtime_error("import_instance: truncated file");
    }
    std::memcpy(out, data_.data() + pos_, bytes);
    pos_ += bytes;
  }

  std::size_t remaining() const { return end_ - pos_; }

 private:
  const std::string& data_;
  std::size_t end_;
  std::size_t pos_ = 0;
};

}  // namespace

void export_instance(const LinearSystemInstance& instance,
                     const std::string& path) {
  const Matrix& a = instance.a();
  const Index m = a.rows(), n = a.cols();

  std::int64_t nnz = 0;
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < m; ++i) {
      if (a(i, j) != 0.0) ++nnz;
    }
  }
  const bool sparse = nnz * 4 <= m * n;  // CSR wins below 25% fill

  std::string buf;
  buf.reserve(std::size_t(m) * std::size_t(n) * 8 + 4096);
  append_bytes(buf, kMagic, sizeof(kMagic));
  append_value<std::uint32_t>(buf, kVersion);
  append_value<std::uint32_t>(buf, sparse ? kCsr : kDense);
  append_value<std::uint32_t>(buf, std::uint32_t(instance.b_kind()));
  append_value<std::uint32_t>(buf, 0);  // reserved
  append_value<std::int64_t>(buf, m);
  append_value<std::int64_t>(buf, n);

  if (!sparse) {
    append_bytes(buf, a.data(), std::size_t(m) * std::size_t(n) * sizeof(double));
  } else {
    append_value<std::int64_t>(buf, nnz);
    std::vector<std::int64_t> row_ptr(std::size_t(m) + 1, 0);
    std::vector<std::int64_t> col_idx;
    std::vector<double> values;
    col_idx.reserve(std::size_t(nnz));
    values.reserve(std::size_t(nnz));
    for (Index i = 0; i < m; ++i) {
      row_ptr[std::size_t(i)] = std::int64_t(values.size());
      for (Index j = 0; j < n; ++j) {
        if (a(i, j) != 0.0) {
          col_idx.push_back(j);
          values.push_back(a(i, j));
        }
      }
    }
    row_ptr[std::size_t(m)] = std::int64_t(values.size());
    append_bytes(buf, row_ptr.data(), row_ptr.size() * sizeof(std::int64_t));
    append_bytes(buf, col_idx.data(), col_idx.size() * sizeof(std::int64_t));
    append_bytes(buf, values.data(), values.size() * sizeof(double));
  }

  append_bytes(buf, instance.rhs().data(), std::size_t(m) * sizeof(double));
  if (instance.b_kind() == BKind::kDense) {
    append_bytes(buf, instance.b_matrix().data(),
                 std::size_t(n) * std::size_t(n) * sizeof(double));
  }

  buf += sha256(buf);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("export_instance: cannot open " + path);
  out.write(buf.data(), std::streamsize(buf.size()));
  if (!out) throw std::runtime_error("export_instance: write failed for " + path);
}

LinearSystemInstance import_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("import_instance: cannot open " + path);
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());

  if (data.size() < sizeof(kMagic) + 32) {
    throw std::runtime_error("import_instance: file too short");
  }
  if (std::memcmp(data.data(), kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("import_instance: bad magic");
  }
  const std::size_t payload_end = data.size() - 32;
  if (sha256(data.substr(0, payload_end)) != data.substr(payload_end)) {
    throw std::runtime_error("import_instance: checksum mismatch");
  }

  Reader reader(data, payload_end);
  char magic[8];
  for (char& c : magic) c = reader.take<char>();
  const auto version = reader.take<std::uint32_t>();
  if (version != kVersion) {
    throw std::runtime_error("import_instance: unsupported version " +
                             std::to_string(version));
  }
  const auto storage = reader.take<std::uint32_t>();
  const auto b_kind = reader.take<std::uint32_t>();
  (void)reader.take<std::uint32_t>();
  const auto m = reader.take<std::int64_t>();
  const auto n = reader.take<std::int64_t>();
  if (m < 1 || n < 1) throw std::runtime_error("import_instance: bad dimensions");

  Matrix a(m, n);
  if (storage == kDense) {
    reader.take_array(a.data(), std::size_t(m) * std::size_t(n));
  } else if (storage == kCsr) {
    const auto nnz = reader.take<std::int64_t>();
    if (nnz < 0) throw std::runtime_error("import_instance: bad nnz");
    std::vector<std::int64_t> row_ptr(std::size_t(m) + 1);
    std::vector<std::int64_t> col_idx(std::size_t(nnz));
    std::vector<double> values(std::size_t(nnz));
    reader.take_array(row_ptr.data(), row_ptr.size());
    reader.take_array(col_idx.data(), col_idx.size());
    reader.take_array(values.data(), values.size());
    a.setZero();
    for (std::int64_t i = 0; i < m; ++i) {
      if (row_ptr[std::size_t(i)] > row_ptr[std::size_t(i) + 1] ||
          row_ptr[std::size_t(m)] != nnz) {
        throw std::runtime_error("import_instance: corrupt CSR index");
      }
      for (std::int64_t k = row_ptr[std::size_t(i)];
           k < row_ptr[std::size_t(i) + 1]; ++k) {
        const std::int64_t j = col_idx[std::size_t(k)];
        if (j < 0 || j >= n) {
          throw std::runtime_error("import_instance: CSR column out of range");
        }
        a(i, j) = values[std::size_t(k)];
      }
    }
  } else {
    throw std::runtime_error("import_instance: unknown storage kind");
  }

  Vector b(m);
  reader.take_array(b.data(), std::size_t(m));

  switch (BKind(b_kind)) {
    case BKind::kIdentity:
      if (reader.remaining() != 0) {
        throw std::runtime_error("import_instance: trailing bytes");
      }
      return LinearSystemInstance(std::move(a), std::move(b));
    case BKind::kDense: {
      Matrix bmat(n, n);
      reader.take_array(bmat.data(), std::size_t(n) * std::size_t(n));
      if (reader.remaining() != 0) {
        throw std::runtime_error("import_instance: trailing bytes");
      }
      return LinearSystemInstance(std::move(a), std::move(b), std::move(bmat));
    }
    case BKind::kEqualToA:
      if (reader.remaining() != 0) {
        throw std::runtime_error("import_instance: trailing bytes");
      }
      return LinearSystemInstance::with_b_equal_a(std::move(a), std::move(b));
  }
  throw std::runtime_error("import_instance: unknown B kind");
}

}  // namespace skp
