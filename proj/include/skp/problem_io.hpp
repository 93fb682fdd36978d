#pragma once

#include <string>

#include <Eigen/SparseCore>

#include "skp/linear_system.hpp"

namespace skp {

struct LibsvmData {
  Eigen::SparseMatrix<double, Eigen::RowMajor> features;  // m x n
  Vector labels;                                          // m
};

/// Parses the LIBSVM text format: `<label> <index>:<value> ...` with 1-based,
/// strictly ascending indices per line. The column count is the largest index
/// seen unless n_override (>= that) is given. Malformed tokens and
/// non-ascending indices fail with the offending line number; an empty file
/// is an error. Labels are returned (callers building systems ignore them).
LibsvmData parse_libsvm(const std::string& path, Index n_override = 0);

/// Writes dense rows in LIBSVM format, skipping exact zeros. Values are
/// rendered shortest-round-trip, so a parse of the written file reproduces
/// them exactly.
void write_libsvm(const std::string& path, const Matrix& features,
                  const Vector& labels);

struct ProblemRecipe {
  enum class Source {
    kDenseGaussian,   // m x n, i.i.d. standard normal
    kSparseGaussian,  // entries nonzero independently w.p. density
    kGramGaussian,    // A = P^T P with P an m x n Gaussian (A is n x n SPD)
    kLibsvmFile,
  };
  enum class RhsRule {
    kPlantedGaussian,  // b = A z with z i.i.d. standard normal
    kExplicit,
  };
  enum class BRule { kIdentity, kEqualToA };

  Source source = Source::kDenseGaussian;
  Index m = 0;
  Index n = 0;
  double density = 0.0;    // sparse-gaussian
  std::string path;        // libsvm-file
  Index libsvm_n_override = 0;
  bool row_normalize = false;  // scale rows to unit 2-norm after loading
  RhsRule rhs_rule = RhsRule::kPlantedGaussian;
  Vector explicit_rhs;
  BRule b_rule = BRule::kIdentity;
  std::uint64_t seed = 0;
};

/// Deterministic in the seed. The Gram source verifies positive definiteness;
/// B = A is only valid on an SPD matrix (construction enforces it).
LinearSystemInstance build_instance(const ProblemRecipe& recipe);

/// Binary instance container (documented in the README): magic + header,
/// little-endian float64 payloads for A (dense column-major or CSR), b and B,
/// and a trailing SHA-256 of everything before it. Round-trips bit-exactly.
void export_instance(const LinearSystemInstance& instance,
                     const std::string& path);
LinearSystemInstance import_instance(const std::string& path);

}  // namespace skp
