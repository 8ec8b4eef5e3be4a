#pragma once

// Records on the Boolean cube {-1,+1}^p, Walsh functions, and the low-degree
// Fourier data of a dataset.
//
// Fourier coefficients use the unnormalized convention
//   b_J = (1/n) * sum_i w_J(x_i),
// so b_empty = 1 for any dataset and every |b_J| <= 1. Coordinate indices are
// 0-based in this API.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace psyn {

using Sign = std::int8_t;

class CubePoint {
 public:
  CubePoint() = default;
  /// Throws InputError unless every entry is -1 or +1.
  explicit CubePoint(std::vector<Sign> coords);
  CubePoint(std::initializer_list<int> coords);

  std::size_t dimension() const { return coords_.size(); }
  Sign operator[](std::size_t j) const { return coords_[j]; }
  std::span<const Sign> coords() const { return coords_; }

  friend bool operator==(const CubePoint&, const CubePoint&) = default;

 private:
  std::vector<Sign> coords_;
};

/// Ordered rows of equal dimension, stored contiguously row-major.
class Dataset {
 public:
  explicit Dataset(std::size_t dimension = 0) : p_(dimension) {}
  Dataset(std::size_t dimension, std::initializer_list<std::initializer_list<int>> rows);

  std::size_t dimension() const { return p_; }
  std::size_t size() const { return p_ == 0 ? zero_dim_rows_ : data_.size() / p_; }
  bool empty() const { return size() == 0; }

  std::span<const Sign> row(std::size_t i) const { return {data_.data() + i * p_, p_}; }
  CubePoint point(std::size_t i) const;
  std::span<const Sign> data() const { return data_; }

  /// Throws InputError on dimension mismatch or a non-sign entry.
  void push_back(std::span<const Sign> coords);
  void push_back(const CubePoint& x) { push_back(x.coords()); }
  void reserve(std::size_t rows) { data_.reserve(rows * p_); }

  /// Copy with `extra` appended.
  Dataset with_appended(const CubePoint& extra) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::size_t p_ = 0;
  std::size_t zero_dim_rows_ = 0;
  std::vector<Sign> data_;
};

/// Subset J of coordinates, strictly increasing.
class WalshIndex {
 public:
  WalshIndex() = default;
  /// Throws ConfigError unless strictly increasing.
  explicit WalshIndex(std::vector<std::uint32_t> coords);
  WalshIndex(std::initializer_list<std::uint32_t> coords)
      : WalshIndex(std::vector<std::uint32_t>(coords)) {}

  std::size_t size() const { return coords_.size(); }
  bool empty() const { return coords_.empty(); }
  std::span<const std::uint32_t> coords() const { return coords_; }
  std::uint32_t operator[](std::size_t i) const { return coords_[i]; }

  friend bool operator==(const WalshIndex&, const WalshIndex&) = default;
  /// Canonical order: by size, then lexicographic.
  friend std::strong_ordering operator<=>(const WalshIndex& a, const WalshIndex& b);

 private:
  std::vector<std::uint32_t> coords_;
};

WalshIndex symmetric_difference(const WalshIndex& a, const WalshIndex& b);

struct MarginalQuery {
  WalshIndex subset;
  std::vector<Sign> signs;  // one target sign per subset coordinate
};

struct FourierVector {
  std::size_t dimension = 0;
  std::size_t degree = 0;
  std::vector<double> coeffs;  // canonical low-degree order

  double at(const WalshIndex& j) const;
};

/// C(p, <=d) = sum_{i=0}^{d} C(p, i). Throws ConfigError on d > p or overflow.
std::size_t count_low_degree(std::size_t p, std::size_t d);

/// All subsets of size <= d, ordered by size then lexicographically.
std::vector<WalshIndex> enumerate_low_degree(std::size_t p, std::size_t d);

/// Position of `j` in enumerate_low_degree(p, |j|) (and in every longer
/// enumeration for the same p).
std::size_t low_degree_position(std::size_t p, const WalshIndex& j);

/// prod_{j in J} x(j); +1 for the empty set.
int walsh_eval(const WalshIndex& j, std::span<const Sign> x);
inline int walsh_eval(const WalshIndex& j, const CubePoint& x) { return walsh_eval(j, x.coords()); }

FourierVector fourier_of_dataset(const Dataset& x, std::size_t d);

/// Fraction of rows matching every sign of q.
double marginal_value(const Dataset& x, const MarginalQuery& q);

/// The same fraction reconstructed from low-degree Fourier data.
double marginal_from_fourier(const FourierVector& b, const MarginalQuery& q);

/// Every query of dimension <= d: all subsets and all sign patterns.
std::size_t count_marginal_queries(std::size_t p, std::size_t d);
std::vector<MarginalQuery> enumerate_marginal_queries(std::size_t p, std::size_t d);

}  // namespace psyn
