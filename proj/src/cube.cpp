#include "psyn/cube.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "psyn/error.hpp"

namespace psyn {
namespace {

bool is_sign(int v) { return v == -1 || v == 1; }

std::size_t checked_binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > std::numeric_limits<std::size_t>::max())
      throw ConfigError("binomial coefficient overflows: C(" + std::to_string(n) + "," +
                        std::to_string(k) + ")");
  }
  return static_cast<std::size_t>(r);
}

void check_range(const WalshIndex& j, std::size_t p) {
  if (!j.empty() && j[j.size() - 1] >= p)
    throw ConfigError("Walsh index coordinate " + std::to_string(j[j.size() - 1]) +
                      " out of range for dimension " + std::to_string(p));
}

}  // namespace

CubePoint::CubePoint(std::vector<Sign> coords) : coords_(std::move(coords)) {
  for (std::size_t j = 0; j < coords_.size(); ++j)
    if (!is_sign(coords_[j]))
      throw InputError("cube point coordinate " + std::to_string(j) + " is not +-1");
}

CubePoint::CubePoint(std::initializer_list<int> coords)
    : CubePoint(std::vector<Sign>(coords.begin(), coords.end())) {}

Dataset::Dataset(std::size_t dimension, std::initializer_list<std::initializer_list<int>> rows)
    : p_(dimension) {
  for (const auto& r : rows) push_back(CubePoint(r));
}

CubePoint Dataset::point(std::size_t i) const {
  auto r = row(i);
  return CubePoint(std::vector<Sign>(r.begin(), r.end()));
}

void Dataset::push_back(std::span<const Sign> coords) {
  if (coords.size() != p_)
    throw InputError("row of dimension " + std::to_string(coords.size()) +
                     " does not match dataset dimension " + std::to_string(p_));
  for (Sign s : coords)
    if (!is_sign(s)) throw InputError("dataset entry is not +-1");
  if (p_ == 0) ++zero_dim_rows_;
  data_.insert(data_.end(), coords.begin(), coords.end());
}

Dataset Dataset::with_appended(const CubePoint& extra) const {
  Dataset out = *this;
  out.push_back(extra);
  return out;
}

WalshIndex::WalshIndex(std::vector<std::uint32_t> coords) : coords_(std::move(coords)) {
  for (std::size_t i = 1; i < coords_.size(); ++i)
    if (coords_[i] <= coords_[i - 1])
      throw ConfigError("Walsh index coordinates must be strictly increasing");
}

std::strong_ordering operator<=>(const WalshIndex& a, const WalshIndex& b) {
  if (auto c = a.size() <=> b.size(); c != 0) return c;
  return std::lexicographical_compare_three_way(a.coords_.begin(), a.coords_.end(),
                                                b.coords_.begin(), b.coords_.end());
}

WalshIndex symmetric_difference(const WalshIndex& a, const WalshIndex& b) {
  std::vector<std::uint32_t> out;
  std::set_symmetric_difference(a.coords().begin(), a.coords().end(), b.coords().begin(),
                                b.coords().end(), std::back_inserter(out));
  return WalshIndex(std::move(out));
}

double FourierVector::at(const WalshIndex& j) const {
  if (j.size() > degree) throw InputError("Walsh index exceeds the degree bound");
  check_range(j, dimension);
  return coeffs[low_degree_position(dimension, j)];
}

std::size_t count_low_degree(std::size_t p, std::size_t d) {
  if (d > p)
    throw ConfigError("degree " + std::to_string(d) + " exceeds dimension " + std::to_string(p));
  std::size_t total = 0;
  for (std::size_t i = 0; i <= d; ++i) {
    const std::size_t c = checked_binomial(p, i);
    if (total > std::numeric_limits<std::size_t>::max() - c)
      throw ConfigError("C(p,<=d) overflows");
    total += c;
  }
  return total;
}

std::vector<WalshIndex> enumerate_low_degree(std::size_t p, std::size_t d) {
  std::vector<WalshIndex> out;
  out.reserve(count_low_degree(p, d));
  out.emplace_back();
  for (std::size_t size = 1; size <= d; ++size) {
    std::vector<std::uint32_t> c(size);
    for (std::size_t i = 0; i < size; ++i) c[i] = static_cast<std::uint32_t>(i);
    while (true) {
      out.emplace_back(c);
      // next combination in lexicographic order
      std::size_t i = size;
      while (i > 0 && c[i - 1] == p - size + i - 1) --i;
      if (i == 0) break;
      ++c[i - 1];
      for (std::size_t k = i; k < size; ++k) c[k] = c[k - 1] + 1;
    }
  }
  return out;
}

std::size_t low_degree_position(std::size_t p, const WalshIndex& j) {
  check_range(j, p);
  const std::size_t k = j.size();
  std::size_t pos = 0;
  for (std::size_t i = 0; i < k; ++i) pos += checked_binomial(p, i);
  // lexicographic rank among k-subsets of {0..p-1}
  std::size_t prev = 0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t v = prev; v < j[i]; ++v) pos += checked_binomial(p - v - 1, k - i - 1);
    prev = j[i] + 1;
  }
  return pos;
}

int walsh_eval(const WalshIndex& j, std::span<const Sign> x) {
  check_range(j, x.size());
  int s = 1;
  for (std::uint32_t c : j.coords()) s *= x[c];
  return s;
}

FourierVector fourier_of_dataset(const Dataset& x, std::size_t d) {
  if (x.empty()) throw InputError("cannot compute Fourier data of an empty dataset");
  const std::size_t p = x.dimension();
  const auto index = enumerate_low_degree(p, d);
  std::vector<std::int64_t> counts(index.size(), 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto r = x.row(i);
    for (std::size_t c = 0; c < index.size(); ++c) {
      int s = 1;
      for (std::uint32_t j : index[c].coords()) s *= r[j];
      counts[c] += s;
    }
  }
  FourierVector b{p, d, std::vector<double>(index.size())};
  const auto n = static_cast<double>(x.size());
  for (std::size_t c = 0; c < index.size(); ++c) b.coeffs[c] = static_cast<double>(counts[c]) / n;
  return b;
}

double marginal_value(const Dataset& x, const MarginalQuery& q) {
  if (q.signs.size() != q.subset.size())
    throw InputError("marginal query needs one sign per subset coordinate");
  check_range(q.subset, x.dimension());
  if (x.empty()) throw InputError("cannot evaluate a marginal on an empty dataset");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto r = x.row(i);
    bool match = true;
    for (std::size_t k = 0; k < q.subset.size() && match; ++k) match = r[q.subset[k]] == q.signs[k];
    hits += match ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(x.size());
}

double marginal_from_fourier(const FourierVector& b, const MarginalQuery& q) {
  const std::size_t k = q.subset.size();
  if (q.signs.size() != k) throw InputError("marginal query needs one sign per subset coordinate");
  if (k > b.degree)
    throw InputError("marginal of dimension " + std::to_string(k) +
                     " exceeds the Fourier degree bound " + std::to_string(b.degree));
  check_range(q.subset, b.dimension);
  // Expand prod_{j in J} (1 + s_j x_j) / 2 over subsets K of J.
  double acc = 0.0;
  std::vector<std::uint32_t> sub;
  for (std::uint32_t mask = 0; mask < (1U << k); ++mask) {
    sub.clear();
    int sign = 1;
    for (std::size_t t = 0; t < k; ++t) {
      if ((mask >> t) & 1U) {
        sub.push_back(q.subset[t]);
        sign *= q.signs[t];
      }
    }
    acc += sign * b.coeffs[low_degree_position(b.dimension, WalshIndex(sub))];
  }
  return acc / static_cast<double>(1U << k);
}

std::size_t count_marginal_queries(std::size_t p, std::size_t d) {
  if (d > p) throw ConfigError("degree exceeds dimension");
  std::size_t total = 0;
  for (std::size_t j = 0; j <= d; ++j) {
    if (j >= 63) throw ConfigError("marginal query count overflows");
    const std::size_t c = checked_binomial(p, j);
    const std::size_t patterns = std::size_t{1} << j;
    if (c > std::numeric_limits<std::size_t>::max() / patterns ||
        total > std::numeric_limits<std::size_t>::max() - c * patterns)
      throw ConfigError("marginal query count overflows");
    total += c * patterns;
  }
  return total;
}

std::vector<MarginalQuery> enumerate_marginal_queries(std::size_t p, std::size_t d) {
  std::vector<MarginalQuery> out;
  out.reserve(count_marginal_queries(p, d));
  for (const auto& j : enumerate_low_degree(p, d)) {
    const std::size_t k = j.size();
    for (std::uint32_t mask = 0; mask < (1U << k); ++mask) {
      MarginalQuery q{j, std::vector<Sign>(k)};
      for (std::size_t t = 0; t < k; ++t) q.signs[t] = ((mask >> t) & 1U) ? Sign{-1} : Sign{1};
      out.push_back(std::move(q));
    }
  }
  return out;
}

}  // namespace psyn
