#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "affsph/errors.hpp"

namespace affsph {

inline constexpr int kMaxOrder = 4;
inline constexpr int kMaxDim = 8;

using MultiIndex = std::array<std::uint8_t, kMaxDim>;

/// Graded enumeration of all multi-indices of total degree <= kMaxOrder in a
/// fixed number of variables.
///
/// Entries are sorted by total degree, so the indices of degree <= k form a
/// prefix of the table for every k. A jet of order k therefore stores exactly
/// the first size(k) coefficients, and truncation is a resize.
class MultiIndexTable {
 public:
  struct LeibnizTerm {
    std::uint32_t lhs;
    std::uint32_t rhs;
    double coeff;
  };

  static const MultiIndexTable& get(int dim) {
    static const std::array<MultiIndexTable, kMaxDim + 1> tables = [] {
      std::array<MultiIndexTable, kMaxDim + 1> t;
      for (int d = 0; d <= kMaxDim; ++d) t[d].build(d);
      return t;
    }();
    if (dim < 0 || dim > kMaxDim) {
      throw InvalidArgument("jet dimension out of range: " + std::to_string(dim));
    }
    return tables[dim];
  }

  int dim() const { return dim_; }

  /// Number of multi-indices with total degree <= order.
  std::size_t size(int order) const { return prefix_[order + 1]; }

  const MultiIndex& index(std::size_t k) const { return indices_[k]; }
  int degree(std::size_t k) const { return degrees_[k]; }

  std::size_t find(const MultiIndex& alpha) const {
    auto it = lookup_.find(alpha);
    if (it == lookup_.end()) throw OrderError("multi-index degree exceeds maximum jet order");
    return it->second;
  }

  /// Position of alpha + e_axis, or -1 when that exceeds kMaxOrder.
  std::ptrdiff_t shifted(std::size_t k, int axis) const { return shift_[k * kMaxDim + axis]; }

  std::span<const LeibnizTerm> leibniz(std::size_t k) const {
    return {leibniz_.data() + leibniz_start_[k], leibniz_start_[k + 1] - leibniz_start_[k]};
  }

 private:
  void enumerate(int pos, int remaining, MultiIndex& cur) {
    if (pos == dim_ - 1 || dim_ == 0) {
      if (dim_ > 0) cur[pos] = static_cast<std::uint8_t>(remaining);
      if (dim_ == 0 && remaining != 0) return;
      indices_.push_back(cur);
      if (dim_ > 0) cur[pos] = 0;
      return;
    }
    for (int v = remaining; v >= 0; --v) {
      cur[pos] = static_cast<std::uint8_t>(v);
      enumerate(pos + 1, remaining - v, cur);
    }
    cur[pos] = 0;
  }

  static double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  }

  void build(int dim) {
    dim_ = dim;
    prefix_.assign(1, 0);
    for (int g = 0; g <= kMaxOrder; ++g) {
      MultiIndex cur{};
      enumerate(0, g, cur);
      prefix_.push_back(indices_.size());
    }
    for (std::size_t k = 0; k < indices_.size(); ++k) {
      int g = 0;
      for (int i = 0; i < kMaxDim; ++i) g += indices_[k][i];
      degrees_.push_back(g);
      lookup_[indices_[k]] = k;
    }
    shift_.assign(indices_.size() * kMaxDim, -1);
    for (std::size_t k = 0; k < indices_.size(); ++k) {
      for (int i = 0; i < dim_; ++i) {
        MultiIndex next = indices_[k];
        ++next[i];
        auto it = lookup_.find(next);
        if (it != lookup_.end()) shift_[k * kMaxDim + i] = static_cast<std::ptrdiff_t>(it->second);
      }
    }
    leibniz_start_.push_back(0);
    for (std::size_t k = 0; k < indices_.size(); ++k) {
      const MultiIndex& alpha = indices_[k];
      for (std::size_t j = 0; j < indices_.size(); ++j) {
        const MultiIndex& beta = indices_[j];
        bool below = true;
        double coeff = 1.0;
        MultiIndex rest{};
        for (int i = 0; i < kMaxDim && below; ++i) {
          if (beta[i] > alpha[i]) {
            below = false;
          } else {
            rest[i] = static_cast<std::uint8_t>(alpha[i] - beta[i]);
            coeff *= binomial(alpha[i], beta[i]);
          }
        }
        if (!below) continue;
        leibniz_.push_back({static_cast<std::uint32_t>(j),
                            static_cast<std::uint32_t>(lookup_.at(rest)), coeff});
      }
      leibniz_start_.push_back(leibniz_.size());
    }
  }

  int dim_ = 0;
  std::vector<MultiIndex> indices_;
  std::vector<int> degrees_;
  std::vector<std::size_t> prefix_;
  std::map<MultiIndex, std::size_t> lookup_;
  std::vector<std::ptrdiff_t> shift_;
  std::vector<LeibnizTerm> leibniz_;
  std::vector<std::size_t> leibniz_start_;
};

/// Convenience constructor: multi-index from a list of per-axis counts.
inline MultiIndex multi_index(std::initializer_list<int> counts) {
  MultiIndex a{};
  int i = 0;
  for (int c : counts) {
    if (i >= kMaxDim) throw InvalidArgument("multi-index longer than kMaxDim");
    a[i++] = static_cast<std::uint8_t>(c);
  }
  return a;
}

}  // namespace affsph
