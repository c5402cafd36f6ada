#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "vcsp/errors.hpp"

namespace vcsp {

using Label = int;

inline constexpr int kMaxDomainSize = 64;

// Subset of the labels {0, ..., universe-1} of one variable.
class LabelSet {
 public:
  LabelSet() = default;
  explicit LabelSet(int universe) : universe_(universe) { check_universe(universe); }
  LabelSet(int universe, std::uint64_t bits) : universe_(universe), bits_(bits & mask(universe)) {
    check_universe(universe);
  }

  static LabelSet full(int universe) { return LabelSet(universe, mask(universe)); }
  static LabelSet single(int universe, Label a) {
    LabelSet s(universe);
    s.insert(a);
    return s;
  }

  int universe() const { return universe_; }
  std::uint64_t bits() const { return bits_; }

  bool contains(Label a) const { return a >= 0 && a < universe_ && ((bits_ >> a) & 1u); }
  void insert(Label a) { bits_ |= (std::uint64_t{1} << a); }
  void erase(Label a) { bits_ &= ~(std::uint64_t{1} << a); }
  bool empty() const { return bits_ == 0; }
  int count() const { return std::popcount(bits_); }

  bool intersects(const LabelSet& o) const { return (bits_ & o.bits_) != 0; }
  bool subset_of(const LabelSet& o) const { return (bits_ & ~o.bits_) == 0; }

  LabelSet& operator&=(const LabelSet& o) {
    bits_ &= o.bits_;
    return *this;
  }
  LabelSet& operator|=(const LabelSet& o) {
    bits_ |= o.bits_;
    return *this;
  }
  friend LabelSet operator&(LabelSet a, const LabelSet& b) { return a &= b; }
  friend LabelSet operator|(LabelSet a, const LabelSet& b) { return a |= b; }
  LabelSet complement() const { return LabelSet(universe_, ~bits_); }

  friend bool operator==(const LabelSet&, const LabelSet&) = default;

  std::vector<Label> labels() const {
    std::vector<Label> out;
    for (std::uint64_t b = bits_; b != 0; b &= b - 1) out.push_back(std::countr_zero(b));
    return out;
  }

  // Smallest label, or -1 when empty.
  Label first() const { return bits_ == 0 ? -1 : std::countr_zero(bits_); }

  std::string to_bit_string() const {
    std::string s(static_cast<std::size_t>(universe_), '0');
    for (int a = 0; a < universe_; ++a) if (contains(a)) s[static_cast<std::size_t>(a)] = '1';
    return s;
  }

 private:
  static std::uint64_t mask(int universe) {
    return universe >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << universe) - 1);
  }
  static void check_universe(int universe) {
    if (universe < 0 || universe > kMaxDomainSize) {
      throw UsageError("domain size " + std::to_string(universe) + " outside 0.." +
                       std::to_string(kMaxDomainSize));
    }
  }

  int universe_ = 0;
  std::uint64_t bits_ = 0;
};

// Dense boolean matrix over D_row x D_col, one 64-bit word per row.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(int rows, int cols)
      : rows_(LabelSet(rows).universe()), cols_(LabelSet(cols).universe()), data_(static_cast<std::size_t>(rows)) {}

  static BitMatrix full(int rows, int cols) {
    BitMatrix m(rows, cols);
    for (auto& w : m.data_) w = LabelSet::full(cols).bits();
    return m;
  }
  static BitMatrix product(const LabelSet& r, const LabelSet& c) {
    BitMatrix m(r.universe(), c.universe());
    for (Label a : r.labels()) m.data_[static_cast<std::size_t>(a)] = c.bits();
    return m;
  }
  static BitMatrix identity(int n) {
    BitMatrix m(n, n);
    for (int a = 0; a < n; ++a) m.set(a, a);
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  bool test(Label r, Label c) const { return (data_[static_cast<std::size_t>(r)] >> c) & 1u; }
  void set(Label r, Label c, bool v = true) {
    auto& w = data_[static_cast<std::size_t>(r)];
    if (v) w |= (std::uint64_t{1} << c);
    else w &= ~(std::uint64_t{1} << c);
  }

  LabelSet row(Label r) const { return LabelSet(cols_, data_[static_cast<std::size_t>(r)]); }
  LabelSet column(Label c) const {
    LabelSet s(rows_);
    for (int r = 0; r < rows_; ++r) if (test(r, c)) s.insert(r);
    return s;
  }
  void set_row(Label r, const LabelSet& s) { data_[static_cast<std::size_t>(r)] = s.bits(); }

  // Labels of the row variable with at least one partner.
  LabelSet row_support() const {
    LabelSet s(rows_);
    for (int r = 0; r < rows_; ++r) if (data_[static_cast<std::size_t>(r)] != 0) s.insert(r);
    return s;
  }
  LabelSet column_support() const {
    std::uint64_t acc = 0;
    for (auto w : data_) acc |= w;
    return LabelSet(cols_, acc);
  }

  BitMatrix transpose() const {
    BitMatrix t(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c)
        if (test(r, c)) t.set(c, r);
    return t;
  }

  bool empty() const {
    for (auto w : data_) if (w != 0) return false;
    return true;
  }
  int count() const {
    int n = 0;
    for (auto w : data_) n += std::popcount(w);
    return n;
  }

  BitMatrix& operator&=(const BitMatrix& o) {
    check_same_shape(o);
    for (std::size_t r = 0; r < data_.size(); ++r) data_[r] &= o.data_[r];
    return *this;
  }
  BitMatrix& operator|=(const BitMatrix& o) {
    check_same_shape(o);
    for (std::size_t r = 0; r < data_.size(); ++r) data_[r] |= o.data_[r];
    return *this;
  }
  friend BitMatrix operator&(BitMatrix a, const BitMatrix& b) { return a &= b; }
  friend BitMatrix operator|(BitMatrix a, const BitMatrix& b) { return a |= b; }

  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

  // Rows as bit-strings, row-major.
  std::string to_bit_string(char row_separator = ' ') const {
    std::string s;
    for (int r = 0; r < rows_; ++r) {
      if (r > 0) s += row_separator;
      s += row(r).to_bit_string();
    }
    return s;
  }

 private:
  void check_same_shape(const BitMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw UsageError("bit-matrix shape mismatch");
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::uint64_t> data_;
};

enum class Side { forward, backward };

// forward: {y | exists x in labels with (x,y) in rel}; backward: {x | exists y in labels with (x,y) in rel}.
inline LabelSet image(const BitMatrix& rel, const LabelSet& labels, Side side) {
  if (side == Side::forward) {
    if (labels.universe() != rel.rows()) throw UsageError("image: label set does not match relation rows");
    LabelSet out(rel.cols());
    for (Label x : labels.labels()) out |= rel.row(x);
    return out;
  }
  if (labels.universe() != rel.cols()) throw UsageError("image: label set does not match relation columns");
  LabelSet out(rel.rows());
  for (int x = 0; x < rel.rows(); ++x) if (rel.row(x).intersects(labels)) out.insert(x);
  return out;
}

inline BitMatrix compose(const BitMatrix& left, const BitMatrix& right) {
  if (left.cols() != right.rows()) {
    throw UsageError("compose: middle domains differ (" + std::to_string(left.cols()) + " vs " +
                     std::to_string(right.rows()) + ")");
  }
  BitMatrix out(left.rows(), right.cols());
  for (int x = 0; x < left.rows(); ++x) {
    LabelSet acc(right.cols());
    for (Label y : left.row(x).labels()) acc |= right.row(y);
    out.set_row(x, acc);
  }
  return out;
}

}  // namespace vcsp
