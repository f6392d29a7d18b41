#pragma once

#include <boost/dynamic_bitset.hpp>

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace covlab {

// Subset of the point indices {0, ..., n-1} of a space.
class PointSet {
 public:
  using Bits = boost::dynamic_bitset<std::uint64_t>;
  static constexpr std::size_t npos = Bits::npos;

  PointSet() = default;
  explicit PointSet(std::size_t universe) : bits_(universe) {}
  PointSet(std::size_t universe, std::initializer_list<std::size_t> members) : bits_(universe) {
    for (std::size_t i : members) insert(i);
  }
  static PointSet from_indices(std::size_t universe, const std::vector<std::size_t>& members) {
    PointSet s(universe);
    for (std::size_t i : members) s.insert(i);
    return s;
  }
  static PointSet full(std::size_t universe) {
    PointSet s(universe);
    s.bits_.set();
    return s;
  }

  std::size_t universe() const { return bits_.size(); }
  std::size_t size() const { return bits_.count(); }
  bool empty() const { return bits_.none(); }

  bool contains(std::size_t i) const { return i < bits_.size() && bits_.test(i); }
  void insert(std::size_t i) {
    if (i >= bits_.size()) throw std::out_of_range("point index out of range");
    bits_.set(i);
  }
  void erase(std::size_t i) {
    if (i < bits_.size()) bits_.reset(i);
  }

  std::size_t first() const { return bits_.find_first(); }
  std::size_t next(std::size_t i) const { return bits_.find_next(i); }

  template <typename F>
  void for_each(F&& f) const {
    for (std::size_t i = bits_.find_first(); i != npos; i = bits_.find_next(i)) f(i);
  }
  std::vector<std::size_t> indices() const {
    std::vector<std::size_t> out;
    out.reserve(size());
    for_each([&](std::size_t i) { out.push_back(i); });
    return out;
  }

  bool is_subset_of(const PointSet& other) const {
    check_universe(other);
    return bits_.is_subset_of(other.bits_);
  }
  bool intersects(const PointSet& other) const {
    check_universe(other);
    return bits_.intersects(other.bits_);
  }

  PointSet& operator|=(const PointSet& o) { check_universe(o); bits_ |= o.bits_; return *this; }
  PointSet& operator&=(const PointSet& o) { check_universe(o); bits_ &= o.bits_; return *this; }
  PointSet& operator-=(const PointSet& o) { check_universe(o); bits_ -= o.bits_; return *this; }

  friend PointSet operator|(PointSet a, const PointSet& b) { return a |= b; }
  friend PointSet operator&(PointSet a, const PointSet& b) { return a &= b; }
  friend PointSet operator-(PointSet a, const PointSet& b) { return a -= b; }
  friend bool operator==(const PointSet& a, const PointSet& b) { return a.bits_ == b.bits_; }
  friend bool operator!=(const PointSet& a, const PointSet& b) { return !(a == b); }

  const Bits& bits() const { return bits_; }

 private:
  void check_universe(const PointSet& other) const {
    if (other.bits_.size() != bits_.size()) throw std::invalid_argument("PointSet universes differ");
  }

  Bits bits_;
};

}  // namespace covlab
