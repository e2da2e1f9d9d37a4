#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace atm {

class TopologyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Address of one DPU in the mesh. Unused trailing coordinates are zero.
struct DpuId {
  std::uint8_t dims = 2;
  std::array<int, 3> coords{};

  auto operator<=>(const DpuId&) const = default;

  int operator[](std::size_t i) const { return coords[i]; }
  std::string str() const;
};

DpuId make_dpu(std::initializer_list<int> coords);

/// 2D or 3D mesh without wraparound. Row-major order: the last coordinate
/// varies fastest.
class Topology {
 public:
  Topology(std::initializer_list<int> extent);
  explicit Topology(const std::vector<int>& extent);

  /// Parses "4x4" or "2x2x2".
  static Topology parse(std::string_view text);

  int dims() const { return dims_; }
  int extent(int dim) const { return extent_[dim]; }
  std::size_t size() const { return size_; }

  bool contains(const DpuId& id) const;
  std::size_t index_of(const DpuId& id) const;
  DpuId at(std::size_t row_major_index) const;
  DpuId origin() const;

  /// All DPUs in row-major order.
  std::vector<DpuId> all() const;

  int distance(const DpuId& a, const DpuId& b) const;
  int diameter() const;
  int eccentricity(const DpuId& id) const;

  std::string str() const;

 private:
  void require(const DpuId& id) const;

  int dims_ = 2;
  std::array<int, 3> extent_{1, 1, 1};
  std::size_t size_ = 1;
};

}  // namespace atm
