#include "atm/topology.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>

namespace atm {

std::string DpuId::str() const {
  std::string out = "(";
  for (int i = 0; i < dims; ++i) {
    if (i) out += ',';
    out += std::to_string(coords[i]);
  }
  return out + ")";
}

DpuId make_dpu(std::initializer_list<int> coords) {
  DpuId id;
  id.dims = static_cast<std::uint8_t>(coords.size());
  std::size_t i = 0;
  for (int c : coords) {
    if (i < id.coords.size()) id.coords[i] = c;
    ++i;
  }
  return id;
}

Topology::Topology(std::initializer_list<int> extent) : Topology(std::vector<int>(extent)) {}

Topology::Topology(const std::vector<int>& extent) {
  if (extent.size() != 2 && extent.size() != 3) {
    throw TopologyError("invalid topology: dims must be 2 or 3, got " + std::to_string(extent.size()));
  }
  dims_ = static_cast<int>(extent.size());
  size_ = 1;
  for (int i = 0; i < dims_; ++i) {
    if (extent[i] < 1) throw TopologyError("invalid topology: zero or negative extent");
    extent_[i] = extent[i];
    size_ *= static_cast<std::size_t>(extent[i]);
  }
}

Topology Topology::parse(std::string_view text) {
  std::vector<int> extent;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find_first_of("xX", pos);
    if (end == std::string_view::npos) end = text.size();
    auto part = text.substr(pos, end - pos);
    int value = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
    if (part.empty() || ec != std::errc{} || ptr != part.data() + part.size()) {
      throw TopologyError("invalid topology: cannot parse '" + std::string(text) + "'");
    }
    extent.push_back(value);
    pos = end + 1;
  }
  return Topology(extent);
}

bool Topology::contains(const DpuId& id) const {
  if (id.dims != dims_) return false;
  for (int i = 0; i < dims_; ++i) {
    if (id.coords[i] < 0 || id.coords[i] >= extent_[i]) return false;
  }
  for (int i = dims_; i < 3; ++i) {
    if (id.coords[i] != 0) return false;
  }
  return true;
}

void Topology::require(const DpuId& id) const {
  if (!contains(id)) throw TopologyError("unknown DpuId " + id.str());
}

std::size_t Topology::index_of(const DpuId& id) const {
  require(id);
  std::size_t idx = 0;
  for (int i = 0; i < dims_; ++i) idx = idx * static_cast<std::size_t>(extent_[i]) + id.coords[i];
  return idx;
}

DpuId Topology::at(std::size_t row_major_index) const {
  if (row_major_index >= size_) throw TopologyError("row-major index out of range");
  DpuId id;
  id.dims = static_cast<std::uint8_t>(dims_);
  for (int i = dims_ - 1; i >= 0; --i) {
    id.coords[i] = static_cast<int>(row_major_index % extent_[i]);
    row_major_index /= extent_[i];
  }
  return id;
}

DpuId Topology::origin() const {
  DpuId id;
  id.dims = static_cast<std::uint8_t>(dims_);
  return id;
}

std::vector<DpuId> Topology::all() const {
  std::vector<DpuId> out;
  out.reserve(size_);
  for (std::size_t i = 0; i < size_; ++i) out.push_back(at(i));
  return out;
}

int Topology::distance(const DpuId& a, const DpuId& b) const {
  require(a);
  require(b);
  int d = 0;
  for (int i = 0; i < dims_; ++i) d += std::abs(a.coords[i] - b.coords[i]);
  return d;
}

int Topology::diameter() const {
  int d = 0;
  for (int i = 0; i < dims_; ++i) d += extent_[i] - 1;
  return d;
}

int Topology::eccentricity(const DpuId& id) const {
  require(id);
  int d = 0;
  for (int i = 0; i < dims_; ++i) d += std::max(id.coords[i], extent_[i] - 1 - id.coords[i]);
  return d;
}

std::string Topology::str() const {
  std::string out;
  for (int i = 0; i < dims_; ++i) {
    if (i) out += 'x';
    out += std::to_string(extent_[i]);
  }
  return out;
}

}  // namespace atm
