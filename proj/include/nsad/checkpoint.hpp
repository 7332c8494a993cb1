#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nsad/tensor.hpp"

namespace nsad {

// Ordered named-tensor container backing every checkpoint on disk.
//
// File layout (all integers little-endian):
//   magic "NSAD" | version u32 | records until EOF
//   record: name length u32 | UTF-8 name | rank u32 | dims u64[rank] | values f64[]
// Round-trips are byte-exact: record order is insertion order.
class NamedTensors {
public:
    void put(std::string name, Tensor t);
    const Tensor& get(const std::string& name) const; // throws DataError if missing
    const Tensor* find(const std::string& name) const;
    bool contains(const std::string& name) const { return find(name) != nullptr; }

    const std::vector<std::pair<std::string, Tensor>>& items() const { return items_; }

private:
    std::vector<std::pair<std::string, Tensor>> items_;
};

void save_tensors(const std::string& path, const NamedTensors& tensors);
NamedTensors load_tensors(const std::string& path);

inline constexpr std::uint32_t kCheckpointVersion = 1;

} // namespace nsad
