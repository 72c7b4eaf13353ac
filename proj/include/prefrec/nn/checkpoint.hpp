#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prefrec/nn/adam.hpp"
#include "prefrec/nn/network.hpp"

namespace prefrec::nn {

struct NamedTensor {
  std::string name;
  std::vector<std::uint32_t> dims;
  std::vector<float> data;
};

/// Binary checkpoint: "PREFREC-CKPT v1\n" header, little-endian u32 tensor
/// count, per tensor (u32 name length, name bytes, u32 rank, u32 dims,
/// raw f32 data), then a zlib CRC32 of everything after the header.
void save_checkpoint(const std::string& path, const std::vector<NamedTensor>& tensors);

/// Loads and validates a checkpoint. Throws IoError on truncation, bad
/// header or CRC mismatch.
std::vector<NamedTensor> load_checkpoint(const std::string& path);

const NamedTensor* find_tensor(const std::vector<NamedTensor>& tensors, const std::string& name);

void pack_network(const std::string& prefix, const NetworkParams& net,
                  std::vector<NamedTensor>& out);
void pack_adam(const std::string& prefix, const AdamState& state, std::vector<NamedTensor>& out);

/// Fills an already shaped network / optimizer state from named tensors.
/// Shapes must match exactly; values are copied bit for bit.
void unpack_network(const std::string& prefix, const std::vector<NamedTensor>& tensors,
                    NetworkParams& net);
void unpack_adam(const std::string& prefix, const std::vector<NamedTensor>& tensors,
                 AdamState& state);

}  // namespace prefrec::nn
