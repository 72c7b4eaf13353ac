#include "prefrec/nn/checkpoint.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

#include "prefrec/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace prefrec::nn {

namespace {

constexpr char kMagic[] = "PREFREC-CKPT v1\n";
constexpr std::size_t kMagicLen = sizeof(kMagic) - 1;

void put_u32(std::string& buf, std::uint32_t v) {
  char bytes[4];
  std::memcpy(bytes, &v, 4);
  buf.append(bytes, 4);
}

std::uint32_t get_u32(const std::string& buf, std::size_t& pos) {
  if (pos + 4 > buf.size()) throw IoError("checkpoint: truncated while reading u32");
  std::uint32_t v;
  std::memcpy(&v, buf.data() + pos, 4);
  pos += 4;
  return v;
}

std::uint32_t payload_crc(const std::string& payload) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(payload.data()),
              static_cast<uInt>(payload.size()));
  return static_cast<std::uint32_t>(crc);
}

std::size_t element_count(const NamedTensor& t) {
  std::size_t n = 1;
  for (std::uint32_t d : t.dims) n *= d;
  return n;
}

}  // namespace

void save_checkpoint(const std::string& path, const std::vector<NamedTensor>& tensors) {
  std::string payload;
  put_u32(payload, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& t : tensors) {
    if (t.data.size() != element_count(t)) {
      throw IoError("checkpoint: tensor '" + t.name + "' data size does not match dims");
    }
    put_u32(payload, static_cast<std::uint32_t>(t.name.size()));
    payload.append(t.name);
    put_u32(payload, static_cast<std::uint32_t>(t.dims.size()));
    for (std::uint32_t d : t.dims) put_u32(payload, d);
    const std::size_t bytes = t.data.size() * sizeof(float);
    payload.append(reinterpret_cast<const char*>(t.data.data()), bytes);
  }
  const std::uint32_t crc = payload_crc(payload);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("checkpoint: cannot open '" + path + "' for writing");
  out.write(kMagic, static_cast<std::streamsize>(kMagicLen));
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  char crc_bytes[4];
  std::memcpy(crc_bytes, &crc, 4);
  out.write(crc_bytes, 4);
  if (!out) throw IoError("checkpoint: write failed for '" + path + "'");
}

std::vector<NamedTensor> load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("checkpoint: cannot open '" + path + "'");
  std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (raw.size() < kMagicLen + 8) throw IoError("checkpoint: file too short: '" + path + "'");
  if (raw.compare(0, kMagicLen, kMagic) != 0) {
    throw IoError("checkpoint: bad header in '" + path + "'");
  }
  const std::string payload = raw.substr(kMagicLen, raw.size() - kMagicLen - 4);
  std::size_t tail = raw.size() - 4;
  std::uint32_t stored_crc;
  std::memcpy(&stored_crc, raw.data() + tail, 4);
  if (stored_crc != payload_crc(payload)) {
    throw IoError("checkpoint: CRC mismatch in '" + path + "'");
  }

  std::size_t pos = 0;
  const std::uint32_t count = get_u32(payload, pos);
  std::vector<NamedTensor> tensors;
  tensors.reserve(count);
  for (std::uint32_t ti = 0; ti < count; ++ti) {
    NamedTensor t;
    const std::uint32_t name_len = get_u32(payload, pos);
    if (pos + name_len > payload.size()) throw IoError("checkpoint: truncated tensor name");
    t.name.assign(payload.data() + pos, name_len);
    pos += name_len;
    const std::uint32_t rank = get_u32(payload, pos);
    t.dims.resize(rank);
    std::size_t elems = 1;
    for (std::uint32_t r = 0; r < rank; ++r) {
      t.dims[r] = get_u32(payload, pos);
      elems *= t.dims[r];
    }
    const std::size_t bytes = elems * sizeof(float);
    if (pos + bytes > payload.size()) {
      throw IoError("checkpoint: truncated data for tensor '" + t.name + "'");
    }
    t.data.resize(elems);
    std::memcpy(t.data.data(), payload.data() + pos, bytes);
    pos += bytes;
    tensors.push_back(std::move(t));
  }
  if (pos != payload.size()) throw IoError("checkpoint: trailing bytes in '" + path + "'");
  return tensors;
}

const NamedTensor* find_tensor(const std::vector<NamedTensor>& tensors, const std::string& name) {
  for (const auto& t : tensors) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

void pack_network(const std::string& prefix, const NetworkParams& net,
                  std::vector<NamedTensor>& out) {
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const auto& l = net.layers[i];
    const std::string base = prefix + ".layer" + std::to_string(i);
    out.push_back({base + ".w",
                   {static_cast<std::uint32_t>(l.out), static_cast<std::uint32_t>(l.in)},
                   l.w});
    out.push_back({base + ".b", {static_cast<std::uint32_t>(l.out)}, l.b});
  }
}

void pack_adam(const std::string& prefix, const AdamState& state, std::vector<NamedTensor>& out) {
  for (std::size_t i = 0; i < state.layers.size(); ++i) {
    const auto& m = state.layers[i];
    const std::string base = prefix + ".adam.layer" + std::to_string(i);
    out.push_back({base + ".mw", {static_cast<std::uint32_t>(m.mw.size())}, m.mw});
    out.push_back({base + ".vw", {static_cast<std::uint32_t>(m.vw.size())}, m.vw});
    out.push_back({base + ".mb", {static_cast<std::uint32_t>(m.mb.size())}, m.mb});
    out.push_back({base + ".vb", {static_cast<std::uint32_t>(m.vb.size())}, m.vb});
  }
  out.push_back({prefix + ".adam.step", {1}, {static_cast<float>(state.step)}});
}

namespace {

const NamedTensor& require_tensor(const std::vector<NamedTensor>& tensors,
                                  const std::string& name) {
  const NamedTensor* t = find_tensor(tensors, name);
  if (t == nullptr) throw IoError("checkpoint: missing tensor '" + name + "'");
  return *t;
}

void copy_exact(const NamedTensor& t, std::vector<float>& dst) {
  if (t.data.size() != dst.size()) {
    throw IoError("checkpoint: tensor '" + t.name + "' has " + std::to_string(t.data.size()) +
                  " elements, expected " + std::to_string(dst.size()));
  }
  dst = t.data;
}

}  // namespace

void unpack_network(const std::string& prefix, const std::vector<NamedTensor>& tensors,
                    NetworkParams& net) {
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    auto& l = net.layers[i];
    const std::string base = prefix + ".layer" + std::to_string(i);
    copy_exact(require_tensor(tensors, base + ".w"), l.w);
    copy_exact(require_tensor(tensors, base + ".b"), l.b);
  }
}

void unpack_adam(const std::string& prefix, const std::vector<NamedTensor>& tensors,
                 AdamState& state) {
  for (std::size_t i = 0; i < state.layers.size(); ++i) {
    auto& m = state.layers[i];
    const std::string base = prefix + ".adam.layer" + std::to_string(i);
    copy_exact(require_tensor(tensors, base + ".mw"), m.mw);
    copy_exact(require_tensor(tensors, base + ".vw"), m.vw);
    copy_exact(require_tensor(tensors, base + ".mb"), m.mb);
    copy_exact(require_tensor(tensors, base + ".vb"), m.vb);
  }
  const NamedTensor& step = require_tensor(tensors, prefix + ".adam.step");
  if (step.data.size() != 1) throw IoError("checkpoint: malformed step counter");
  state.step = static_cast<std::int64_t>(step.data[0]);
}

}  // namespace prefrec::nn
