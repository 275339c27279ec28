// Copyright 2026 The guivec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "guivec/checkpoint.hpp"

#include <bit>
#include <cstring>

#include "guivec/error.hpp"
#include "guivec/util.hpp"

namespace guivec {

namespace {

constexpr std::string_view kMagic = "GV01";

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out += static_cast<char>((v >> (8 * i)) & 0xFF);
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::string_view take(std::size_t n) {
    if (pos_ + n > bytes_.size()) throw FormatError("checkpoint truncated");
    std::string_view out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  std::uint32_t u32() {
    const std::string_view b = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[i])) << (8 * i);
    return v;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

const TensorRecord& Checkpoint::get(std::string_view name) const {
  for (const TensorRecord& t : tensors) {
    if (t.name == name) return t;
  }
  throw FormatError("checkpoint has no tensor named " + std::string(name));
}

bool Checkpoint::has(std::string_view name) const {
  for (const TensorRecord& t : tensors) {
    if (t.name == name) return true;
  }
  return false;
}

std::string Checkpoint::to_bytes() const {
  std::string out(kMagic);
  const std::string head = header.dump();
  put_u32(out, static_cast<std::uint32_t>(head.size()));
  out += head;
  put_u32(out, static_cast<std::uint32_t>(tensors.size()));
  for (const TensorRecord& t : tensors) {
    put_u32(out, static_cast<std::uint32_t>(t.name.size()));
    out += t.name;
    put_u32(out, static_cast<std::uint32_t>(t.shape.size()));
    std::size_t count = 1;
    for (std::uint32_t d : t.shape) {
      put_u32(out, d);
      count *= d;
    }
    if (count != t.values.size()) throw FormatError("tensor " + t.name + " size disagrees with shape");
    for (float f : t.values) put_u32(out, std::bit_cast<std::uint32_t>(f));
  }
  return out;
}

Checkpoint Checkpoint::from_bytes(std::string_view bytes) {
  Reader in(bytes);
  if (in.take(kMagic.size()) != kMagic) throw FormatError("not a GV01 checkpoint");
  Checkpoint ckpt;
  const std::uint32_t head_len = in.u32();
  try {
    ckpt.header = nlohmann::json::parse(in.take(head_len));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("checkpoint header: ") + e.what());
  }
  const std::uint32_t count = in.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    TensorRecord t;
    t.name = std::string(in.take(in.u32()));
    const std::uint32_t rank = in.u32();
    std::size_t n = 1;
    for (std::uint32_t r = 0; r < rank; ++r) {
      t.shape.push_back(in.u32());
      n *= t.shape.back();
    }
    t.values.resize(n);
    for (std::size_t j = 0; j < n; ++j) t.values[j] = std::bit_cast<float>(in.u32());
    ckpt.tensors.push_back(std::move(t));
  }
  if (!in.done()) throw FormatError("trailing bytes after checkpoint tensors");
  return ckpt;
}

nlohmann::json Checkpoint::sidecar() const {
  nlohmann::json j;
  j["format"] = "GV01";
  j["header"] = header;
  j["tensors"] = nlohmann::json::array();
  for (const TensorRecord& t : tensors) j["tensors"].push_back({{"name", t.name}, {"shape", t.shape}});
  return j;
}

void Checkpoint::save(const std::filesystem::path& path) const {
  write_file(path, to_bytes());
  write_file(path.string() + ".json", sidecar().dump(2) + "\n");
}

Checkpoint Checkpoint::load(const std::filesystem::path& path) { return from_bytes(read_file(path)); }

}  // namespace guivec
