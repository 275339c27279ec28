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

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "guivec/nn.hpp"
#include "json.hpp"

namespace guivec {

struct TensorRecord {
  std::string name;
  std::vector<std::uint32_t> shape;
  std::vector<float> values;
};

// Binary model file:
//   "GV01" | u32 header length | header JSON | u32 tensor count |
//   per tensor: u32 name length, UTF-8 name, u32 rank, u32 dims[rank],
//               little-endian float32 values
// All integers little-endian. A JSON sidecar (`<file>.json`) repeats the
// header plus tensor names and shapes.
struct Checkpoint {
  nlohmann::json header = nlohmann::json::object();
  std::vector<TensorRecord> tensors;

  const TensorRecord& get(std::string_view name) const;
  bool has(std::string_view name) const;

  std::string to_bytes() const;
  static Checkpoint from_bytes(std::string_view bytes);

  nlohmann::json sidecar() const;
  void save(const std::filesystem::path& path) const;
  static Checkpoint load(const std::filesystem::path& path);
};

template <typename T>
TensorRecord to_record(const nn::Parameter<T>& p) {
  TensorRecord r;
  r.name = p.name;
  for (std::size_t d : p.shape()) r.shape.push_back(static_cast<std::uint32_t>(d));
  r.values.resize(static_cast<std::size_t>(p.value.size()));
  for (Eigen::Index i = 0; i < p.value.size(); ++i) {
    r.values[static_cast<std::size_t>(i)] = static_cast<float>(p.value.data()[i]);
  }
  return r;
}

template <typename T>
void from_record(const TensorRecord& r, nn::Parameter<T>& p) {
  std::vector<std::uint32_t> expected;
  for (std::size_t d : p.shape()) expected.push_back(static_cast<std::uint32_t>(d));
  if (r.shape != expected) throw ShapeMismatch("checkpoint tensor " + r.name + " has unexpected shape");
  for (Eigen::Index i = 0; i < p.value.size(); ++i) {
    p.value.data()[i] = static_cast<T>(r.values[static_cast<std::size_t>(i)]);
  }
}

template <typename T>
void add_parameters(Checkpoint& ckpt, const std::vector<nn::Parameter<T>*>& params) {
  for (const nn::Parameter<T>* p : params) ckpt.tensors.push_back(to_record(*p));
}

template <typename T>
void load_parameters(const Checkpoint& ckpt, const std::vector<nn::Parameter<T>*>& params) {
  for (nn::Parameter<T>* p : params) from_record(ckpt.get(p->name), *p);
}

}  // namespace guivec
