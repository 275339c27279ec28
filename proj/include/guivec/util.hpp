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
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace guivec {

// 64-bit FNV-1a. Used for split assignment, n-gram hashing and artifact
// fingerprints; stable across platforms.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 14695981039346656037ull);
std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes,
                      std::uint64_t seed = 14695981039346656037ull);
std::string to_hex(std::uint64_t value);

// Deterministic train/validation assignment by key hash.
bool in_training_split(std::string_view key, double train_fraction);

std::string base64_encode(std::string_view bytes);
// Throws FormatError on characters outside the standard alphabet.
std::string base64_decode(std::string_view text);

std::string trim(std::string_view s);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

// Splits UTF-8 into code points, each kept as its own UTF-8 byte string.
// Invalid bytes are passed through one at a time.
std::vector<std::string> utf8_code_points(std::string_view s);

void log_warning(const std::string& message);
void set_quiet(bool quiet);

}  // namespace guivec
