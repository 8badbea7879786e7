// Copyright 2026 the rfot authors
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
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rfot {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string> split(std::string_view s, char delim);
bool starts_with(std::string_view s, std::string_view prefix);
bool contains(std::string_view s, std::string_view needle);

/// FNV-1a 64-bit hash. Stable across platforms and runs.
std::uint64_t fnv1a64(std::string_view bytes);

/// SplitMix64 step, used to spread seeds into independent streams.
std::uint64_t splitmix64(std::uint64_t x);

std::string to_hex(std::uint64_t value);

/// Fixed-point decimal formatting ("%.2f" style), for reproducible reports.
std::string format_fixed(double value, int decimals);

/// First maximal digit run in [lo, hi], read left to right. "Label: 5" -> 5,
/// "10" -> nullopt for [1,5] (the run parses as ten, not one).
std::optional<int> first_int_in_range(std::string_view text, int lo, int hi);

/// Decodes UTF-8 into Unicode scalar values. Invalid bytes are passed through
/// one byte at a time rather than rejected.
std::vector<std::uint32_t> decode_utf8(std::string_view s);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// Runs fn(0..n-1) on up to `jobs` worker threads. jobs <= 1 runs inline.
/// The first exception thrown by any worker is rethrown after all join.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace rfot
