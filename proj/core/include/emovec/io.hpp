// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace emovec {

/// Reads a whole file. Throws ValidationError naming the path on failure.
std::string read_file(const std::filesystem::path& path);

/// Writes `contents` to a sibling temp file, then renames it over `path`.
/// Readers never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// printf("%.17g"): enough digits to round-trip any double.
std::string format_double17(double value);

/// Shortest decimal string that round-trips (e.g. "0.5").
std::string format_shortest(double value);

/// Trims ASCII whitespace from both ends.
std::string_view trim(std::string_view s);

}  // namespace emovec
