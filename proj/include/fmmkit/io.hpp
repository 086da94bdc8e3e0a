#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "fmmkit/tensor.hpp"

namespace fmmkit {

/// Reads the line-oriented `fmm 1` tensor format. Throws ParseError with the
/// offending line number.
FmmTensor parse_tensor(std::string_view text);
/// Canonical serialization; parse_tensor(write_tensor(t)) == t.
std::string write_tensor(const FmmTensor& t);

FmmTensor load_tensor(const std::filesystem::path& path);
void save_tensor(const std::filesystem::path& path, const FmmTensor& t);

/// Matrix files: `rows cols` header followed by row-major rational tokens.
RationalMatrix parse_matrix(std::string_view text);
std::string write_matrix(const RationalMatrix& m);
RationalMatrix load_matrix(const std::filesystem::path& path);
void save_matrix(const std::filesystem::path& path, const RationalMatrix& m);

std::string read_file(const std::filesystem::path& path);

}  // namespace fmmkit
