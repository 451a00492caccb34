#pragma once

#include <string>

#include <json.hpp>

#include "matrix.hpp"

namespace f4f {

using json = nlohmann::ordered_json;

json read_json_file(const std::string& path);
// serialization is canonical (stable key order, round-trip-safe doubles) so
// identical content produces identical bytes
void write_json_file(const json& j, const std::string& path);
std::string canonical_dump(const json& j);

json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j, const std::string& context);

// FNV-1a 64-bit over a string; used for schema/config hashes in manifests
std::uint64_t fnv1a64(const std::string& s);
std::string hash_hex(std::uint64_t h);

}  // namespace f4f
