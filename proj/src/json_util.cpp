#include "json_util.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "error.hpp"

namespace f4f {

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ValidationError("invalid JSON in " + path + ": " + e.what());
    }
    return j;
}

void write_json_file(const json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write file: " + path);
    out << j.dump(2) << "\n";
    if (!out) throw ValidationError("write failed: " + path);
}

std::string canonical_dump(const json& j) { return j.dump(); }

json matrix_to_json(const Matrix& m) {
    json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    j["data"] = m.values();
    return j;
}

Matrix matrix_from_json(const json& j, const std::string& context) {
    if (!j.contains("rows") || !j.contains("cols") || !j.contains("data"))
        throw ValidationError(context + ": matrix object missing rows/cols/data");
    std::size_t rows = j.at("rows").get<std::size_t>();
    std::size_t cols = j.at("cols").get<std::size_t>();
    const auto& data = j.at("data");
    if (data.size() != rows * cols)
        throw ValidationError(context + ": matrix data length does not match shape");
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < m.size(); ++i) m.values()[i] = data[i].get<double>();
    return m;
}

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    std::ostringstream os;
    os << std::hex << std::setfill('0') << std::setw(16) << h;
    return os.str();
}

}  // namespace f4f
