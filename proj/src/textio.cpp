#include "doppler/textio.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace doppler::textio {

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view token) {
    double value = 0.0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
        throw Error(ErrorCode::ParseError, "not a number: '" + std::string(token) + "'");
    }
    return value;
}

long long parse_int(std::string_view token) {
    long long value = 0;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
        throw Error(ErrorCode::ParseError, "not an integer: '" + std::string(token) + "'");
    }
    return value;
}

std::uint64_t fnv1a(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char ch : data) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

std::vector<std::string> split_ws(std::string_view line) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) out.emplace_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::string seal(std::string body) {
    body += "checksum " + hex64(fnv1a(body)) + "\n";
    return body;
}

std::string unseal(const std::string& contents, ErrorCode code) {
    const std::string key = "checksum ";
    std::size_t end = contents.size();
    if (end > 0 && contents[end - 1] == '\n') --end;
    const std::size_t start = contents.rfind('\n', end == 0 ? 0 : end - 1);
    const std::size_t line_start = start == std::string::npos ? 0 : start + 1;
    const std::string last = contents.substr(line_start, end - line_start);
    if (last.rfind(key, 0) != 0) throw Error(code, "missing checksum line");
    const std::string body = contents.substr(0, line_start);
    if (last.substr(key.size()) != hex64(fnv1a(body))) throw Error(code, "checksum mismatch");
    return body;
}

} // namespace doppler::textio
