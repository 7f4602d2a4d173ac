#include "cpofdm/keyvalue.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cpofdm::kv {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_tokens(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ' ' || c == '\t' || c == ',' || c == '\r') {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

bool parse_uint(const std::string& tok, std::uint64_t& out) {
    const char* first = tok.data();
    const char* last = first + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

bool parse_double(const std::string& tok, double& out) {
    std::istringstream in(tok);
    in.imbue(std::locale::classic());
    in >> out;
    return in && in.peek() == std::char_traits<char>::eof() && std::isfinite(out);
}

}  // namespace

Document Document::parse(std::istream& in, const std::string& source) {
    Document doc;
    doc.source_ = source;
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(source + ":" + std::to_string(lineno) + ": missing key");
        if (value.empty()) {
            throw ConfigError(source + ":" + std::to_string(lineno) + ": key '" + key + "' has no value");
        }
        auto [it, inserted] = doc.entries_.emplace(key, Entry{value, lineno});
        if (!inserted) {
            throw ConfigError(source + ":" + std::to_string(lineno) + ": duplicate key '" + key + "' (first on line " +
                              std::to_string(it->second.line) + ")");
        }
    }
    return doc;
}

Document Document::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    return parse(in, path.string());
}

void Document::restrict_keys(const std::set<std::string>& allowed) const {
    for (const auto& [key, entry] : entries_) {
        if (!allowed.count(key)) {
            throw ConfigError(source_ + ":" + std::to_string(entry.line) + ": unknown key '" + key + "'");
        }
    }
}

const Document::Entry& Document::require(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError(source_ + ": missing required key '" + key + "'");
    return it->second;
}

void Document::fail(const Entry& e, const std::string& key, const std::string& what) const {
    throw ConfigError(source_ + ":" + std::to_string(e.line) + ": key '" + key + "': " + what);
}

std::string Document::get_string(const std::string& key) const { return require(key).value; }

std::uint64_t Document::get_uint(const std::string& key) const {
    const Entry& e = require(key);
    std::uint64_t v = 0;
    if (!parse_uint(e.value, v)) fail(e, key, "'" + e.value + "' is not a non-negative integer");
    return v;
}

double Document::get_double(const std::string& key) const {
    const Entry& e = require(key);
    double v = 0.0;
    if (!parse_double(e.value, v)) fail(e, key, "'" + e.value + "' is not a finite number");
    return v;
}

bool Document::get_bool(const std::string& key) const {
    const Entry& e = require(key);
    if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
    if (e.value == "false" || e.value == "0" || e.value == "no") return false;
    fail(e, key, "'" + e.value + "' is not a boolean");
}

std::vector<double> Document::get_doubles(const std::string& key) const {
    const Entry& e = require(key);
    std::vector<double> out;
    for (const auto& tok : split_tokens(e.value)) {
        double v = 0.0;
        if (!parse_double(tok, v)) fail(e, key, "'" + tok + "' is not a finite number");
        out.push_back(v);
    }
    return out;
}

std::vector<std::uint64_t> Document::get_uints(const std::string& key) const {
    const Entry& e = require(key);
    std::vector<std::uint64_t> out;
    for (const auto& tok : split_tokens(e.value)) {
        std::uint64_t v = 0;
        if (!parse_uint(tok, v)) fail(e, key, "'" + tok + "' is not a non-negative integer");
        out.push_back(v);
    }
    return out;
}

std::vector<std::vector<double>> Document::get_matrix(const std::string& key) const {
    const Entry& e = require(key);
    std::vector<std::vector<double>> rows;
    std::stringstream ss(e.value);
    std::string row;
    while (std::getline(ss, row, ';')) {
        std::vector<double> r;
        for (const auto& tok : split_tokens(row)) {
            double v = 0.0;
            if (!parse_double(tok, v)) fail(e, key, "'" + tok + "' is not a finite number");
            r.push_back(v);
        }
        if (r.empty()) fail(e, key, "empty matrix row");
        if (!rows.empty() && r.size() != rows.front().size()) fail(e, key, "matrix rows differ in length");
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<std::vector<std::uint64_t>> Document::get_uint_matrix(const std::string& key) const {
    const Entry& e = require(key);
    std::vector<std::vector<std::uint64_t>> rows;
    std::stringstream ss(e.value);
    std::string row;
    while (std::getline(ss, row, ';')) {
        std::vector<std::uint64_t> r;
        for (const auto& tok : split_tokens(row)) {
            std::uint64_t v = 0;
            if (!parse_uint(tok, v)) fail(e, key, "'" + tok + "' is not a non-negative integer");
            r.push_back(v);
        }
        if (r.empty()) fail(e, key, "empty matrix row");
        if (!rows.empty() && r.size() != rows.front().size()) fail(e, key, "matrix rows differ in length");
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string Document::get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
}
std::uint64_t Document::get_uint(const std::string& key, std::uint64_t fallback) const {
    return has(key) ? get_uint(key) : fallback;
}
double Document::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}
bool Document::get_bool(const std::string& key, bool fallback) const { return has(key) ? get_bool(key) : fallback; }

}  // namespace cpofdm::kv
