#pragma once

// Minimal "key = value" configuration text.
//
//   # comment to end of line
//   num_tx = 2
//   eta    = 17 0 ; 6 32        # matrix rows separated by ';'
//   target_cells = 3 17 40      # whitespace or comma separated list
//
// Keys are case sensitive, may appear once, and must belong to the schema the
// caller passes to `restrict_keys`.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace cpofdm::kv {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Document {
public:
    static Document parse(std::istream& in, const std::string& source);
    static Document load(const std::filesystem::path& path);

    // Throws ConfigError naming the first key (and its line) not in `allowed`.
    void restrict_keys(const std::set<std::string>& allowed) const;

    bool has(const std::string& key) const { return entries_.count(key) != 0; }
    const std::string& source() const { return source_; }

    std::string get_string(const std::string& key) const;
    std::uint64_t get_uint(const std::string& key) const;
    double get_double(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    std::vector<double> get_doubles(const std::string& key) const;
    std::vector<std::uint64_t> get_uints(const std::string& key) const;
    // Rows separated by ';'. Every row must have the same length.
    std::vector<std::vector<double>> get_matrix(const std::string& key) const;
    std::vector<std::vector<std::uint64_t>> get_uint_matrix(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

private:
    struct Entry {
        std::string value;
        std::size_t line = 0;
    };
    const Entry& require(const std::string& key) const;
    [[noreturn]] void fail(const Entry& e, const std::string& key, const std::string& what) const;

    std::string source_;
    std::map<std::string, Entry> entries_;
};

}  // namespace cpofdm::kv
