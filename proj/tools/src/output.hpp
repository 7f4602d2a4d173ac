#pragma once

#include <filesystem>
#include <map>
#include <string>

namespace cpofdm::cli {

// Collects every artifact of a command in memory and writes them only once the
// command has succeeded, so a failing run leaves no partial output behind.
class OutputSet {
public:
    void add(const std::string& name, std::string content) { files_[name] = std::move(content); }
    const std::map<std::string, std::string>& files() const { return files_; }

    // Writes each file as <name>.tmp and renames it into place.
    void commit(const std::filesystem::path& dir) const;

private:
    std::map<std::string, std::string> files_;
};

}  // namespace cpofdm::cli
