#include "output.hpp"

#include <fstream>
#include <stdexcept>

namespace cpofdm::cli {

void OutputSet::commit(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    std::map<std::filesystem::path, std::filesystem::path> staged;
    try {
        for (const auto& [name, content] : files_) {
            const auto final_path = dir / name;
            auto tmp = final_path;
            tmp += ".tmp";
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            out.write(content.data(), static_cast<std::streamsize>(content.size()));
            out.close();
            if (!out) throw std::runtime_error("cannot write " + tmp.string());
            staged.emplace(tmp, final_path);
        }
    } catch (...) {
        for (const auto& [tmp, final_path] : staged) std::filesystem::remove(tmp);
        throw;
    }
    for (const auto& [tmp, final_path] : staged) std::filesystem::rename(tmp, final_path);
}

}  // namespace cpofdm::cli
