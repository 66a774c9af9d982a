#pragma once

#include "billprep/error.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace billprep {

// Writes through `<path>.partial` and renames on success. On failure the
// partial file is removed and the exception propagates.
template <typename Fn>
void write_file_atomically(const std::filesystem::path& path, Fn&& fill)
{
    std::filesystem::path partial = path;
    partial += ".partial";
    try {
        {
            std::ofstream out(partial, std::ios::binary | std::ios::trunc);
            if (!out) throw IoError("cannot create '" + partial.string() + "'");
            fill(out);
            out.flush();
            if (!out) throw IoError("write failed on '" + partial.string() + "'");
        }
        std::filesystem::rename(partial, path);
    } catch (...) {
        std::error_code ec;
        std::filesystem::remove(partial, ec);
        throw;
    }
}

inline std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace billprep
