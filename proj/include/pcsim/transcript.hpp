#pragma once

#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <vector>

#include "json.hpp"

namespace pcsim {

/// Line-delimited JSON log that accepts appends from concurrent workers.
/// Constructed without a path it keeps lines in memory.
class TranscriptSink {
public:
    TranscriptSink() = default;
    explicit TranscriptSink(const std::filesystem::path& path);

    void append(const nlohmann::json& record);
    std::vector<std::string> lines() const;
    std::size_t size() const;

private:
    mutable std::mutex mutex_;
    std::ofstream file_;
    std::vector<std::string> lines_;
    bool to_file_ = false;
};

}  // namespace pcsim
