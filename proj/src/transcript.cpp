#include "pcsim/transcript.hpp"

#include "pcsim/errors.hpp"

namespace pcsim {

TranscriptSink::TranscriptSink(const std::filesystem::path& path) : file_(path, std::ios::app), to_file_(true) {
    if (!file_) throw Error("cannot open transcript " + path.string());
}

void TranscriptSink::append(const nlohmann::json& record) {
    std::string line = record.dump();
    std::lock_guard lock(mutex_);
    if (to_file_) {
        file_ << line << '\n';
        file_.flush();
    }
    lines_.push_back(std::move(line));
}

std::vector<std::string> TranscriptSink::lines() const {
    std::lock_guard lock(mutex_);
    return lines_;
}

std::size_t TranscriptSink::size() const {
    std::lock_guard lock(mutex_);
    return lines_.size();
}

}  // namespace pcsim
