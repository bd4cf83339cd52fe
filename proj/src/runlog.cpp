#include "pcsim/runlog.hpp"

#include <stdexcept>
#include <string>

namespace pcsim {

std::string_view to_string(Mode mode) {
    switch (mode) {
        case Mode::dpc: return "dpc";
        case Mode::genai_alone: return "genai_alone";
        case Mode::genainet: return "genainet";
    }
    return "unknown";
}

std::string_view to_string(BackendKind kind) {
    return kind == BackendKind::scripted ? "scripted" : "remote";
}

Mode parse_mode(std::string_view name) {
    for (Mode m : kAllModes)
        if (to_string(m) == name) return m;
    throw std::invalid_argument("unknown mode '" + std::string(name) + "'");
}

BackendKind parse_backend(std::string_view name) {
    if (name == "scripted") return BackendKind::scripted;
    if (name == "remote") return BackendKind::remote;
    throw std::invalid_argument("unknown backend '" + std::string(name) + "'");
}

}  // namespace pcsim
