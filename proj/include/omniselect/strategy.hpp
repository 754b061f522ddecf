#pragma once

#include <string>

#include "omniselect/error.hpp"

namespace omniselect {

// Pruning regime chosen from the modality-score gap.
enum class Strategy { Uniform, VideoCentric, AudioCentric };

inline const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::Uniform: return "Uniform";
        case Strategy::VideoCentric: return "VideoCentric";
        case Strategy::AudioCentric: return "AudioCentric";
    }
    return "Uniform";
}

inline Strategy strategy_from_name(const std::string& name) {
    if (name == "Uniform") return Strategy::Uniform;
    if (name == "VideoCentric") return Strategy::VideoCentric;
    if (name == "AudioCentric") return Strategy::AudioCentric;
    throw ValidationError("unknown strategy name: " + name);
}

} // namespace omniselect
