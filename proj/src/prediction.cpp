#include "nhpc/prediction.hpp"

#include <utility>

namespace nhpc {

std::string flags_to_string(unsigned flags) {
    static constexpr std::pair<Flag, const char*> kNames[] = {
        {Flag::variance_clamped, "variance_clamped"},
        {Flag::mean_clamped, "mean_clamped"},
        {Flag::precision_warning, "precision_warning"},
        {Flag::tail_event, "tail_event"},
    };
    std::string out;
    for (const auto& [flag, name] : kNames) {
        if (flags & static_cast<unsigned>(flag)) {
            if (!out.empty()) out += '|';
            out += name;
        }
    }
    return out;
}

}  // namespace nhpc
