#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace vf {

// Column/label order is fixed: SUPPORTS, REFUTES, NEI.
enum class Label : int { Supports = 0, Refutes = 1, Nei = 2 };

inline std::string to_string(Label label) {
    switch (label) {
        case Label::Supports: return "SUPPORTS";
        case Label::Refutes: return "REFUTES";
        case Label::Nei: return "NOT ENOUGH INFO";
    }
    return "NOT ENOUGH INFO";
}

inline std::optional<Label> label_from_string(std::string_view s) {
    if (s == "SUPPORTS") return Label::Supports;
    if (s == "REFUTES") return Label::Refutes;
    if (s == "NOT ENOUGH INFO") return Label::Nei;
    return std::nullopt;
}

}  // namespace vf
