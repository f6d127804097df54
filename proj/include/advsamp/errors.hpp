#pragma once

#include <stdexcept>
#include <string>

namespace advsamp {

enum class ErrorCategory {
    config,
    input,
    training,
    attack,
    numeric,
    geometry,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCategory cat, const std::string& msg)
        : std::runtime_error(msg), category_(cat) {}

    ErrorCategory category() const { return category_; }

    static Error config_error(const std::string& msg) { return {ErrorCategory::config, msg}; }
    static Error input_error(const std::string& msg) { return {ErrorCategory::input, msg}; }
    static Error training_error(const std::string& msg) { return {ErrorCategory::training, msg}; }
    static Error attack_error(const std::string& msg) { return {ErrorCategory::attack, msg}; }
    static Error numeric_error(const std::string& msg) { return {ErrorCategory::numeric, msg}; }
    static Error geometry_error(const std::string& msg) { return {ErrorCategory::geometry, msg}; }

private:
    ErrorCategory category_;
};

inline const char* category_name(ErrorCategory cat) {
    switch (cat) {
        case ErrorCategory::config: return "config";
        case ErrorCategory::input: return "input";
        case ErrorCategory::training: return "training";
        case ErrorCategory::attack: return "attack";
        case ErrorCategory::numeric: return "numeric";
        case ErrorCategory::geometry: return "geometry";
    }
    return "unknown";
}

}  // namespace advsamp
