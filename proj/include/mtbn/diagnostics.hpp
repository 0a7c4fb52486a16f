#pragma once

#include <string>
#include <vector>

namespace mtbn {

enum class Severity { error, warning };

struct Diagnostic {
    Severity severity = Severity::error;
    std::string code;
    std::string message;

    bool operator==(const Diagnostic&) const = default;
};

using ValidationReport = std::vector<Diagnostic>;

inline bool has_errors(const ValidationReport& report) {
    for (const auto& d : report)
        if (d.severity == Severity::error) return true;
    return false;
}

inline Diagnostic error(std::string code, std::string message) {
    return {Severity::error, std::move(code), std::move(message)};
}

inline Diagnostic warning(std::string code, std::string message) {
    return {Severity::warning, std::move(code), std::move(message)};
}

std::string format_diagnostic(const Diagnostic& d);

}  // namespace mtbn
