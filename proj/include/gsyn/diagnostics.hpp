#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace gsyn {

struct Span {
    int line = 0;
    int col_begin = 0;
    int col_end = 0;

    friend bool operator==(const Span&, const Span&) = default;
};

enum class Severity { error, warning };

struct Diagnostic {
    Severity severity = Severity::error;
    Span span;
    std::string message;
    std::string code;

    bool is_error() const { return severity == Severity::error; }
};

using Diagnostics = std::vector<Diagnostic>;

inline bool has_errors(const Diagnostics& ds) {
    for (const auto& d : ds)
        if (d.is_error()) return true;
    return false;
}

inline Diagnostic make_error(Span span, std::string code, std::string message) {
    return Diagnostic{Severity::error, span, std::move(message), std::move(code)};
}

inline Diagnostic make_warning(Span span, std::string code, std::string message) {
    return Diagnostic{Severity::warning, span, std::move(message), std::move(code)};
}

std::ostream& operator<<(std::ostream& os, const Diagnostic& d);
std::string format_diagnostics(const Diagnostics& ds, const std::string& file = {});

// A value plus the diagnostics produced while computing it. `value` is empty
// iff at least one error was reported.
template <class T>
struct Checked {
    std::optional<T> value;
    Diagnostics diagnostics;

    bool ok() const { return value.has_value(); }
    T& operator*() { return *value; }
    const T& operator*() const { return *value; }
    T* operator->() { return &*value; }
    const T* operator->() const { return &*value; }
};

}  // namespace gsyn
