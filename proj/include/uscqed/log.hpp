#pragma once

#include <functional>
#include <string>
#include <vector>

namespace uscqed {

using WarningHandler = std::function<void(const std::string&)>;

// Default handler prints "warning: <msg>" to stderr. Thread-safe.
void warn(const std::string& message);

// Installs a new handler and returns the previous one. Passing an empty
// function restores the stderr default.
WarningHandler set_warning_handler(WarningHandler handler);

// Captures warnings for the lifetime of the object (used by tests and the CLI).
class ScopedWarningCapture {
public:
    ScopedWarningCapture();
    ~ScopedWarningCapture();
    ScopedWarningCapture(const ScopedWarningCapture&) = delete;
    ScopedWarningCapture& operator=(const ScopedWarningCapture&) = delete;

    const std::vector<std::string>& messages() const { return messages_; }
    bool contains(const std::string& fragment) const;

private:
    std::vector<std::string> messages_;
    WarningHandler previous_;
};

}  // namespace uscqed
