#pragma once

#include <functional>
#include <string>

namespace indexnet {

using WarningHandler = std::function<void(const std::string&)>;

// Non-fatal diagnostics (clamped stds, empty window ranges, ...).
// Default handler writes "warning: ..." to stderr.
void warn(const std::string& message);

// Replaces the handler; returns the previous one. Pass nullptr to restore
// the default.
WarningHandler set_warning_handler(WarningHandler handler);

} // namespace indexnet
