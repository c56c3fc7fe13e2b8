#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace relepr {

/// Input outside the physical domain of an operation (superluminal speed,
/// non-unit axis, singular geometry).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Operation called with an incompatible model or configuration.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

using WarningSink = std::function<void(std::string_view)>;

/// Replaces the process-wide warning sink and returns the previous one.
/// The default sink writes "warning: <msg>" lines to stderr.
WarningSink set_warning_sink(WarningSink sink);

void warn(std::string_view message);

}  // namespace relepr
