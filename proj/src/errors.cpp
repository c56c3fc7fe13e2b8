#include "relepr/errors.hpp"

#include <iostream>
#include <mutex>

namespace relepr {
namespace {

std::mutex sink_mutex;

WarningSink& sink_slot()
{
    static WarningSink sink = [](std::string_view msg) { std::cerr << "warning: " << msg << '\n'; };
    return sink;
}

}  // namespace

WarningSink set_warning_sink(WarningSink sink)
{
    std::lock_guard lock(sink_mutex);
    std::swap(sink_slot(), sink);
    return sink;
}

void warn(std::string_view message)
{
    std::lock_guard lock(sink_mutex);
    if (sink_slot()) sink_slot()(message);
}

}  // namespace relepr
