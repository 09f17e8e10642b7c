#pragma once

#include <spdlog/spdlog.h>

namespace mshine {

// Reads MSHINE_LOG (debug|info|warn) and applies it to the default logger.
// Unset or unrecognized values leave the level at info.
void configure_logging();

}  // namespace mshine
