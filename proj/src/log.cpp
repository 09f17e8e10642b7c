#include "mshine/log.hpp"

#include <cstdlib>
#include <string_view>

#include <spdlog/sinks/stdout_color_sinks.h>

namespace mshine {

void configure_logging() {
  auto logger = spdlog::get("mshine");
  if (!logger) logger = spdlog::stderr_color_mt("mshine");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("MSHINE_LOG")) {
    std::string_view level{env};
    if (level == "debug") spdlog::set_level(spdlog::level::debug);
    else if (level == "warn") spdlog::set_level(spdlog::level::warn);
  }
}

}  // namespace mshine
