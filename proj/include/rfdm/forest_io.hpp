#pragma once

#include <filesystem>

#include "rfdm/forest.hpp"

namespace rfdm::io {

/// Current version of the binary forest container.
inline constexpr std::uint32_t kForestFormatVersion = 1;

void save_forest(const Forest& forest, const std::filesystem::path& path);
Forest load_forest(const std::filesystem::path& path);

}  // namespace rfdm::io
