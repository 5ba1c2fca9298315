#pragma once

#include <filesystem>

#include "loadmask/nilm/seq2point.hpp"

namespace loadmask::nilm {

void save_model(const std::filesystem::path& path, const Seq2PointModel& model);

/// Throws ValidationError on an unreadable, foreign or wrong-version file.
Seq2PointModel load_model(const std::filesystem::path& path);

}  // namespace loadmask::nilm
