#pragma once

#include <filesystem>
#include <string>

#include "padback/model.hpp"

namespace padback {

// JSON container, see README "Checkpoint format". Doubles are written with
// round-trip precision, so save -> load is bit-exact.
inline constexpr const char* kCheckpointFormat = "padback-checkpoint";
inline constexpr int kCheckpointVersion = 1;

std::string serialize_checkpoint(const Classifier& model);
Classifier deserialize_checkpoint(const std::string& text);

void save_checkpoint(const Classifier& model, const std::filesystem::path& path);
Classifier load_checkpoint(const std::filesystem::path& path);

}  // namespace padback
