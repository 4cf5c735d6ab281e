#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "padback/audio.hpp"

namespace padback {

// Mono 16-bit PCM RIFF/WAVE only. Samples are stored as round(x * 32768)
// clamped to [-32768, 32767] and read back as s / 32768.

std::vector<std::byte> encode_wav(const AudioClip& clip);
AudioClip decode_wav(std::span<const std::byte> bytes);

AudioClip read_wav(const std::filesystem::path& path);
void write_wav(const std::filesystem::path& path, const AudioClip& clip);

}  // namespace padback
