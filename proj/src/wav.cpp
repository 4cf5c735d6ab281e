#include "padback/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "padback/errors.hpp"

namespace padback {
namespace {

constexpr std::uint16_t kFormatPcm = 1;

void put_u16(std::vector<std::byte>& out, std::uint16_t v) {
  out.push_back(static_cast<std::byte>(v & 0xff));
  out.push_back(static_cast<std::byte>((v >> 8) & 0xff));
}

void put_u32(std::vector<std::byte>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xff));
}

void put_tag(std::vector<std::byte>& out, const char* tag) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::byte>(tag[i]));
}

class Reader {
 public:
  explicit Reader(std::span<const std::byte> bytes) : bytes_(bytes) {}

  std::size_t remaining() const { return bytes_.size() - pos_; }

  void need(std::size_t n, const char* what) const {
    if (remaining() < n) {
      throw ParseError(std::string("wav: truncated ") + what);
    }
  }
  std::uint16_t u16(const char* what) {
    need(2, what);
    const auto v = static_cast<std::uint16_t>(
        std::to_integer<unsigned>(bytes_[pos_]) |
        (std::to_integer<unsigned>(bytes_[pos_ + 1]) << 8));
    pos_ += 2;
    return v;
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= std::to_integer<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    }
    pos_ += 4;
    return v;
  }
  std::string tag(const char* what) {
    need(4, what);
    std::string t(4, '\0');
    for (int i = 0; i < 4; ++i) t[i] = static_cast<char>(bytes_[pos_ + i]);
    pos_ += 4;
    return t;
  }
  void skip(std::size_t n, const char* what) {
    need(n, what);
    pos_ += n;
  }
  std::span<const std::byte> take(std::size_t n, const char* what) {
    need(n, what);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  std::span<const std::byte> bytes_;
  std::size_t pos_ = 0;
};

std::int16_t quantize(double x) {
  const double scaled = std::round(x * 32768.0);
  return static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
}

}  // namespace

std::vector<std::byte> encode_wav(const AudioClip& clip) {
  validate_clip(clip);
  const auto data_bytes = static_cast<std::uint32_t>(clip.size() * 2);
  std::vector<std::byte> out;
  out.reserve(44 + data_bytes);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_bytes);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  put_tag(out, "data");
  put_u32(out, data_bytes);
  for (double x : clip.samples) {
    put_u16(out, static_cast<std::uint16_t>(quantize(x)));
  }
  return out;
}

AudioClip decode_wav(std::span<const std::byte> bytes) {
  Reader in(bytes);
  if (in.tag("RIFF header") != "RIFF") throw ParseError("wav: missing RIFF tag");
  in.u32("RIFF size");
  if (in.tag("WAVE tag") != "WAVE") throw ParseError("wav: missing WAVE tag");

  bool have_fmt = false;
  int sample_rate = 0;
  while (true) {
    const std::string id = in.tag("chunk header");
    const std::uint32_t size = in.u32("chunk size");
    if (id == "fmt ") {
      if (size < 16) throw ParseError("wav: fmt chunk too small");
      const std::uint16_t format = in.u16("fmt chunk");
      const std::uint16_t channels = in.u16("fmt chunk");
      const std::uint32_t rate = in.u32("fmt chunk");
      in.u32("fmt chunk");  // byte rate
      in.u16("fmt chunk");  // block align
      const std::uint16_t bits = in.u16("fmt chunk");
      in.skip(size - 16 + (size & 1), "fmt chunk");
      if (format != kFormatPcm) {
        throw ParseError("wav: unsupported compression (format tag " +
                         std::to_string(format) + ", expected PCM 1)");
      }
      if (channels != 1) {
        throw ParseError("wav: expected mono, got " + std::to_string(channels) +
                         " channels");
      }
      if (bits != 16) {
        throw ParseError("wav: expected 16 bits per sample, got " +
                         std::to_string(bits));
      }
      if (rate == 0) throw ParseError("wav: zero sample rate");
      sample_rate = static_cast<int>(rate);
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw ParseError("wav: data chunk before fmt chunk");
      if (size % 2 != 0) throw ParseError("wav: odd data chunk size");
      auto payload = in.take(size, "data chunk");
      AudioClip clip;
      clip.sample_rate = sample_rate;
      clip.samples.resize(size / 2);
      for (std::size_t i = 0; i < clip.samples.size(); ++i) {
        const auto lo = std::to_integer<std::uint16_t>(payload[2 * i]);
        const auto hi = std::to_integer<std::uint16_t>(payload[2 * i + 1]);
        const auto s = static_cast<std::int16_t>(static_cast<std::uint16_t>(lo | (hi << 8)));
        clip.samples[i] = static_cast<double>(s) / 32768.0;
      }
      if (clip.empty()) throw ParseError("wav: empty data chunk");
      return clip;
    } else {
      in.skip(size + (size & 1), "chunk body");
    }
  }
}

AudioClip read_wav(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw ParseError("wav: cannot open " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(file)),
                        std::istreambuf_iterator<char>());
  try {
    return decode_wav(std::as_bytes(std::span(raw.data(), raw.size())));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_wav(const std::filesystem::path& path, const AudioClip& clip) {
  const auto bytes = encode_wav(clip);
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("wav: cannot write " + path.string());
  file.write(reinterpret_cast<const char*>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
  if (!file) throw std::runtime_error("wav: write failed for " + path.string());
}

}  // namespace padback
