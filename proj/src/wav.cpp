#include "graphfx/wav.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "graphfx/errors.hpp"

namespace graphfx {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

void put_u32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
void put_u16(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xFF));
  s.push_back(static_cast<char>(v >> 8));
}

std::uint32_t get_u32(std::string_view b, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[at + i]);
  return v;
}
std::uint16_t get_u16(std::string_view b, std::size_t at) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b[at]) |
                                    (static_cast<unsigned char>(b[at + 1]) << 8));
}

}  // namespace

std::string encode_wav(const AudioBuffer& audio) {
  const auto frames = static_cast<std::uint32_t>(audio.length());
  const std::uint32_t data_bytes = frames * kChannels * 4;
  std::string s;
  s.reserve(44 + data_bytes);
  s += "RIFF";
  put_u32(s, 36 + data_bytes);
  s += "WAVEfmt ";
  put_u32(s, 16);
  put_u16(s, kFormatFloat);
  put_u16(s, kChannels);
  put_u32(s, kSampleRate);
  put_u32(s, kSampleRate * kChannels * 4);
  put_u16(s, kChannels * 4);
  put_u16(s, 32);
  s += "data";
  put_u32(s, data_bytes);
  for (std::size_t n = 0; n < audio.length(); ++n) {
    for (std::size_t c = 0; c < kChannels; ++c) {
      const float f = static_cast<float>(audio.at(c, n));
      std::uint32_t bits;
      std::memcpy(&bits, &f, 4);
      put_u32(s, bits);
    }
  }
  return s;
}

void write_wav(const std::string& path, const AudioBuffer& audio) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  const std::string bytes = encode_wav(audio);
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw Error("write to '" + path + "' failed");
}

AudioBuffer decode_wav(std::string_view b) {
  if (b.size() < 12 || b.substr(0, 4) != "RIFF" || b.substr(8, 4) != "WAVE")
    throw ParseError("not a RIFF/WAVE file");
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  std::string_view data;
  std::size_t pos = 12;
  while (pos + 8 <= b.size()) {
    const std::string_view id = b.substr(pos, 4);
    const std::uint32_t size = get_u32(b, pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > b.size()) {
      if (id == "data") {
        data = b.substr(body);  // tolerate a truncated length field
        break;
      }
      throw ParseError("chunk '" + std::string(id) + "' runs past end of file");
    }
    if (id == "fmt ") {
      if (size < 16) throw ParseError("fmt chunk too short");
      format = get_u16(b, body);
      channels = get_u16(b, body + 2);
      rate = get_u32(b, body + 4);
      bits = get_u16(b, body + 14);
      if (format == kFormatExtensible && size >= 26) format = get_u16(b, body + 24);
      have_fmt = true;
    } else if (id == "data") {
      data = b.substr(body, size);
    }
    pos = body + size + (size & 1);
  }
  if (!have_fmt) throw ParseError("missing fmt chunk");
  if (data.data() == nullptr) throw ParseError("missing data chunk");
  if (rate != kSampleRate)
    throw ParseError("sample rate " + std::to_string(rate) + " Hz, expected 44100");
  if (channels < 1 || channels > 2)
    throw ParseError(std::to_string(channels) + " channels; only mono and stereo are read");
  const bool pcm = format == kFormatPcm && (bits == 16 || bits == 24 || bits == 32);
  const bool flt = format == kFormatFloat && (bits == 32 || bits == 64);
  if (!pcm && !flt)
    throw ParseError("unsupported sample format " + std::to_string(format) + "/" +
                     std::to_string(bits) + " bit");

  const std::size_t width = bits / 8;
  const std::size_t frames = data.size() / (width * channels);
  AudioBuffer out(frames);
  for (std::size_t n = 0; n < frames; ++n) {
    for (std::size_t c = 0; c < channels; ++c) {
      const std::size_t at = (n * channels + c) * width;
      double v = 0.0;
      if (flt && bits == 32) {
        const std::uint32_t u = get_u32(data, at);
        float f;
        std::memcpy(&f, &u, 4);
        v = f;
      } else if (flt) {
        const std::uint64_t u = get_u32(data, at) | (std::uint64_t{get_u32(data, at + 4)} << 32);
        std::memcpy(&v, &u, 8);
      } else if (bits == 16) {
        v = static_cast<std::int16_t>(get_u16(data, at)) / 32768.0;
      } else if (bits == 24) {
        std::int32_t s = static_cast<unsigned char>(data[at]) |
                         (static_cast<unsigned char>(data[at + 1]) << 8) |
                         (static_cast<unsigned char>(data[at + 2]) << 16);
        if (s & 0x800000) s -= 0x1000000;
        v = s / 8388608.0;
      } else {
        v = static_cast<std::int32_t>(get_u32(data, at)) / 2147483648.0;
      }
      out.at(c, n) = v;
      if (channels == 1) out.at(1, n) = v;
    }
  }
  return out;
}

AudioBuffer read_wav(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open '" + path + "'");
  const std::string bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return decode_wav(bytes);
}

}  // namespace graphfx
