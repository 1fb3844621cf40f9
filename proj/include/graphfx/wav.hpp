#pragma once

#include <string>

#include "graphfx/audio_buffer.hpp"

namespace graphfx {

// Writes IEEE float32 stereo at 44.1 kHz.
void write_wav(const std::string& path, const AudioBuffer& audio);
std::string encode_wav(const AudioBuffer& audio);

// Reads PCM 16/24/32-bit or float32/64 WAV at 44.1 kHz. Mono is duplicated
// to both channels. Throws ParseError on unsupported or corrupt files.
AudioBuffer read_wav(const std::string& path);
AudioBuffer decode_wav(std::string_view bytes);

}  // namespace graphfx
