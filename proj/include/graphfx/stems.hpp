#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "graphfx/audio_buffer.hpp"
#include "graphfx/registry.hpp"

namespace graphfx {

// Procedural dry recordings used when no stems are supplied. Names are
// source type names: "in" is a sung phrase, the rest are drum tracks.
AudioBuffer make_stem(std::string_view name, std::uint64_t seed,
                      std::size_t length = kDefaultSegmentLength);

// Every source of the task. With `drop_tracks`, up to two of tom, ride and
// crash come back silent, as in multitrack sessions that leave tracks empty.
std::map<std::string, AudioBuffer> make_stems(Task task, std::uint64_t seed,
                                              std::size_t length = kDefaultSegmentLength,
                                              bool drop_tracks = true);

}  // namespace graphfx
