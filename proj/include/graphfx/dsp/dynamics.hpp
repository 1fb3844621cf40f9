#pragma once

namespace graphfx::dsp {

enum class DynamicsMode { compress, expand, gate };

// Static gain (dB, <= 0) of the soft-knee gain computer for an input level.
// The gate is a downward expander with the ratio squared.
double static_gain_db(DynamicsMode mode, double level_db, double threshold_db, double ratio,
                      double knee_db);

}  // namespace graphfx::dsp
