#pragma once

#include "ptrack/signal.hpp"

#include <filesystem>

namespace ptrack {

enum class WavFormat { pcm16, float32 };

/// Writes a mono RIFF/WAVE file. Only the real channel is written. PCM16
/// samples are clipped to [-1, 1].
void write_wav(const std::filesystem::path& path, const SignalBuffer& signal,
               WavFormat format = WavFormat::float32);

/// Reads mono 16-bit PCM or 32-bit IEEE float WAV files.
SignalBuffer read_wav(const std::filesystem::path& path);

/// Raw little-endian float64 samples at `path` plus `path` + ".json" holding
/// {"fs": ..., "n_samples": ...}.
void write_raw_f64(const std::filesystem::path& path, const SignalBuffer& signal);
SignalBuffer read_raw_f64(const std::filesystem::path& path);

} // namespace ptrack
