#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace loadmask {

using Rng = std::mt19937_64;

// Stream names used across the pipeline. One master seed fans out to these.
namespace streams {
inline constexpr std::string_view kEnvNoise = "env-noise";
inline constexpr std::string_view kAgentInit = "agent-init";
inline constexpr std::string_view kAgentExplore = "agent-explore";
inline constexpr std::string_view kAgentReplay = "agent-replay";
inline constexpr std::string_view kNilmInit = "nilm-init";
inline constexpr std::string_view kNilmBatch = "nilm-batch";
inline constexpr std::string_view kSynth = "synth";
}  // namespace streams

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

/// Independent generator for `stream` derived from `master_seed`.
Rng make_stream(std::uint64_t master_seed, std::string_view stream);

}  // namespace loadmask
