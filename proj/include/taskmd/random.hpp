#pragma once

#include <cmath>
#include <cstdint>

#include "taskmd/vec3.hpp"

namespace taskmd {

// Stateless counter-based random numbers. Every draw is a pure function of
// (seed, context, step, id, lane), so the value a particle receives does not
// depend on evaluation order or thread count, and a run can be replayed from
// the seed alone. The mixer is the splitmix64 finalizer applied along an
// xor-chain of the keys.
enum class RngContext : std::uint64_t {
  kThermostat = 1,
  kVelocityInit = 2,
  kPlacement = 3,
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t ctx,
                                  std::uint64_t step, std::uint64_t id,
                                  std::uint64_t lane) {
  std::uint64_t h = mix64(seed ^ 0x243f6a8885a308d3ull);
  h = mix64(h ^ ctx);
  h = mix64(h ^ step);
  h = mix64(h ^ id);
  h = mix64(h ^ lane);
  return h;
}

// Uniform in (0, 1]: safe as the log argument in Box-Muller.
inline double to_unit_open(std::uint64_t bits) {
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

// Uniform in [0, 1).
inline double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace detail

inline double counter_uniform(std::uint64_t seed, RngContext ctx,
                              std::uint64_t step, std::uint64_t id,
                              std::uint64_t lane) {
  return detail::to_unit(detail::counter_hash(
      seed, static_cast<std::uint64_t>(ctx), step, id, lane));
}

inline Vec3 counter_uniform3(std::uint64_t seed, RngContext ctx,
                             std::uint64_t step, std::uint64_t id) {
  return {counter_uniform(seed, ctx, step, id, 0),
          counter_uniform(seed, ctx, step, id, 1),
          counter_uniform(seed, ctx, step, id, 2)};
}

// Three independent standard normal draws for one (step, id) key, via two
// Box-Muller pairs over lanes 0..3 (the fourth deviate is discarded).
inline Vec3 counter_normal3(std::uint64_t seed, RngContext ctx,
                            std::uint64_t step, std::uint64_t id) {
  const auto c = static_cast<std::uint64_t>(ctx);
  const double u0 = detail::to_unit_open(detail::counter_hash(seed, c, step, id, 0));
  const double u1 = detail::to_unit(detail::counter_hash(seed, c, step, id, 1));
  const double u2 = detail::to_unit_open(detail::counter_hash(seed, c, step, id, 2));
  const double u3 = detail::to_unit(detail::counter_hash(seed, c, step, id, 3));
  constexpr double two_pi = 6.283185307179586476925286766559;
  const double r0 = std::sqrt(-2.0 * std::log(u0));
  const double r1 = std::sqrt(-2.0 * std::log(u2));
  return {r0 * std::cos(two_pi * u1), r0 * std::sin(two_pi * u1),
          r1 * std::cos(two_pi * u3)};
}

}  // namespace taskmd
