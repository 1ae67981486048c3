#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "gaitemo/skeleton.hpp"

namespace gaitemo::testing {

/// Walk of `n` frames where joint j of frame t sits at `pos(t, j)`.
inline Walk make_walk(std::size_t n, const std::function<Vec3(std::size_t, std::size_t)>& pos,
                      std::string id = "w") {
  Walk w;
  w.walk_id = std::move(id);
  w.subject_id = "s1";
  w.camera_id = "kinect1";
  for (std::size_t t = 0; t < n; ++t) {
    Frame f;
    f.frame_index = static_cast<std::int64_t>(t);
    f.timestamp = double(t) / 30.0;
    f.positions.resize(kJointCount);
    for (std::size_t j = 0; j < kJointCount; ++j) f.positions[j] = pos(t, j);
    w.frames.push_back(std::move(f));
  }
  return w;
}

/// Walk whose SpineBase z follows `z(t)`; other joints hang at fixed offsets.
inline Walk walk_with_spine_z(std::size_t n, const std::function<double(std::size_t)>& z) {
  return make_walk(n, [&](std::size_t t, std::size_t j) {
    return Vec3{0.01 * double(j), 0.9 + 0.02 * double(j), z(t) + 0.001 * double(j)};
  });
}

/// Direct O(N^2) DFT, independent of the production transform.
inline std::vector<std::complex<double>> brute_dft(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> s = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double ang = -2.0 * std::numbers::pi * double((k * t) % n) / double(n);
      s += x[t] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = s;
  }
  return out;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("gaitemo_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace gaitemo::testing
