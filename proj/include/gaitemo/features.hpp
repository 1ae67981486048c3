#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gaitemo/error.hpp"
#include "gaitemo/skeleton.hpp"

namespace gaitemo {

using Complex = std::complex<double>;

namespace detail {

inline bool is_pow2(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 transform; n must be a power of two.
inline void fft_pow2(std::vector<Complex>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    for (std::size_t k = 0; k < half; ++k) {
      // Twiddles computed directly rather than by recurrence to keep error flat.
      const double ang = sign * 2.0 * std::numbers::pi * double(k) / double(len);
      const Complex w(std::cos(ang), std::sin(ang));
      for (std::size_t i = 0; i < n; i += len) {
        const Complex u = a[i + k];
        const Complex v = a[i + k + half] * w;
        a[i + k] = u + v;
        a[i + k + half] = u - v;
      }
    }
  }
  if (inverse)
    for (auto& x : a) x /= double(n);
}

// Chirp-z (Bluestein) transform for arbitrary n.
inline std::vector<Complex> fft_bluestein(std::span<const Complex> x) {
  const std::size_t n = x.size();
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;

  std::vector<Complex> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the angle argument small for large k.
    const std::size_t k2 = (k * k) % (2 * n);
    const double ang = std::numbers::pi * double(k2) / double(n);
    chirp[k] = Complex(std::cos(ang), -std::sin(ang));
  }
  std::vector<Complex> a(m), b(m);
  for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * chirp[k];
  b[0] = std::conj(chirp[0]);
  for (std::size_t k = 1; k < n; ++k) b[k] = b[m - k] = std::conj(chirp[k]);

  fft_pow2(a, false);
  fft_pow2(b, false);
  for (std::size_t i = 0; i < m; ++i) a[i] *= b[i];
  fft_pow2(a, true);

  std::vector<Complex> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * chirp[k];
  return out;
}

}  // namespace detail

/// X[k] = sum_n x[n] exp(-2 pi i k n / N) for k in [0, N).
inline std::vector<Complex> dft(std::span<const double> x) {
  if (x.empty()) throw Error(Errc::EmptyInput, "cannot transform an empty sequence");
  std::vector<Complex> c(x.begin(), x.end());
  if (detail::is_pow2(c.size())) {
    detail::fft_pow2(c, false);
    return c;
  }
  return detail::fft_bluestein(c);
}

struct MainComponent {
  double frequency = 0.0;  // Hz
  double phase = 0.0;      // radians, (-pi, pi]
};

/// Magnitudes below this fraction of the signal's L1 norm (and below the
/// absolute value when the norm is under 1) count as no oscillation.
inline constexpr double kSilentBinThreshold = 1e-12;

/// Largest-magnitude bin among 1..N/2 (DC excluded, lowest bin wins ties),
/// reported as frequency in Hz and the bin's phase.
inline MainComponent main_frequency_phase(std::span<const double> x, double sample_rate) {
  if (x.size() < 2) throw Error(Errc::TooShort, "need at least 2 samples, got " + std::to_string(x.size()));
  const auto spectrum = dft(x);
  const std::size_t n = x.size();
  std::size_t best = 1;
  double best_mag = std::abs(spectrum[1]);
  for (std::size_t k = 2; k <= n / 2; ++k) {
    const double mag = std::abs(spectrum[k]);
    if (mag > best_mag) {
      best = k;
      best_mag = mag;
    }
  }
  double l1 = 0.0;
  for (double v : x) l1 += std::abs(v);
  if (best_mag < kSilentBinThreshold * std::max(1.0, l1)) return {};

  double phase = std::arg(spectrum[best]);
  if (phase <= -std::numbers::pi) phase = std::numbers::pi;
  return {double(best) * sample_rate / double(n), phase};
}

/// [f_1..f_C, phi_1..phi_C] over the C columns of a segment.
inline std::vector<double> segment_features(const Segment& s, double sample_rate) {
  const PoseMatrix& m = s.data;
  const std::size_t cols = m.cols();
  std::vector<double> out(2 * cols);
  for (std::size_t c = 0; c < cols; ++c) {
    const auto col = m.column(c);
    const MainComponent mc = main_frequency_phase(col, sample_rate);
    out[c] = mc.frequency;
    out[cols + c] = mc.phase;
  }
  return out;
}

enum class PhaseAveraging { Arithmetic, Circular };

/// Mean of segment_features over one direction's segments.
inline std::vector<double> aggregate_direction(std::span<const Segment> segs, double sample_rate,
                                               PhaseAveraging phases = PhaseAveraging::Arithmetic) {
  if (segs.empty()) throw Error(Errc::EmptyDirection, "no segments to aggregate");
  const std::size_t cols = segs.front().data.cols();
  std::vector<double> sum(2 * cols, 0.0);
  std::vector<double> sin_sum(cols, 0.0), cos_sum(cols, 0.0);
  for (const Segment& s : segs) {
    if (s.data.cols() != cols) throw Error(Errc::WidthMismatch, "segments disagree on column count");
    const auto f = segment_features(s, sample_rate);
    for (std::size_t i = 0; i < f.size(); ++i) sum[i] += f[i];
    for (std::size_t c = 0; c < cols; ++c) {
      sin_sum[c] += std::sin(f[cols + c]);
      cos_sum[c] += std::cos(f[cols + c]);
    }
  }
  const double n = double(segs.size());
  for (double& v : sum) v /= n;
  if (phases == PhaseAveraging::Circular) {
    for (std::size_t c = 0; c < cols; ++c) {
      double a = std::atan2(sin_sum[c], cos_sum[c]);
      if (a <= -std::numbers::pi) a = std::numbers::pi;
      sum[cols + c] = a;
    }
  }
  return sum;
}

enum class MissingSidePolicy { Reject, ZeroFill };

struct FeatureVector {
  std::vector<double> values;  // [front f, front phi, back f, back phi]
  bool front_zero_filled = false;
  bool back_zero_filled = false;
};

inline constexpr std::size_t feature_width(JointSet s) noexcept { return 4 * column_count(s); }

/// Concatenated front and back descriptors of one walk.
inline FeatureVector walk_features(std::span<const Segment> front, std::span<const Segment> back, double sample_rate,
                                   MissingSidePolicy policy = MissingSidePolicy::Reject,
                                   PhaseAveraging phases = PhaseAveraging::Arithmetic) {
  if (front.empty() && back.empty()) throw Error(Errc::BothSidesEmpty, "walk has neither front nor back segments");
  if (policy == MissingSidePolicy::Reject && (front.empty() || back.empty()))
    throw Error(Errc::MissingSide, std::string("walk has no ") + (front.empty() ? "front" : "back") + " segments");

  const std::size_t half = 2 * (front.empty() ? back : front).front().data.cols();
  FeatureVector out;
  out.values.reserve(2 * half);
  auto append = [&](std::span<const Segment> side, bool& zero_filled) {
    if (side.empty()) {
      out.values.insert(out.values.end(), half, 0.0);
      zero_filled = true;
      return;
    }
    const auto v = aggregate_direction(side, sample_rate, phases);
    if (v.size() != half) throw Error(Errc::WidthMismatch, "front and back segments disagree on column count");
    out.values.insert(out.values.end(), v.begin(), v.end());
  };
  append(front, out.front_zero_filled);
  append(back, out.back_zero_filled);
  return out;
}

}  // namespace gaitemo
