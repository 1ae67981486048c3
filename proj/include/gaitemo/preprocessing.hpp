#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "gaitemo/error.hpp"
#include "gaitemo/skeleton.hpp"

namespace gaitemo {

enum class Heading { Front, Back, Turning };

using HeadingLabels = std::vector<Heading>;

inline constexpr std::array<double, 5> kGaussKernel5 = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};

struct PipelineConfig {
  JointSet joint_set = JointSet::Significant14;
  std::array<double, 5> filter_kernel = kGaussKernel5;
  std::size_t min_segment_frames = 40;
  std::size_t heading_smooth_window = 15;
  double min_heading_speed = 0.005;  // meters per frame

  void validate() const {
    const double sum = std::accumulate(filter_kernel.begin(), filter_kernel.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-12) throw Error(Errc::InvalidConfig, "filter kernel must sum to 1");
    if (min_segment_frames < 2) throw Error(Errc::InvalidConfig, "min_segment_frames must be >= 2");
    if (heading_smooth_window < 1 || heading_smooth_window % 2 == 0)
      throw Error(Errc::InvalidConfig, "heading_smooth_window must be odd and >= 1");
    if (!(min_heading_speed >= 0.0)) throw Error(Errc::InvalidConfig, "min_heading_speed must be >= 0");
  }
};

/// Rows lost to the 5-tap filter plus the first difference.
inline constexpr std::size_t kFilterDiffLoss = 5;
/// Offset from a differenced row to the walk frame its heading is read from.
inline constexpr std::size_t kHeadingAlignOffset = 2;

inline PoseMatrix select_significant_joints(const Walk& w, JointSet joints = JointSet::Significant14) {
  if (w.frames.empty()) throw Error(Errc::EmptyWalk, "walk '" + w.walk_id + "' has no frames");
  auto js = joints_of(joints);
  PoseMatrix out(w.frames.size(), joints, Stage::Selected);
  for (std::size_t t = 0; t < w.frames.size(); ++t) {
    auto row = out.row(t);
    for (std::size_t i = 0; i < js.size(); ++i) {
      const Vec3& p = w.frames[t].at(js[i]);
      row[3 * i] = p.x;
      row[3 * i + 1] = p.y;
      row[3 * i + 2] = p.z;
    }
  }
  return out;
}

/// Moves the origin to SpineBase (columns 0..2) in every row. Already
/// recentred input comes back unchanged.
inline PoseMatrix recenter_on_spinebase(const PoseMatrix& p) {
  if (p.stage() != Stage::Selected && p.stage() != Stage::Recentred)
    throw Error(Errc::WrongStage, "recentering expects a Selected matrix, got " + std::string(to_string(p.stage())));
  PoseMatrix out = p;
  for (std::size_t t = 0; t < out.rows(); ++t) {
    auto row = out.row(t);
    const double ox = row[0], oy = row[1], oz = row[2];
    for (std::size_t c = 3; c < row.size(); c += 3) {
      row[c] -= ox;
      row[c + 1] -= oy;
      row[c + 2] -= oz;
    }
    row[0] = row[1] = row[2] = 0.0;
  }
  out.set_stage(Stage::Recentred);
  return out;
}

/// Forward 5-tap window: out[t] = sum_k kernel[k] * in[t + k]. No padding,
/// so the result has T - 4 rows.
inline PoseMatrix gaussian_filter(const PoseMatrix& p, const std::array<double, 5>& kernel = kGaussKernel5) {
  if (p.rows() < kernel.size())
    throw Error(Errc::TooShort, "filter needs at least 5 rows, got " + std::to_string(p.rows()));
  const std::size_t n = p.rows() - (kernel.size() - 1);
  PoseMatrix out(n, p.joint_set(), Stage::Filtered);
  for (std::size_t t = 0; t < n; ++t) {
    auto dst = out.row(t);
    for (std::size_t k = 0; k < kernel.size(); ++k) {
      auto src = p.row(t + k);
      for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += kernel[k] * src[c];
    }
  }
  return out;
}

/// First difference along rows: out[t] = in[t + 1] - in[t].
inline PoseMatrix differentiate(const PoseMatrix& p) {
  if (p.rows() < 2) throw Error(Errc::TooShort, "difference needs at least 2 rows, got " + std::to_string(p.rows()));
  PoseMatrix out(p.rows() - 1, p.joint_set(), Stage::Differenced);
  for (std::size_t t = 0; t + 1 < p.rows(); ++t) {
    auto a = p.row(t);
    auto b = p.row(t + 1);
    auto dst = out.row(t);
    for (std::size_t c = 0; c < dst.size(); ++c) dst[c] = b[c] - a[c];
  }
  return out;
}

/// Labels each frame by the sign of the SpineBase z-velocity in camera
/// coordinates: moving toward the camera (z shrinking) is Front, away is
/// Back, and anything slower than `min_heading_speed` is Turning.
///
/// Velocity of frame t is z[t+1] - z[t]; the last frame repeats the previous
/// velocity. The series is smoothed with a centered moving average whose
/// window shrinks at the ends.
inline HeadingLabels detect_heading(const Walk& w, const PipelineConfig& cfg = {}) {
  if (w.frames.empty()) throw Error(Errc::EmptyWalk, "walk '" + w.walk_id + "' has no frames");
  const std::size_t n = w.frames.size();
  std::vector<double> dz(n, 0.0);
  for (std::size_t t = 0; t + 1 < n; ++t)
    dz[t] = w.frames[t + 1].at(JointId::SpineBase).z - w.frames[t].at(JointId::SpineBase).z;
  if (n >= 2) dz[n - 1] = dz[n - 2];

  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t t = 0; t < n; ++t) prefix[t + 1] = prefix[t] + dz[t];

  const std::size_t half = cfg.heading_smooth_window / 2;
  HeadingLabels out(n, Heading::Turning);
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t lo = t >= half ? t - half : 0;
    const std::size_t hi = std::min(n - 1, t + half);
    const double v = (prefix[hi + 1] - prefix[lo]) / double(hi - lo + 1);
    if (v < -cfg.min_heading_speed)
      out[t] = Heading::Front;
    else if (v > cfg.min_heading_speed)
      out[t] = Heading::Back;
  }
  return out;
}

struct SegmentedWalk {
  std::vector<Segment> front;
  std::vector<Segment> back;
};

/// Splits a differenced matrix into maximal uniform Front/Back runs of at
/// least `cfg.min_segment_frames` rows. `h` covers the original walk, so it
/// has `p.rows() + 5` entries; row t takes the label of frame t + 2.
/// Segment frame bounds are positions in the walk (0-based).
inline SegmentedWalk segment_walk(const PoseMatrix& p, const HeadingLabels& h, const PipelineConfig& cfg = {}) {
  if (p.stage() != Stage::Differenced)
    throw Error(Errc::StageMismatch, "segmentation expects a Differenced matrix, got " +
                                         std::string(to_string(p.stage())));
  if (h.size() != p.rows() + kFilterDiffLoss)
    throw Error(Errc::LabelLengthMismatch, "expected " + std::to_string(p.rows() + kFilterDiffLoss) +
                                               " heading labels, got " + std::to_string(h.size()));
  SegmentedWalk out;
  std::size_t start = 0;
  while (start < p.rows()) {
    const Heading label = h[start + kHeadingAlignOffset];
    std::size_t end = start + 1;
    while (end < p.rows() && h[end + kHeadingAlignOffset] == label) ++end;
    const std::size_t len = end - start;
    if (label != Heading::Turning && len >= cfg.min_segment_frames) {
      Segment s;
      s.direction = label == Heading::Front ? Direction::Front : Direction::Back;
      s.data = p.slice(start, len);
      s.first_frame = static_cast<std::int64_t>(start + kHeadingAlignOffset);
      s.last_frame = static_cast<std::int64_t>(end - 1 + kHeadingAlignOffset);
      (label == Heading::Front ? out.front : out.back).push_back(std::move(s));
    }
    start = end;
  }
  return out;
}

/// Full chain for one walk: select, recenter, filter, difference, then cut
/// into front/back segments using headings from the raw (camera-frame) walk.
/// Segment frame bounds are reported as the walk's own frame_index values.
inline SegmentedWalk preprocess_walk(const Walk& w, const PipelineConfig& cfg = {}) {
  cfg.validate();
  if (w.frames.empty()) throw Error(Errc::EmptyWalk, "walk '" + w.walk_id + "' has no frames");
  const std::size_t needed = cfg.min_segment_frames + kFilterDiffLoss;
  if (w.frames.size() < needed)
    throw Error(Errc::TooShort, "walk '" + w.walk_id + "' has " + std::to_string(w.frames.size()) +
                                    " frames, need at least " + std::to_string(needed));
  const HeadingLabels heading = detect_heading(w, cfg);
  PoseMatrix m = select_significant_joints(w, cfg.joint_set);
  m = recenter_on_spinebase(m);
  m = gaussian_filter(m, cfg.filter_kernel);
  m = differentiate(m);
  SegmentedWalk out = segment_walk(m, heading, cfg);
  if (out.front.empty() && out.back.empty())
    throw Error(Errc::NoSegments, "walk '" + w.walk_id + "' has no straight segment of " +
                                      std::to_string(cfg.min_segment_frames) + "+ frames");
  for (auto* side : {&out.front, &out.back}) {
    for (Segment& s : *side) {
      s.first_frame = w.frames[static_cast<std::size_t>(s.first_frame)].frame_index;
      s.last_frame = w.frames[static_cast<std::size_t>(s.last_frame)].frame_index;
    }
  }
  return out;
}

}  // namespace gaitemo
