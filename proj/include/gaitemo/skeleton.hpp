#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gaitemo/error.hpp"

namespace gaitemo {

// Kinect v2 body joints in SDK index order.
enum class JointId : std::uint8_t {
  SpineBase = 0,
  SpineMid,
  Neck,
  Head,
  ShoulderLeft,
  ElbowLeft,
  WristLeft,
  HandLeft,
  ShoulderRight,
  ElbowRight,
  WristRight,
  HandRight,
  HipLeft,
  KneeLeft,
  AnkleLeft,
  FootLeft,
  HipRight,
  KneeRight,
  AnkleRight,
  FootRight,
  SpineShoulder,
  HandTipLeft,
  ThumbLeft,
  HandTipRight,
  ThumbRight,
};

inline constexpr std::size_t kJointCount = 25;
inline constexpr double kDefaultSampleRate = 30.0;

inline constexpr std::array<std::string_view, kJointCount> kJointNames = {
    "SpineBase",     "SpineMid",   "Neck",      "Head",         "ShoulderLeft",
    "ElbowLeft",     "WristLeft",  "HandLeft",  "ShoulderRight", "ElbowRight",
    "WristRight",    "HandRight",  "HipLeft",   "KneeLeft",     "AnkleLeft",
    "FootLeft",      "HipRight",   "KneeRight", "AnkleRight",   "FootRight",
    "SpineShoulder", "HandTipLeft", "ThumbLeft", "HandTipRight", "ThumbRight",
};

inline constexpr std::size_t index_of(JointId j) noexcept { return static_cast<std::size_t>(j); }
inline constexpr std::string_view joint_name(JointId j) noexcept { return kJointNames[index_of(j)]; }

inline std::optional<JointId> parse_joint(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kJointCount; ++i)
    if (kJointNames[i] == name) return static_cast<JointId>(i);
  return std::nullopt;
}

/// Joints kept for gait analysis. SpineBase is first so that, after
/// selection, columns 0..2 hold the origin joint.
inline constexpr std::array<JointId, 14> kSignificant14 = {
    JointId::SpineBase,  JointId::Neck,       JointId::ShoulderLeft, JointId::ShoulderRight,
    JointId::ElbowLeft,  JointId::ElbowRight, JointId::WristLeft,    JointId::WristRight,
    JointId::HipLeft,    JointId::HipRight,   JointId::KneeLeft,     JointId::KneeRight,
    JointId::AnkleLeft,  JointId::AnkleRight,
};

inline constexpr std::array<JointId, kJointCount> kAll25 = [] {
  std::array<JointId, kJointCount> a{};
  for (std::size_t i = 0; i < kJointCount; ++i) a[i] = static_cast<JointId>(i);
  return a;
}();

enum class JointSet { Significant14, All25 };

inline constexpr std::span<const JointId> joints_of(JointSet s) noexcept {
  if (s == JointSet::Significant14) return kSignificant14;
  return kAll25;
}

inline constexpr std::size_t column_count(JointSet s) noexcept { return 3 * joints_of(s).size(); }

/// Column of coordinate `axis` (0=x, 1=y, 2=z) of `joint` in a matrix built
/// from joint set `s`, or nullopt when the joint is not part of the set.
inline std::optional<std::size_t> column_of(JointSet s, JointId joint, std::size_t axis) noexcept {
  auto js = joints_of(s);
  auto it = std::find(js.begin(), js.end(), joint);
  if (it == js.end() || axis > 2) return std::nullopt;
  return static_cast<std::size_t>(it - js.begin()) * 3 + axis;
}

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

struct Frame {
  std::int64_t frame_index = 0;
  double timestamp = 0.0;  // seconds
  std::vector<Vec3> positions;  // meters, camera coordinates; one per joint

  const Vec3& at(JointId j) const { return positions.at(index_of(j)); }
  friend bool operator==(const Frame&, const Frame&) = default;
};

enum class EmotionLabel { Natural, Angry, Happy };

inline constexpr std::array<EmotionLabel, 3> kAllLabels = {EmotionLabel::Natural, EmotionLabel::Angry,
                                                           EmotionLabel::Happy};

inline constexpr std::string_view to_string(EmotionLabel l) noexcept {
  switch (l) {
    case EmotionLabel::Natural: return "natural";
    case EmotionLabel::Angry: return "angry";
    case EmotionLabel::Happy: return "happy";
  }
  return "natural";
}

inline std::optional<EmotionLabel> parse_label(std::string_view s) noexcept {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (auto l : kAllLabels)
    if (to_string(l) == lower) return l;
  return std::nullopt;
}

struct Walk {
  std::string walk_id;
  std::string subject_id;
  std::string camera_id;
  EmotionLabel label = EmotionLabel::Natural;
  double sample_rate = kDefaultSampleRate;
  std::vector<Frame> frames;

  friend bool operator==(const Walk&, const Walk&) = default;
};

/// Position of a matrix in the preprocessing chain.
enum class Stage { Selected, Recentred, Filtered, Differenced };

inline constexpr std::string_view to_string(Stage s) noexcept {
  switch (s) {
    case Stage::Selected: return "Selected";
    case Stage::Recentred: return "Recentred";
    case Stage::Filtered: return "Filtered";
    case Stage::Differenced: return "Differenced";
  }
  return "Selected";
}

/// Dense row-major T x (3 * |joint set|) matrix, joint-major columns
/// [x1, y1, z1, x2, ...] in the joint set's order.
class PoseMatrix {
 public:
  PoseMatrix() = default;
  PoseMatrix(std::size_t rows, JointSet joints, Stage stage)
      : rows_(rows), cols_(column_count(joints)), joints_(joints), stage_(stage), data_(rows * cols_, 0.0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  JointSet joint_set() const noexcept { return joints_; }
  Stage stage() const noexcept { return stage_; }
  void set_stage(Stage s) noexcept { stage_ = s; }

  double& operator()(std::size_t r, std::size_t c) noexcept {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const noexcept {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

  std::vector<double> column(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
  }

  std::span<const double> data() const noexcept { return data_; }

  /// Rows [first, first + count) as a new matrix with the same stage.
  PoseMatrix slice(std::size_t first, std::size_t count) const {
    assert(first + count <= rows_);
    PoseMatrix out(count, joints_, stage_);
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(first * cols_), count * cols_, out.data_.begin());
    return out;
  }

  friend bool operator==(const PoseMatrix&, const PoseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  JointSet joints_ = JointSet::Significant14;
  Stage stage_ = Stage::Selected;
  std::vector<double> data_;
};

enum class Direction { Front, Back };

inline constexpr std::string_view to_string(Direction d) noexcept {
  return d == Direction::Front ? "front" : "back";
}

/// Straight-walk stretch of a differenced matrix. `first_frame` and
/// `last_frame` are the walk frame indices aligned to the segment's first
/// and last rows.
struct Segment {
  Direction direction = Direction::Front;
  PoseMatrix data;
  std::int64_t first_frame = 0;
  std::int64_t last_frame = 0;
};

/// Every invariant violation of `w`, in a stable order. Empty means valid.
inline std::vector<std::string> validate_walk(const Walk& w) {
  std::vector<std::string> out;
  if (w.frames.empty()) out.emplace_back("walk has no frames");
  if (!(w.sample_rate > 0.0) || !std::isfinite(w.sample_rate)) out.emplace_back("sample_rate must be positive");

  bool monotonic = true;
  bool regular = true;
  for (std::size_t i = 0; i < w.frames.size(); ++i) {
    const Frame& f = w.frames[i];
    if (f.frame_index < 0) out.push_back("frame " + std::to_string(i) + ": negative frame_index");
    if (i > 0 && f.frame_index <= w.frames[i - 1].frame_index) monotonic = false;
    if (f.positions.size() != kJointCount) {
      out.push_back("frame " + std::to_string(i) + ": expected 25 joints, got " +
                    std::to_string(f.positions.size()));
    }
    bool finite = std::isfinite(f.timestamp);
    for (const Vec3& p : f.positions)
      finite = finite && std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
    if (!finite) out.push_back("frame " + std::to_string(i) + ": non-finite value");
    if (i > 0 && w.sample_rate > 0.0 && monotonic) {
      const double expected = double(f.frame_index - w.frames[i - 1].frame_index) / w.sample_rate;
      const double actual = f.timestamp - w.frames[i - 1].timestamp;
      if (std::abs(actual - expected) > 0.5 / w.sample_rate) regular = false;
    }
  }
  if (!monotonic) out.emplace_back("frame_index not strictly increasing");
  if (!regular) out.emplace_back("warning: timestamps irregular for sample_rate");
  return out;
}

}  // namespace gaitemo
