#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "gaitemo/error.hpp"
#include "gaitemo/ingestion.hpp"
#include "gaitemo/skeleton.hpp"
#include "json.hpp"

namespace gaitemo {

enum class PathDirection { TowardCamera, AwayFromCamera };

struct PathLeg {
  PathDirection direction = PathDirection::TowardCamera;
  double seconds = 6.0;
};

/// Sinusoidal stick-figure walker. Limbs swing at `stride_freq` along the
/// walking direction; arms swing in antiphase to the same-side leg.
struct GaitParams {
  double stride_freq = 1.8;         // Hz
  double stride_freq_std = 0.0;     // Hz, per-walk variation drawn from the seed
  double arm_amp = 0.15;            // m
  double leg_amp = 0.25;            // m
  double torso_sway = 0.02;         // m
  double walk_speed = 1.0;          // m/s
  double phase_jitter = 0.0;        // rad, per-frame std
  double noise_std = 0.0;           // m, all joints
  double extremity_noise_std = 0.0; // m, extra on head, hands, hand tips, thumbs, feet
  double duration = 13.0;           // s
  std::vector<PathLeg> path = {{PathDirection::TowardCamera, 6.0}, {PathDirection::AwayFromCamera, 6.0}};
  std::uint64_t seed = 0;

  void validate() const {
    auto bad = [](const std::string& what) { throw Error(Errc::InvalidParams, what); };
    if (!(stride_freq > 0.5 && stride_freq < 4.0)) bad("stride_freq must lie in (0.5, 4) Hz");
    if (!(stride_freq_std >= 0.0)) bad("stride_freq_std must be >= 0");
    if (!(arm_amp >= 0.0 && leg_amp >= 0.0 && torso_sway >= 0.0)) bad("amplitudes must be >= 0");
    if (!(walk_speed >= 0.0)) bad("walk_speed must be >= 0");
    if (!(phase_jitter >= 0.0 && noise_std >= 0.0 && extremity_noise_std >= 0.0)) bad("noise levels must be >= 0");
    if (!(duration > 0.0) || !std::isfinite(duration)) bad("duration must be > 0");
    for (const auto& leg : path)
      if (!(leg.seconds > 0.0)) bad("path legs must last > 0 s");
  }
};

inline constexpr double kSynthRate = 30.0;
inline constexpr double kTurnSeconds = 1.0;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Portable draws; the std distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Standing pose relative to SpineBase as (left, up, forward) in meters.
struct BodyOffset {
  double left, up, forward;
};

inline constexpr std::array<BodyOffset, kJointCount> kStandingPose = {{
    {0.00, 0.00, 0.00},    // SpineBase
    {0.00, 0.30, 0.00},    // SpineMid
    {0.00, 0.60, 0.00},    // Neck
    {0.00, 0.75, 0.02},    // Head
    {0.18, 0.52, 0.00},    // ShoulderLeft
    {0.20, 0.25, 0.00},    // ElbowLeft
    {0.21, 0.02, 0.02},    // WristLeft
    {0.21, -0.05, 0.02},   // HandLeft
    {-0.18, 0.52, 0.00},   // ShoulderRight
    {-0.20, 0.25, 0.00},   // ElbowRight
    {-0.21, 0.02, 0.02},   // WristRight
    {-0.21, -0.05, 0.02},  // HandRight
    {0.08, -0.02, 0.00},   // HipLeft
    {0.09, -0.43, 0.00},   // KneeLeft
    {0.09, -0.83, 0.00},   // AnkleLeft
    {0.09, -0.88, 0.08},   // FootLeft
    {-0.08, -0.02, 0.00},  // HipRight
    {-0.09, -0.43, 0.00},  // KneeRight
    {-0.09, -0.83, 0.00},  // AnkleRight
    {-0.09, -0.88, 0.08},  // FootRight
    {0.00, 0.55, 0.00},    // SpineShoulder
    {0.21, -0.12, 0.02},   // HandTipLeft
    {0.19, -0.07, 0.05},   // ThumbLeft
    {-0.21, -0.12, 0.02},  // HandTipRight
    {-0.19, -0.07, 0.05},  // ThumbRight
}};

inline bool is_extremity(JointId j) noexcept {
  switch (j) {
    case JointId::Head:
    case JointId::HandLeft:
    case JointId::HandRight:
    case JointId::HandTipLeft:
    case JointId::HandTipRight:
    case JointId::ThumbLeft:
    case JointId::ThumbRight:
    case JointId::FootLeft:
    case JointId::FootRight:
      return true;
    default:
      return false;
  }
}

struct PathState {
  double z_velocity;  // m/s in camera coordinates
  double facing;      // 0 = facing the camera, pi = facing away
};

// Where the walker is on its path at time t: legs separated by turn gaps in
// which the body rotates in place, then standing still once the path ends.
inline PathState path_state(const std::vector<PathLeg>& path, double speed, double t) {
  auto facing_of = [](PathDirection d) { return d == PathDirection::TowardCamera ? 0.0 : std::numbers::pi; };
  double start = 0.0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const double f = facing_of(path[i].direction);
    if (t < start + path[i].seconds) {
      return {path[i].direction == PathDirection::TowardCamera ? -speed : speed, f};
    }
    start += path[i].seconds;
    if (i + 1 < path.size()) {
      if (t < start + kTurnSeconds) {
        const double next = facing_of(path[i + 1].direction);
        const double u = (t - start) / kTurnSeconds;
        return {0.0, f + (next - f) * u};
      }
      start += kTurnSeconds;
    } else {
      return {0.0, f};
    }
  }
  return {0.0, 0.0};
}

}  // namespace detail

/// Deterministic walk at 30 Hz. SpineBase starts far enough from the camera
/// that every toward-camera leg keeps z positive.
inline Walk generate_walk(const GaitParams& p, EmotionLabel label) {
  p.validate();
  detail::Rng rng(p.seed);
  const double freq = std::clamp(p.stride_freq + p.stride_freq_std * rng.normal(), 0.51, 3.99);
  const double phase0 = 2.0 * std::numbers::pi * rng.uniform();

  std::vector<PathLeg> path = p.path;
  if (path.empty()) path.push_back({PathDirection::TowardCamera, p.duration});
  double toward = 0.0;
  for (const auto& leg : path)
    if (leg.direction == PathDirection::TowardCamera) toward += leg.seconds * p.walk_speed;

  const auto frames = static_cast<std::size_t>(std::llround(p.duration * kSynthRate));
  Walk w;
  w.label = label;
  w.sample_rate = kSynthRate;
  w.frames.reserve(frames);

  const double dt = 1.0 / kSynthRate;
  double z = 1.0 + toward;
  double jitter = 0.0;
  for (std::size_t t = 0; t < frames; ++t) {
    const double time = double(t) * dt;
    const auto state = detail::path_state(path, p.walk_speed, time);
    if (p.phase_jitter > 0.0) jitter = p.phase_jitter * rng.normal();
    const double phi = 2.0 * std::numbers::pi * freq * time + phase0 + jitter;
    const double s = std::sin(phi);
    const double c = std::cos(phi);

    // Body axes in camera coordinates for the current facing.
    const double fx = std::sin(state.facing), fz = -std::cos(state.facing);
    const double lx = -std::cos(state.facing), lz = -std::sin(state.facing);
    const Vec3 base{0.0, 0.95, z};

    Frame f;
    f.frame_index = static_cast<std::int64_t>(t);
    f.timestamp = time;
    f.positions.resize(kJointCount);
    for (std::size_t j = 0; j < kJointCount; ++j) {
      const auto id = static_cast<JointId>(j);
      detail::BodyOffset o = detail::kStandingPose[j];
      switch (id) {
        case JointId::KneeLeft: o.forward += 0.5 * p.leg_amp * s; o.up += 0.2 * p.leg_amp * c; break;
        case JointId::KneeRight: o.forward -= 0.5 * p.leg_amp * s; o.up -= 0.2 * p.leg_amp * c; break;
        case JointId::AnkleLeft:
        case JointId::FootLeft: o.forward += p.leg_amp * s; o.up += 0.2 * p.leg_amp * c; break;
        case JointId::AnkleRight:
        case JointId::FootRight: o.forward -= p.leg_amp * s; o.up -= 0.2 * p.leg_amp * c; break;
        case JointId::ElbowLeft: o.forward -= 0.5 * p.arm_amp * s; break;
        case JointId::ElbowRight: o.forward += 0.5 * p.arm_amp * s; break;
        case JointId::WristLeft:
        case JointId::HandLeft:
        case JointId::HandTipLeft:
        case JointId::ThumbLeft: o.forward -= p.arm_amp * s; break;
        case JointId::WristRight:
        case JointId::HandRight:
        case JointId::HandTipRight:
        case JointId::ThumbRight: o.forward += p.arm_amp * s; break;
        case JointId::SpineMid: o.left += 0.5 * p.torso_sway * s; break;
        case JointId::SpineShoulder:
        case JointId::Neck:
        case JointId::Head:
        case JointId::ShoulderLeft:
        case JointId::ShoulderRight: o.left += p.torso_sway * s; break;
        default: break;
      }
      Vec3 pos{base.x + o.left * lx + o.forward * fx, base.y + o.up, base.z + o.left * lz + o.forward * fz};
      double sigma = p.noise_std;
      if (p.extremity_noise_std > 0.0 && detail::is_extremity(id))
        sigma = std::hypot(p.noise_std, p.extremity_noise_std);
      if (sigma > 0.0) {
        pos.x += sigma * rng.normal();
        pos.y += sigma * rng.normal();
        pos.z += sigma * rng.normal();
      }
      f.positions[j] = pos;
    }
    w.frames.push_back(std::move(f));
    z += state.z_velocity * dt;
  }
  return w;
}

struct ClassParams {
  EmotionLabel label = EmotionLabel::Natural;
  GaitParams gait;
};

/// Named emotion proxies: angry walks faster with bigger arm swing, happy
/// sits in between, natural is the baseline.
inline GaitParams preset(EmotionLabel l) {
  GaitParams p;
  p.noise_std = 0.005;
  p.phase_jitter = 0.02;
  switch (l) {
    case EmotionLabel::Natural: p.stride_freq = 1.7; p.arm_amp = 0.15; p.leg_amp = 0.25; break;
    case EmotionLabel::Angry: p.stride_freq = 2.2; p.arm_amp = 0.30; p.leg_amp = 0.30; break;
    case EmotionLabel::Happy: p.stride_freq = 2.0; p.arm_amp = 0.22; p.leg_amp = 0.28; break;
  }
  return p;
}

/// Seed for walk `index` of a corpus.
inline std::uint64_t walk_seed(std::uint64_t corpus_seed, std::size_t index) noexcept {
  return detail::splitmix64(corpus_seed ^ detail::splitmix64(index));
}

/// In-memory corpus: class A walks then class B walks, n each. Walk i of
/// either class shares subject "s<i>".
inline std::vector<Walk> generate_corpus_walks(const ClassParams& a, const ClassParams& b, std::size_t n_per_class,
                                               std::uint64_t seed, const std::string& camera_id = "kinect1") {
  if (n_per_class < 2) throw Error(Errc::InvalidParams, "n_per_class must be >= 2");
  if (a.label == b.label) throw Error(Errc::InvalidParams, "the two classes need different labels");
  a.gait.validate();
  b.gait.validate();
  std::vector<Walk> out;
  out.reserve(2 * n_per_class);
  std::size_t index = 0;
  for (const ClassParams* cp : {&a, &b}) {
    for (std::size_t i = 0; i < n_per_class; ++i, ++index) {
      GaitParams g = cp->gait;
      g.seed = walk_seed(seed, index);
      Walk w = generate_walk(g, cp->label);
      char id[32];
      std::snprintf(id, sizeof id, "w%04zu", index);
      w.walk_id = id;
      w.subject_id = "s" + std::to_string(i);
      w.camera_id = camera_id;
      out.push_back(std::move(w));
    }
  }
  return out;
}

/// Writes `walks/<walk_id>.csv` for each walk and `manifest.csv` under `dir`.
inline Manifest write_corpus(const fs::path& dir, const std::vector<Walk>& walks) {
  std::error_code ec;
  fs::create_directories(dir / "walks", ec);
  if (ec) throw Error(Errc::Io, "cannot create '" + (dir / "walks").string() + "': " + ec.message());
  Manifest m;
  m.base_dir = dir;
  for (const Walk& w : walks) {
    const std::string rel = "walks/" + w.walk_id + ".csv";
    write_frames_csv(dir / rel, w);
    m.entries.push_back({w.walk_id, rel, w.subject_id, w.camera_id, w.label});
  }
  write_manifest(dir / "manifest.csv", m);
  return m;
}

inline Manifest generate_corpus(const ClassParams& a, const ClassParams& b, std::size_t n_per_class,
                                std::uint64_t seed, const fs::path& dir, const std::string& camera_id = "kinect1") {
  return write_corpus(dir, generate_corpus_walks(a, b, n_per_class, seed, camera_id));
}

// ---------------------------------------------------------------------------
// Params file (JSON)
//
//   {"n_per_class": 10, "seed": 42, "camera_id": "kinect1",
//    "class_a": {"label": "natural", "preset": true, "stride_freq": 1.7, ...},
//    "class_b": {"label": "angry", "path": [["toward", 6], ["away", 6]]}}

struct CorpusParams {
  ClassParams class_a;
  ClassParams class_b;
  std::size_t n_per_class = 10;
  std::uint64_t seed = 0;
  std::string camera_id = "kinect1";
};

namespace detail {

inline ClassParams class_from_json(const nlohmann::json& j, const char* which) {
  if (!j.is_object()) throw Error(Errc::InvalidParams, std::string(which) + " must be an object");
  ClassParams cp;
  const auto label = parse_label(j.value("label", std::string{}));
  if (!label) throw Error(Errc::InvalidParams, std::string(which) + ".label is missing or unknown");
  cp.label = *label;
  cp.gait = j.value("preset", true) ? preset(cp.label) : GaitParams{};
  GaitParams& g = cp.gait;
  g.stride_freq = j.value("stride_freq", g.stride_freq);
  g.stride_freq_std = j.value("stride_freq_std", g.stride_freq_std);
  g.arm_amp = j.value("arm_amp", g.arm_amp);
  g.leg_amp = j.value("leg_amp", g.leg_amp);
  g.torso_sway = j.value("torso_sway", g.torso_sway);
  g.walk_speed = j.value("walk_speed", g.walk_speed);
  g.phase_jitter = j.value("phase_jitter", g.phase_jitter);
  g.noise_std = j.value("noise_std", g.noise_std);
  g.extremity_noise_std = j.value("extremity_noise_std", g.extremity_noise_std);
  g.duration = j.value("duration", g.duration);
  if (j.contains("path")) {
    g.path.clear();
    for (const auto& leg : j.at("path")) {
      if (!leg.is_array() || leg.size() != 2) throw Error(Errc::InvalidParams, "path legs are [direction, seconds]");
      const auto dir = leg[0].get<std::string>();
      if (dir != "toward" && dir != "away") throw Error(Errc::InvalidParams, "path direction must be toward|away");
      g.path.push_back({dir == "toward" ? PathDirection::TowardCamera : PathDirection::AwayFromCamera,
                        leg[1].get<double>()});
    }
  }
  g.validate();
  return cp;
}

}  // namespace detail

inline CorpusParams parse_corpus_params(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    CorpusParams p;
    const auto n = j.value("n_per_class", std::int64_t{10});
    if (n < 2) throw Error(Errc::InvalidParams, "n_per_class must be >= 2");
    p.n_per_class = static_cast<std::size_t>(n);
    p.seed = j.value("seed", std::uint64_t{0});
    p.camera_id = j.value("camera_id", std::string("kinect1"));
    p.class_a = detail::class_from_json(j.value("class_a", nlohmann::json::object()), "class_a");
    p.class_b = detail::class_from_json(j.value("class_b", nlohmann::json::object()), "class_b");
    if (p.class_a.label == p.class_b.label) throw Error(Errc::InvalidParams, "class labels must differ");
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidParams, e.what());
  }
}

inline CorpusParams load_corpus_params(const fs::path& path) {
  if (!fs::exists(path)) throw Error(Errc::MissingFile, "params file '" + path.string() + "' not found");
  std::string text;
  for (const auto& line : io::read_lines(path)) text += line + "\n";
  return parse_corpus_params(text);
}

}  // namespace gaitemo
