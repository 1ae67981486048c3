#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "gaitemo/classify.hpp"
#include "gaitemo/error.hpp"
#include "gaitemo/skeleton.hpp"

namespace gaitemo {

namespace fs = std::filesystem;

namespace io {

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::optional<double> parse_double(std::string_view s) noexcept {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || p != end || s.empty()) return std::nullopt;
  return v;
}

template <class Int>
std::optional<Int> parse_int(std::string_view s) noexcept {
  Int v{};
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || p != end || s.empty()) return std::nullopt;
  return v;
}

/// Shortest-safe decimal form: 17 significant digits round-trips a double.
inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open '" + path.string() + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  if (in.bad()) throw Error(Errc::Io, "read failed on '" + path.string() + "'");
  return lines;
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot write '" + path.string() + "'");
  out << text;
  out.flush();
  if (!out) throw Error(Errc::Io, "write failed on '" + path.string() + "'");
}

}  // namespace io

// ---------------------------------------------------------------------------
// Frame CSV
//
//   # walk_id=w1            optional directives, before the header
//   # sample_rate=30
//   frame_index,timestamp,SpineBase_x,SpineBase_y,SpineBase_z,...,ThumbRight_z
//   0,0,0.1,0.2,3.5,...

inline std::string frames_csv_header() {
  std::string h = "frame_index,timestamp";
  for (auto name : kJointNames)
    for (const char* axis : {"_x", "_y", "_z"}) h += "," + std::string(name) + axis;
  return h;
}

inline constexpr std::size_t kFrameFields = 2 + 3 * kJointCount;

inline std::string format_frames_csv(const Walk& w) {
  std::string out;
  out += "# walk_id=" + w.walk_id + "\n";
  out += "# subject_id=" + w.subject_id + "\n";
  out += "# camera_id=" + w.camera_id + "\n";
  out += "# label=" + std::string(to_string(w.label)) + "\n";
  out += "# sample_rate=" + io::num(w.sample_rate) + "\n";
  out += frames_csv_header() + "\n";
  for (const Frame& f : w.frames) {
    out += std::to_string(f.frame_index) + "," + io::num(f.timestamp);
    for (const Vec3& p : f.positions) out += "," + io::num(p.x) + "," + io::num(p.y) + "," + io::num(p.z);
    out += "\n";
  }
  return out;
}

inline void write_frames_csv(const fs::path& path, const Walk& w) { io::write_text(path, format_frames_csv(w)); }

inline Walk parse_frames_csv(const fs::path& path) {
  const auto lines = io::read_lines(path);
  Walk w;
  w.walk_id = path.stem().string();
  std::size_t ln = 0;
  for (; ln < lines.size() && lines[ln].starts_with("#"); ++ln) {
    std::string_view d(lines[ln]);
    d.remove_prefix(1);
    while (!d.empty() && d.front() == ' ') d.remove_prefix(1);
    const auto eq = d.find('=');
    if (eq == std::string_view::npos) throw Error(Errc::MalformedHeader, "bad directive", ln + 1);
    const auto key = d.substr(0, eq);
    const auto value = d.substr(eq + 1);
    if (key == "walk_id") {
      w.walk_id = std::string(value);
    } else if (key == "subject_id") {
      w.subject_id = std::string(value);
    } else if (key == "camera_id") {
      w.camera_id = std::string(value);
    } else if (key == "label") {
      auto l = parse_label(value);
      if (!l) throw Error(Errc::UnknownLabel, "label '" + std::string(value) + "'", ln + 1);
      w.label = *l;
    } else if (key == "sample_rate") {
      auto r = io::parse_double(value);
      if (!r || !std::isfinite(*r) || *r <= 0.0) throw Error(Errc::MalformedHeader, "bad sample_rate", ln + 1);
      w.sample_rate = *r;
    } else {
      throw Error(Errc::MalformedHeader, "unknown directive '" + std::string(key) + "'", ln + 1);
    }
  }
  if (ln >= lines.size() || lines[ln] != frames_csv_header())
    throw Error(Errc::MalformedHeader, "expected frame_index,timestamp and 75 joint columns", ln + 1);
  ++ln;
  for (; ln < lines.size(); ++ln) {
    const std::size_t line_no = ln + 1;
    if (lines[ln].empty() && ln + 1 == lines.size()) break;
    const auto fields = io::split(lines[ln]);
    if (fields.size() != kFrameFields)
      throw Error(Errc::BadFieldCount, "expected 77 fields, got " + std::to_string(fields.size()), line_no);
    Frame f;
    auto idx = io::parse_int<std::int64_t>(fields[0]);
    if (!idx) throw Error(Errc::NonFiniteValue, "bad frame_index", line_no, 1);
    f.frame_index = *idx;
    if (!w.frames.empty() && f.frame_index <= w.frames.back().frame_index)
      throw Error(Errc::NonMonotonicIndex, "frame_index " + std::to_string(f.frame_index) + " does not increase",
                  line_no);
    std::vector<double> vals(kFrameFields - 1);
    for (std::size_t c = 1; c < kFrameFields; ++c) {
      auto v = io::parse_double(fields[c]);
      if (!v || !std::isfinite(*v))
        throw Error(Errc::NonFiniteValue, "field '" + std::string(fields[c]) + "'", line_no, c + 1);
      vals[c - 1] = *v;
    }
    f.timestamp = vals[0];
    f.positions.resize(kJointCount);
    for (std::size_t j = 0; j < kJointCount; ++j) f.positions[j] = {vals[1 + 3 * j], vals[2 + 3 * j], vals[3 + 3 * j]};
    w.frames.push_back(std::move(f));
  }
  return w;
}

// ---------------------------------------------------------------------------
// Manifest CSV: walk_id,file_path,subject_id,camera_id,label

inline constexpr std::string_view kManifestHeader = "walk_id,file_path,subject_id,camera_id,label";

struct ManifestEntry {
  std::string walk_id;
  std::string file_path;  // as written; relative paths resolve against the manifest directory
  std::string subject_id;
  std::string camera_id;
  EmotionLabel label = EmotionLabel::Natural;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct Manifest {
  std::vector<ManifestEntry> entries;
  fs::path base_dir;

  fs::path resolve(const ManifestEntry& e) const {
    fs::path p(e.file_path);
    return p.is_absolute() ? p : base_dir / p;
  }
};

inline Manifest load_manifest(const fs::path& path) {
  if (!fs::exists(path)) throw Error(Errc::MissingFile, "manifest '" + path.string() + "' not found");
  const auto lines = io::read_lines(path);
  if (lines.empty() || lines[0] != kManifestHeader)
    throw Error(Errc::MalformedHeader, "expected '" + std::string(kManifestHeader) + "'", 1);
  Manifest m;
  m.base_dir = path.parent_path();
  std::set<std::string> seen;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (lines[ln].empty() && ln + 1 == lines.size()) break;
    const auto f = io::split(lines[ln]);
    if (f.size() != 5) throw Error(Errc::BadFieldCount, "expected 5 fields, got " + std::to_string(f.size()), ln + 1);
    auto label = parse_label(f[4]);
    if (!label) throw Error(Errc::UnknownLabel, "label '" + std::string(f[4]) + "'", ln + 1, 5);
    ManifestEntry e{std::string(f[0]), std::string(f[1]), std::string(f[2]), std::string(f[3]), *label};
    if (e.walk_id.empty()) throw Error(Errc::MalformedRow, "empty walk_id", ln + 1, 1);
    if (!seen.insert(e.walk_id).second) throw Error(Errc::DuplicateWalkId, "walk_id '" + e.walk_id + "'", ln + 1, 1);
    m.entries.push_back(std::move(e));
  }
  return m;
}

inline void write_manifest(const fs::path& path, const Manifest& m) {
  std::string out(kManifestHeader);
  out += "\n";
  for (const auto& e : m.entries)
    out += e.walk_id + "," + e.file_path + "," + e.subject_id + "," + e.camera_id + "," +
           std::string(to_string(e.label)) + "\n";
  io::write_text(path, out);
}

/// Reads an entry's frames; manifest metadata overrides file directives.
inline Walk load_walk(const Manifest& m, const ManifestEntry& e) {
  const fs::path p = m.resolve(e);
  if (!fs::exists(p)) throw Error(Errc::MissingFile, "walk file '" + p.string() + "' not found");
  Walk w = parse_frames_csv(p);
  w.walk_id = e.walk_id;
  w.subject_id = e.subject_id;
  w.camera_id = e.camera_id;
  w.label = e.label;
  return w;
}

// ---------------------------------------------------------------------------
// Features CSV: walk_id,label,f_1,...,f_W

inline void write_features_csv(const fs::path& path, std::span<const LabeledRow> rows) {
  const std::size_t width = rows.empty() ? 0 : rows.front().features.size();
  for (const auto& r : rows)
    if (r.features.size() != width)
      throw Error(Errc::WidthMismatch, "row '" + r.walk_id + "' has width " + std::to_string(r.features.size()) +
                                           ", expected " + std::to_string(width));
  std::string out = "walk_id,label";
  for (std::size_t i = 1; i <= width; ++i) out += ",f_" + std::to_string(i);
  out += "\n";
  for (const auto& r : rows) {
    out += r.walk_id + "," + std::string(to_string(r.label));
    for (double v : r.features) out += "," + io::num(v);
    out += "\n";
  }
  io::write_text(path, out);
}

inline std::vector<LabeledRow> read_features_csv(const fs::path& path) {
  if (!fs::exists(path)) throw Error(Errc::MissingFile, "features file '" + path.string() + "' not found");
  const auto lines = io::read_lines(path);
  if (lines.empty()) throw Error(Errc::MalformedHeader, "empty features file", 1);
  const auto head = io::split(lines[0]);
  if (head.size() < 2 || head[0] != "walk_id" || head[1] != "label")
    throw Error(Errc::MalformedHeader, "expected 'walk_id,label,f_1,...'", 1);
  for (std::size_t i = 2; i < head.size(); ++i)
    if (head[i] != "f_" + std::to_string(i - 1))
      throw Error(Errc::MalformedHeader, "column " + std::to_string(i + 1) + " should be f_" + std::to_string(i - 1),
                  1, i + 1);
  const std::size_t width = head.size() - 2;
  std::vector<LabeledRow> rows;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (lines[ln].empty() && ln + 1 == lines.size()) break;
    const auto f = io::split(lines[ln]);
    if (f.size() != width + 2)
      throw Error(Errc::MalformedRow, "expected " + std::to_string(width + 2) + " fields, got " +
                                          std::to_string(f.size()), ln + 1);
    auto label = parse_label(f[1]);
    if (!label) throw Error(Errc::UnknownLabel, "label '" + std::string(f[1]) + "'", ln + 1, 2);
    LabeledRow r{std::string(f[0]), *label, std::vector<double>(width)};
    for (std::size_t i = 0; i < width; ++i) {
      auto v = io::parse_double(f[i + 2]);
      if (!v || !std::isfinite(*v))
        throw Error(Errc::MalformedRow, "field '" + std::string(f[i + 2]) + "'", ln + 1, i + 3);
      r.features[i] = *v;
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Model files
//
// Line-oriented `key value...` records between a magic line and `end`.

inline constexpr std::string_view kModelMagic = "gaitemo-model";
inline constexpr int kModelVersion = 1;

namespace detail {

inline std::string join_nums(std::span<const double> v) {
  std::string out;
  for (double x : v) out += " " + io::num(x);
  return out;
}

class ModelRecord {
 public:
  explicit ModelRecord(const std::vector<std::string>& lines) {
    for (const auto& line : lines) {
      std::istringstream ss(line);
      std::string key;
      if (!(ss >> key)) continue;
      std::vector<std::string> toks;
      for (std::string t; ss >> t;) toks.push_back(t);
      fields_[key] = std::move(toks);
    }
  }

  bool has(const std::string& key) const { return fields_.count(key) != 0; }

  const std::vector<std::string>& tokens(const std::string& key) const {
    auto it = fields_.find(key);
    if (it == fields_.end()) throw Error(Errc::CorruptPayload, "missing '" + key + "'");
    return it->second;
  }

  std::string word(const std::string& key) const {
    const auto& t = tokens(key);
    if (t.size() != 1) throw Error(Errc::CorruptPayload, "'" + key + "' should hold one value");
    return t[0];
  }

  double real(const std::string& key) const { return to_real(word(key), key); }

  std::size_t count(const std::string& key) const {
    auto v = io::parse_int<std::size_t>(word(key));
    if (!v) throw Error(Errc::CorruptPayload, "'" + key + "' is not a count");
    return *v;
  }

  std::vector<double> reals(const std::string& key, std::size_t n) const {
    const auto& t = tokens(key);
    if (t.size() != n)
      throw Error(Errc::CorruptPayload, "'" + key + "' has " + std::to_string(t.size()) + " values, expected " +
                                            std::to_string(n));
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = to_real(t[i], key);
    return out;
  }

  EmotionLabel label(const std::string& tok) const {
    auto l = parse_label(tok);
    if (!l) throw Error(Errc::CorruptPayload, "unknown label '" + tok + "'");
    return *l;
  }

 private:
  static double to_real(const std::string& s, const std::string& key) {
    auto v = io::parse_double(s);
    if (!v || !std::isfinite(*v)) throw Error(Errc::CorruptPayload, "bad number in '" + key + "'");
    return *v;
  }

  std::map<std::string, std::vector<std::string>> fields_;
};

}  // namespace detail

inline std::string format_model(const ClassifierModel& model) {
  std::string out(kModelMagic);
  out += "\nversion " + std::to_string(kModelVersion) + "\n";
  if (const auto* g = std::get_if<GaussianNBModel>(&model)) {
    out += "kind gnb\n";
    out += "classes";
    for (auto c : g->classes) out += " " + std::string(to_string(c));
    out += "\nwidth " + std::to_string(g->width()) + "\n";
    out += "variance_floor " + io::num(g->variance_floor) + "\n";
    out += "priors" + detail::join_nums(g->priors) + "\n";
    for (std::size_t c = 0; c < g->classes.size(); ++c) {
      out += "mean." + std::to_string(c) + detail::join_nums(g->means[c]) + "\n";
      out += "variance." + std::to_string(c) + detail::join_nums(g->variances[c]) + "\n";
    }
  } else {
    const auto& s = std::get<SvmClassifier>(model);
    out += "kind svm\n";
    out += "negative " + std::string(to_string(s.svm.negative)) + "\n";
    out += "positive " + std::string(to_string(s.svm.positive)) + "\n";
    out += "width " + std::to_string(s.svm.weights.size()) + "\n";
    out += "C " + io::num(s.svm.C) + "\n";
    out += "bias " + io::num(s.svm.bias) + "\n";
    out += "weights" + detail::join_nums(s.svm.weights) + "\n";
    out += "scaler_mean" + detail::join_nums(s.scaler.mean) + "\n";
    out += "scaler_scale" + detail::join_nums(s.scaler.scale) + "\n";
    out += "iterations " + std::to_string(s.svm.meta.iterations) + "\n";
    out += "kkt_violations " + std::to_string(s.svm.meta.kkt_violations_remaining) + "\n";
    out += "converged " + std::to_string(int(s.svm.meta.converged)) + "\n";
    out += "degenerate " + std::to_string(int(s.svm.meta.degenerate)) + "\n";
  }
  out += "end\n";
  return out;
}

inline void save_model(const fs::path& path, const ClassifierModel& model) { io::write_text(path, format_model(model)); }

inline ClassifierModel parse_model(const std::vector<std::string>& lines) {
  if (lines.empty() || lines[0] != kModelMagic) throw Error(Errc::CorruptPayload, "not a model file");
  const detail::ModelRecord rec(lines);
  if (!rec.has("version")) throw Error(Errc::CorruptPayload, "missing version");
  if (rec.word("version") != std::to_string(kModelVersion))
    throw Error(Errc::VersionMismatch, "model version " + rec.word("version") + ", expected " +
                                           std::to_string(kModelVersion));
  if (!rec.has("kind")) throw Error(Errc::CorruptPayload, "missing model kind");
  const std::string kind = rec.word("kind");
  if (kind != "gnb" && kind != "svm") throw Error(Errc::UnknownModelKind, "model kind '" + kind + "'");
  if (lines.back() != "end") throw Error(Errc::CorruptPayload, "model file is truncated");

  const std::size_t width = rec.count("width");
  if (kind == "gnb") {
    GaussianNBModel g;
    for (const auto& t : rec.tokens("classes")) g.classes.push_back(rec.label(t));
    if (g.classes.size() < 2) throw Error(Errc::CorruptPayload, "need at least two classes");
    g.variance_floor = rec.real("variance_floor");
    g.priors = rec.reals("priors", g.classes.size());
    for (std::size_t c = 0; c < g.classes.size(); ++c) {
      g.means.push_back(rec.reals("mean." + std::to_string(c), width));
      g.variances.push_back(rec.reals("variance." + std::to_string(c), width));
    }
    return g;
  }
  SvmClassifier s;
  s.svm.negative = rec.label(rec.word("negative"));
  s.svm.positive = rec.label(rec.word("positive"));
  s.svm.C = rec.real("C");
  s.svm.bias = rec.real("bias");
  s.svm.weights = rec.reals("weights", width);
  s.scaler.mean = rec.reals("scaler_mean", width);
  s.scaler.scale = rec.reals("scaler_scale", width);
  s.svm.meta.iterations = rec.count("iterations");
  s.svm.meta.kkt_violations_remaining = rec.count("kkt_violations");
  s.svm.meta.converged = rec.count("converged") != 0;
  s.svm.meta.degenerate = rec.count("degenerate") != 0;
  return s;
}

inline ClassifierModel load_model(const fs::path& path) {
  if (!fs::exists(path)) throw Error(Errc::MissingFile, "model '" + path.string() + "' not found");
  return parse_model(io::read_lines(path));
}

}  // namespace gaitemo
