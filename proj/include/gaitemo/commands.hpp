#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "gaitemo/classify.hpp"
#include "gaitemo/error.hpp"
#include "gaitemo/features.hpp"
#include "gaitemo/ingestion.hpp"
#include "gaitemo/preprocessing.hpp"
#include "gaitemo/skeleton.hpp"
#include "gaitemo/synthgait.hpp"

namespace gaitemo {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitInvalid = 2;

struct FeatureOptions {
  PipelineConfig pipeline;
  MissingSidePolicy missing_side = MissingSidePolicy::Reject;
  PhaseAveraging phases = PhaseAveraging::Arithmetic;
};

/// Walk -> descriptor, through every preprocessing stage.
inline FeatureVector extract_walk_features(const Walk& w, const FeatureOptions& opt = {}) {
  for (const auto& v : validate_walk(w))
    if (!v.starts_with("warning:")) throw Error(Errc::InvalidWalk, "invalid walk '" + w.walk_id + "': " + v);
  const SegmentedWalk segs = preprocess_walk(w, opt.pipeline);
  return walk_features(segs.front, segs.back, w.sample_rate, opt.missing_side, opt.phases);
}

struct SkippedWalk {
  std::string walk_id;
  std::string reason;
};

struct ExtractResult {
  std::vector<LabeledRow> rows;
  std::vector<SkippedWalk> skipped;
  std::vector<std::string> zero_filled;  // walk ids with a zero-filled side
};

/// Features for every walk in manifest order. Per-walk failures are
/// recorded and skipped; they never abort the run.
inline ExtractResult extract_corpus(const std::vector<Walk>& walks, const FeatureOptions& opt) {
  ExtractResult out;
  for (const Walk& w : walks) {
    try {
      FeatureVector fv = extract_walk_features(w, opt);
      if (fv.front_zero_filled || fv.back_zero_filled) out.zero_filled.push_back(w.walk_id);
      out.rows.push_back({w.walk_id, w.label, std::move(fv.values)});
    } catch (const Error& e) {
      out.skipped.push_back({w.walk_id, e.what()});
    }
  }
  return out;
}

inline ExtractResult extract_manifest(const Manifest& m, const FeatureOptions& opt) {
  ExtractResult out;
  for (const auto& e : m.entries) {
    try {
      const Walk w = load_walk(m, e);
      FeatureVector fv = extract_walk_features(w, opt);
      if (fv.front_zero_filled || fv.back_zero_filled) out.zero_filled.push_back(w.walk_id);
      out.rows.push_back({w.walk_id, w.label, std::move(fv.values)});
    } catch (const Error& err) {
      out.skipped.push_back({e.walk_id, err.what()});
    }
  }
  return out;
}

inline std::string format_walk_report(const ExtractResult& r) {
  std::string out = "walk_id,status,reason\n";
  for (const auto& row : r.rows) out += row.walk_id + ",ok,\n";
  for (const auto& s : r.skipped) {
    std::string reason = s.reason;
    for (char& c : reason)
      if (c == ',' || c == '\n') c = ' ';
    out += s.walk_id + ",skipped," + reason + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------

struct ExtractOptions {
  fs::path manifest;
  fs::path out;
  fs::path report;  // optional per-walk status CSV
  FeatureOptions features;
};

inline int cmd_extract(const ExtractOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    const Manifest m = load_manifest(opt.manifest);
    const ExtractResult r = extract_manifest(m, opt.features);
    for (const auto& s : r.skipped) err << "skipped " << s.walk_id << ": " << s.reason << "\n";
    for (const auto& id : r.zero_filled) err << "zero-filled missing side: " << id << "\n";
    if (!opt.report.empty()) io::write_text(opt.report, format_walk_report(r));
    if (r.rows.empty()) {
      err << "no feature rows produced\n";
      return kExitInvalid;
    }
    write_features_csv(opt.out, r.rows);
    out << "extracted " << r.rows.size() << " of " << m.entries.size() << " walks ("
        << r.rows.front().features.size() << " features) -> " << opt.out.string() << "\n";
    return kExitOk;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return exit_code_for(e.code());
  }
}

struct CrossvalOptions {
  fs::path features;
  fs::path out;  // keyed report; optional
  std::vector<ClassifierKind> classifiers = {ClassifierKind::Gnb};
  std::size_t folds = 10;
  std::uint64_t seed = 0;
  SmoOptions smo;
};

inline std::vector<EvalReport> evaluate_all(const LabeledDataset& d, const std::vector<ClassifierKind>& kinds,
                                            std::size_t folds, std::uint64_t seed, const SmoOptions& smo) {
  if (d.classes().size() != 2)
    throw Error(Errc::NotBinary, "evaluation needs exactly two labels, got " + std::to_string(d.classes().size()));
  std::vector<EvalReport> reports;
  for (ClassifierKind k : kinds) {
    ClassifierSpec spec;
    spec.kind = k;
    spec.smo = smo;
    reports.push_back(cross_validate(d, spec, folds, seed));
  }
  return reports;
}

inline std::string format_keyed(std::span<const EvalReport> reports) {
  std::string out;
  for (std::size_t i = 0; i < reports.size(); ++i) out += (i ? "\n" : "") + format_keyed(reports[i]);
  return out;
}

inline int cmd_crossval(const CrossvalOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    if (opt.folds < 2) throw Error(Errc::InvalidConfig, "--folds must be >= 2");
    const LabeledDataset d(read_features_csv(opt.features));
    const auto reports = evaluate_all(d, opt.classifiers, opt.folds, opt.seed, opt.smo);
    out << format_table(reports);
    if (!opt.out.empty()) io::write_text(opt.out, format_keyed(reports));
    return kExitOk;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return exit_code_for(e.code());
  }
}

struct SynthOptions {
  fs::path params;
  fs::path out_dir;
  bool force = false;
};

inline int cmd_synth(const SynthOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    const CorpusParams p = load_corpus_params(opt.params);
    std::error_code ec;
    if (fs::exists(opt.out_dir, ec) && !fs::is_empty(opt.out_dir, ec) && !opt.force) {
      err << "output directory '" << opt.out_dir.string() << "' is not empty (use --force)\n";
      return kExitInvalid;
    }
    const Manifest m = generate_corpus(p.class_a, p.class_b, p.n_per_class, p.seed, opt.out_dir, p.camera_id);
    out << "wrote " << m.entries.size() << " walks (" << p.n_per_class << " " << to_string(p.class_a.label) << ", "
        << p.n_per_class << " " << to_string(p.class_b.label) << ") -> " << (opt.out_dir / "manifest.csv").string()
        << "\n";
    return kExitOk;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return exit_code_for(e.code());
  }
}

struct AblateOptions {
  fs::path manifest;
  fs::path out;  // keyed reports; optional
  ClassifierKind classifier = ClassifierKind::Gnb;
  std::size_t folds = 10;
  std::uint64_t seed = 0;
  FeatureOptions features;
  SmoOptions smo;
};

struct AblationResult {
  EvalReport significant14;
  EvalReport all25;
};

inline AblationResult run_ablation(const std::vector<LabeledRow>& rows14, const std::vector<LabeledRow>& rows25,
                                   ClassifierKind kind, std::size_t folds, std::uint64_t seed, const SmoOptions& smo) {
  const LabeledDataset d14(rows14), d25(rows25);
  AblationResult r;
  r.significant14 = evaluate_all(d14, {kind}, folds, seed, smo).front();
  r.all25 = evaluate_all(d25, {kind}, folds, seed, smo).front();
  return r;
}

inline std::string format_ablation(const AblationResult& r) {
  EvalReport a = r.significant14, b = r.all25;
  a.classifier += "/14";
  b.classifier += "/25";
  const std::vector<EvalReport> both{a, b};
  return format_table(both);
}

inline int cmd_ablate(const AblateOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    if (opt.folds < 2) throw Error(Errc::InvalidConfig, "--folds must be >= 2");
    const Manifest m = load_manifest(opt.manifest);
    if (m.entries.empty()) {
      err << "manifest has no walks\n";
      return kExitInvalid;
    }
    FeatureOptions f14 = opt.features, f25 = opt.features;
    f14.pipeline.joint_set = JointSet::Significant14;
    f25.pipeline.joint_set = JointSet::All25;
    const auto r14 = extract_manifest(m, f14);
    const auto r25 = extract_manifest(m, f25);
    for (const auto& s : r14.skipped) err << "skipped " << s.walk_id << ": " << s.reason << "\n";
    if (r14.rows.empty() || r25.rows.empty()) {
      err << "no feature rows produced\n";
      return kExitInvalid;
    }
    const AblationResult r = run_ablation(r14.rows, r25.rows, opt.classifier, opt.folds, opt.seed, opt.smo);
    out << format_ablation(r);
    if (!opt.out.empty()) {
      const std::vector<EvalReport> both{r.significant14, r.all25};
      io::write_text(opt.out, "joints=14\n" + format_keyed(both[0]) + "\njoints=25\n" + format_keyed(both[1]));
    }
    return kExitOk;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return exit_code_for(e.code());
  }
}

struct TrainOptions {
  fs::path features;
  fs::path out;
  ClassifierKind classifier = ClassifierKind::Gnb;
  SmoOptions smo;
};

inline int cmd_train(const TrainOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    const LabeledDataset d(read_features_csv(opt.features));
    ClassifierSpec spec;
    spec.kind = opt.classifier;
    spec.smo = opt.smo;
    save_model(opt.out, train_classifier(d, spec));
    out << "trained " << display_name(opt.classifier) << " on " << d.size() << " rows -> " << opt.out.string()
        << "\n";
    return kExitOk;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return exit_code_for(e.code());
  }
}

struct PredictOptions {
  fs::path model;
  fs::path features;
};

/// Prints `walk_id,label,predicted` per row, then the accuracy against the
/// labels in the file.
inline int cmd_predict(const PredictOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    const ClassifierModel model = load_model(opt.model);
    const auto rows = read_features_csv(opt.features);
    std::size_t correct = 0;
    out << "walk_id,label,predicted\n";
    for (const auto& r : rows) {
      const EmotionLabel p = predict(model, r.features);
      correct += p == r.label;
      out << r.walk_id << "," << to_string(r.label) << "," << to_string(p) << "\n";
    }
    if (!rows.empty())
      out << "# accuracy=" << detail::fmt("%.4f", 100.0 * double(correct) / double(rows.size())) << "\n";
    return kExitOk;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return exit_code_for(e.code());
  }
}

}  // namespace gaitemo
