#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <map>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gaitemo/error.hpp"
#include "gaitemo/skeleton.hpp"

namespace gaitemo {

struct LabeledRow {
  std::string walk_id;
  EmotionLabel label = EmotionLabel::Natural;
  std::vector<double> features;

  friend bool operator==(const LabeledRow&, const LabeledRow&) = default;
};

class LabeledDataset {
 public:
  LabeledDataset() = default;
  explicit LabeledDataset(std::vector<LabeledRow> rows) : rows_(std::move(rows)) {
    if (!rows_.empty()) width_ = rows_.front().features.size();
    for (std::size_t i = 0; i < rows_.size(); ++i) check(rows_[i], i);
  }

  void add(LabeledRow row) {
    if (rows_.empty()) width_ = row.features.size();
    check(row, rows_.size());
    rows_.push_back(std::move(row));
  }

  std::size_t size() const noexcept { return rows_.size(); }
  bool empty() const noexcept { return rows_.empty(); }
  std::size_t width() const noexcept { return width_; }
  const LabeledRow& operator[](std::size_t i) const { return rows_[i]; }
  const std::vector<LabeledRow>& rows() const noexcept { return rows_; }

  /// Distinct labels present, in EmotionLabel order.
  std::vector<EmotionLabel> classes() const {
    std::vector<EmotionLabel> out;
    for (auto l : kAllLabels)
      if (std::any_of(rows_.begin(), rows_.end(), [l](const LabeledRow& r) { return r.label == l; }))
        out.push_back(l);
    return out;
  }

  std::size_t count(EmotionLabel l) const {
    return static_cast<std::size_t>(
        std::count_if(rows_.begin(), rows_.end(), [l](const LabeledRow& r) { return r.label == l; }));
  }

  LabeledDataset subset(std::span<const std::size_t> indices) const {
    LabeledDataset out;
    out.width_ = width_;
    out.rows_.reserve(indices.size());
    for (std::size_t i : indices) out.rows_.push_back(rows_.at(i));
    return out;
  }

 private:
  void check(const LabeledRow& r, std::size_t i) const {
    if (r.features.size() != width_)
      throw Error(Errc::WidthMismatch, "row " + std::to_string(i) + " has width " +
                                           std::to_string(r.features.size()) + ", expected " + std::to_string(width_));
    for (double v : r.features)
      if (!std::isfinite(v)) throw Error(Errc::NonFiniteValue, "row " + std::to_string(i) + " has a non-finite feature");
  }

  std::vector<LabeledRow> rows_;
  std::size_t width_ = 0;
};

// ---------------------------------------------------------------------------
// Gaussian naive Bayes

inline constexpr double kDefaultVarianceFloor = 1e-9;

struct GaussianNBModel {
  std::vector<EmotionLabel> classes;
  std::vector<double> priors;
  std::vector<std::vector<double>> means;
  std::vector<std::vector<double>> variances;
  double variance_floor = kDefaultVarianceFloor;

  std::size_t width() const noexcept { return means.empty() ? 0 : means.front().size(); }
};

inline GaussianNBModel train_gnb(const LabeledDataset& d, double variance_floor = kDefaultVarianceFloor) {
  const auto classes = d.classes();
  if (classes.size() < 2) throw Error(Errc::SingleClass, "naive Bayes needs at least two classes");
  GaussianNBModel m;
  m.classes = classes;
  m.variance_floor = variance_floor;
  const std::size_t w = d.width();
  for (EmotionLabel c : classes) {
    std::vector<double> mean(w, 0.0), var(w, 0.0);
    std::size_t n = 0;
    for (const auto& r : d.rows()) {
      if (r.label != c) continue;
      ++n;
      for (std::size_t j = 0; j < w; ++j) mean[j] += r.features[j];
    }
    if (n < 2)
      throw Error(Errc::DegenerateClass, "class '" + std::string(to_string(c)) + "' has fewer than 2 rows");
    for (double& v : mean) v /= double(n);
    for (const auto& r : d.rows()) {
      if (r.label != c) continue;
      for (std::size_t j = 0; j < w; ++j) {
        const double dv = r.features[j] - mean[j];
        var[j] += dv * dv;
      }
    }
    for (double& v : var) v = std::max(v / double(n), variance_floor);
    m.priors.push_back(double(n) / double(d.size()));
    m.means.push_back(std::move(mean));
    m.variances.push_back(std::move(var));
  }
  return m;
}

struct GnbPrediction {
  EmotionLabel label = EmotionLabel::Natural;
  std::vector<double> log_posteriors;  // normalized, aligned with model.classes
};

inline GnbPrediction predict_gnb(const GaussianNBModel& m, std::span<const double> x) {
  if (x.size() != m.width())
    throw Error(Errc::WidthMismatch, "input width " + std::to_string(x.size()) + ", model expects " +
                                         std::to_string(m.width()));
  const double log_2pi = std::log(2.0 * std::numbers::pi);
  std::vector<double> score(m.classes.size());
  std::size_t best = 0;
  for (std::size_t c = 0; c < m.classes.size(); ++c) {
    double s = std::log(m.priors[c]);
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double var = m.variances[c][j];
      const double dv = x[j] - m.means[c][j];
      s -= 0.5 * (log_2pi + std::log(var) + dv * dv / var);
    }
    score[c] = s;
    if (s > score[best]) best = c;
  }
  const double top = score[best];
  double z = 0.0;
  for (double s : score) z += std::exp(s - top);
  const double log_z = top + std::log(z);
  for (double& s : score) s -= log_z;
  return {m.classes[best], std::move(score)};
}

// ---------------------------------------------------------------------------
// Linear SVM, simplified sequential minimal optimization

struct SmoOptions {
  double C = 1.0;
  double tol = 1e-3;
  std::size_t max_passes = 10;
  std::size_t max_iterations = 100000;  // full sweeps over the data
  std::uint64_t seed = 0;
};

struct SvmMeta {
  std::size_t iterations = 0;
  std::size_t kkt_violations_remaining = 0;
  bool converged = false;
  bool degenerate = false;  // all-zero weights
};

struct LinearSVMModel {
  EmotionLabel negative = EmotionLabel::Natural;  // y = -1
  EmotionLabel positive = EmotionLabel::Angry;    // y = +1
  std::vector<double> weights;
  double bias = 0.0;
  double C = 1.0;
  SvmMeta meta;
};

struct SmoSolution {
  LinearSVMModel model;
  std::vector<double> alphas;
  std::vector<double> targets;  // +1 / -1 per training row
};

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Trains a linear SVM on exactly two classes. The first class in
/// EmotionLabel order maps to -1, the second to +1.
inline SmoSolution train_svm_smo(const LabeledDataset& d, const SmoOptions& opt = {}) {
  const auto classes = d.classes();
  if (classes.size() != 2)
    throw Error(Errc::NotBinary, "SVM needs exactly two classes, got " + std::to_string(classes.size()));
  if (!(opt.C > 0.0) || !(opt.tol > 0.0)) throw Error(Errc::InvalidConfig, "SVM needs C > 0 and tol > 0");

  const std::size_t n = d.size();
  const std::size_t w = d.width();
  SmoSolution sol;
  LinearSVMModel& m = sol.model;
  m.negative = classes[0];
  m.positive = classes[1];
  m.C = opt.C;
  m.weights.assign(w, 0.0);
  sol.alphas.assign(n, 0.0);
  sol.targets.resize(n);
  for (std::size_t i = 0; i < n; ++i) sol.targets[i] = d[i].label == m.positive ? 1.0 : -1.0;

  std::vector<double> self_dot(n);
  for (std::size_t i = 0; i < n; ++i) self_dot[i] = dot(d[i].features, d[i].features);

  auto& a = sol.alphas;
  const auto& y = sol.targets;
  const double C = opt.C;
  auto f = [&](std::size_t i) { return dot(m.weights, d[i].features) + m.bias; };

  std::mt19937_64 rng(opt.seed);
  std::size_t passes = 0;
  std::size_t iter = 0;
  while (passes < opt.max_passes && iter < opt.max_iterations) {
    std::size_t changed = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ei = f(i) - y[i];
      if (!((y[i] * ei < -opt.tol && a[i] < C) || (y[i] * ei > opt.tol && a[i] > 0.0))) continue;
      std::size_t j = static_cast<std::size_t>(rng() % (n - 1));
      if (j >= i) ++j;
      const double ej = f(j) - y[j];
      const double ai_old = a[i], aj_old = a[j];
      double lo, hi;
      if (y[i] != y[j]) {
        lo = std::max(0.0, aj_old - ai_old);
        hi = std::min(C, C + aj_old - ai_old);
      } else {
        lo = std::max(0.0, ai_old + aj_old - C);
        hi = std::min(C, ai_old + aj_old);
      }
      if (lo >= hi) continue;
      const double kij = dot(d[i].features, d[j].features);
      const double eta = 2.0 * kij - self_dot[i] - self_dot[j];
      if (eta >= 0.0) continue;
      double aj = std::clamp(aj_old - y[j] * (ei - ej) / eta, lo, hi);
      if (std::abs(aj - aj_old) < 1e-5) continue;
      double ai = std::clamp(ai_old + y[i] * y[j] * (aj_old - aj), 0.0, C);
      a[i] = ai;
      a[j] = aj;
      const double di = y[i] * (ai - ai_old);
      const double dj = y[j] * (aj - aj_old);
      const double b1 = m.bias - ei - di * self_dot[i] - dj * kij;
      const double b2 = m.bias - ej - di * kij - dj * self_dot[j];
      if (ai > 0.0 && ai < C)
        m.bias = b1;
      else if (aj > 0.0 && aj < C)
        m.bias = b2;
      else
        m.bias = 0.5 * (b1 + b2);
      for (std::size_t k = 0; k < w; ++k) m.weights[k] += di * d[i].features[k] + dj * d[j].features[k];
      ++changed;
    }
    ++iter;
    passes = changed == 0 ? passes + 1 : 0;
  }

  // Rebuild weights from the duals and take the bias from margin vectors.
  std::fill(m.weights.begin(), m.weights.end(), 0.0);
  for (std::size_t i = 0; i < n; ++i)
    if (a[i] > 0.0)
      for (std::size_t k = 0; k < w; ++k) m.weights[k] += a[i] * y[i] * d[i].features[k];
  double bsum = 0.0;
  std::size_t nfree = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] > 1e-8 && a[i] < C - 1e-8) {
      bsum += y[i] - dot(m.weights, d[i].features);
      ++nfree;
    }
  }
  if (nfree > 0) m.bias = bsum / double(nfree);

  std::size_t violations = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] * (f(i) - y[i]);
    if ((r < -opt.tol && a[i] < C) || (r > opt.tol && a[i] > 0.0)) ++violations;
  }
  m.meta.iterations = iter;
  m.meta.kkt_violations_remaining = violations;
  m.meta.converged = passes >= opt.max_passes;
  m.meta.degenerate = std::all_of(m.weights.begin(), m.weights.end(), [](double v) { return v == 0.0; });
  return sol;
}

struct SvmPrediction {
  EmotionLabel label = EmotionLabel::Natural;
  double decision = 0.0;
};

/// sign(w.x + b); a zero decision value, or a degenerate all-zero weight
/// vector, maps to the positive class.
inline SvmPrediction predict_svm(const LinearSVMModel& m, std::span<const double> x) {
  if (x.size() != m.weights.size())
    throw Error(Errc::WidthMismatch, "input width " + std::to_string(x.size()) + ", model expects " +
                                         std::to_string(m.weights.size()));
  const double v = dot(m.weights, x) + m.bias;
  const bool degenerate = std::all_of(m.weights.begin(), m.weights.end(), [](double w) { return w == 0.0; });
  return {(degenerate || v >= 0.0) ? m.positive : m.negative, v};
}

// ---------------------------------------------------------------------------
// Classifier wrapper used by evaluation and model files

/// Per-feature z-score parameters fitted on training data. Constant
/// columns keep scale 1.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const LabeledDataset& d) {
    Standardizer s;
    const std::size_t w = d.width();
    s.mean.assign(w, 0.0);
    s.scale.assign(w, 0.0);
    if (d.empty()) {
      s.scale.assign(w, 1.0);
      return s;
    }
    for (const auto& r : d.rows())
      for (std::size_t j = 0; j < w; ++j) s.mean[j] += r.features[j];
    for (double& v : s.mean) v /= double(d.size());
    for (const auto& r : d.rows())
      for (std::size_t j = 0; j < w; ++j) s.scale[j] += (r.features[j] - s.mean[j]) * (r.features[j] - s.mean[j]);
    for (double& v : s.scale) {
      v = std::sqrt(v / double(d.size()));
      if (v < 1e-12) v = 1.0;
    }
    return s;
  }

  std::vector<double> apply(std::span<const double> x) const {
    std::vector<double> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) out[j] = (x[j] - mean[j]) / scale[j];
    return out;
  }

  LabeledDataset apply(const LabeledDataset& d) const {
    std::vector<LabeledRow> rows = d.rows();
    for (auto& r : rows) r.features = apply(r.features);
    return LabeledDataset(std::move(rows));
  }
};

struct SvmClassifier {
  Standardizer scaler;
  LinearSVMModel svm;
};

using ClassifierModel = std::variant<GaussianNBModel, SvmClassifier>;

enum class ClassifierKind { Gnb, Svm };

inline constexpr std::string_view to_string(ClassifierKind k) noexcept { return k == ClassifierKind::Gnb ? "gnb" : "svm"; }

/// Column heading used in result tables.
inline constexpr std::string_view display_name(ClassifierKind k) noexcept {
  return k == ClassifierKind::Gnb ? "NaiveBayes" : "SMO";
}

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::Gnb;
  double variance_floor = kDefaultVarianceFloor;
  SmoOptions smo;
};

inline ClassifierModel train_classifier(const LabeledDataset& d, const ClassifierSpec& spec) {
  if (spec.kind == ClassifierKind::Gnb) return train_gnb(d, spec.variance_floor);
  SvmClassifier out;
  out.scaler = Standardizer::fit(d);
  out.svm = train_svm_smo(out.scaler.apply(d), spec.smo).model;
  return out;
}

inline EmotionLabel predict(const ClassifierModel& m, std::span<const double> x) {
  if (const auto* g = std::get_if<GaussianNBModel>(&m)) return predict_gnb(*g, x).label;
  const auto& s = std::get<SvmClassifier>(m);
  if (x.size() != s.scaler.mean.size())
    throw Error(Errc::WidthMismatch, "input width " + std::to_string(x.size()) + ", model expects " +
                                         std::to_string(s.scaler.mean.size()));
  return predict_svm(s.svm, s.scaler.apply(x)).label;
}

inline ClassifierKind kind_of(const ClassifierModel& m) noexcept {
  return std::holds_alternative<GaussianNBModel>(m) ? ClassifierKind::Gnb : ClassifierKind::Svm;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace detail {

// Fisher-Yates over a fully specified engine so folds match across
// standard library implementations.
inline void shuffle(std::vector<std::size_t>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace detail

/// Stratified k-fold split. Each class is shuffled, then dealt round-robin
/// with the fold cursor carried across classes, so fold sizes and per-fold
/// class counts each differ by at most one.
inline std::vector<std::vector<std::size_t>> stratified_kfold(const LabeledDataset& d, std::size_t k,
                                                              std::uint64_t seed) {
  if (k < 2) throw Error(Errc::InvalidConfig, "need at least 2 folds");
  if (d.size() < k)
    throw Error(Errc::TooFewPerClass, std::to_string(d.size()) + " rows cannot fill " + std::to_string(k) + " folds");
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t cursor = 0;
  for (EmotionLabel c : d.classes()) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < d.size(); ++i)
      if (d[i].label == c) idx.push_back(i);
    if (idx.size() < 2)
      throw Error(Errc::TooFewPerClass, "class '" + std::string(to_string(c)) + "' has fewer than 2 rows");
    detail::shuffle(idx, rng);
    for (std::size_t i : idx) {
      folds[cursor].push_back(i);
      cursor = (cursor + 1) % k;
    }
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

struct EvalReport {
  std::string classifier;  // display name
  std::uint64_t seed = 0;
  std::size_t folds = 0;
  std::vector<EmotionLabel> classes;
  std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
  std::vector<double> fold_accuracies;              // percent
  double accuracy = 0.0;                            // percent

  std::size_t total() const {
    std::size_t t = 0;
    for (const auto& r : confusion)
      for (std::size_t v : r) t += v;
    return t;
  }
  std::size_t correct() const {
    std::size_t t = 0;
    for (std::size_t i = 0; i < confusion.size(); ++i) t += confusion[i][i];
    return t;
  }
};

inline EvalReport cross_validate(const LabeledDataset& d, const ClassifierSpec& spec, std::size_t k,
                                 std::uint64_t seed) {
  const auto folds = stratified_kfold(d, k, seed);
  EvalReport rep;
  rep.classifier = std::string(display_name(spec.kind));
  rep.seed = seed;
  rep.folds = k;
  rep.classes = d.classes();
  const std::size_t nc = rep.classes.size();
  rep.confusion.assign(nc, std::vector<std::size_t>(nc, 0));
  auto class_pos = [&](EmotionLabel l) {
    return static_cast<std::size_t>(std::find(rep.classes.begin(), rep.classes.end(), l) - rep.classes.begin());
  };

  std::vector<char> held(d.size());
  for (std::size_t f = 0; f < k; ++f) {
    std::fill(held.begin(), held.end(), 0);
    for (std::size_t i : folds[f]) held[i] = 1;
    std::vector<std::size_t> train_idx;
    for (std::size_t i = 0; i < d.size(); ++i)
      if (!held[i]) train_idx.push_back(i);
    ClassifierSpec fold_spec = spec;
    fold_spec.smo.seed = spec.smo.seed ^ (seed + f);
    const ClassifierModel model = train_classifier(d.subset(train_idx), fold_spec);
    std::size_t correct = 0;
    for (std::size_t i : folds[f]) {
      const EmotionLabel p = predict(model, d[i].features);
      ++rep.confusion[class_pos(d[i].label)][class_pos(p)];
      if (p == d[i].label) ++correct;
    }
    rep.fold_accuracies.push_back(100.0 * double(correct) / double(folds[f].size()));
  }
  rep.accuracy = 100.0 * double(rep.correct()) / double(rep.total());
  return rep;
}

namespace detail {

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

inline std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.insert(0, w - s.size(), ' ');
  return s;
}

}  // namespace detail

/// Classifier-per-column accuracy table:
///
///   Classifier    NaiveBayes        SMO
///   Accuracy(%)      77.5862    56.0345
inline std::string format_table(std::span<const EvalReport> reports) {
  std::string head = "Classifier ";
  std::string acc = "Accuracy(%)";
  for (const auto& r : reports) {
    const std::string v = detail::fmt("%.4f", r.accuracy);
    const std::size_t w = std::max<std::size_t>({r.classifier.size(), v.size(), 10}) + 2;
    head += detail::pad(r.classifier, w);
    acc += detail::pad(v, w);
  }
  return head + "\n" + acc + "\n";
}

/// Line-oriented `key=value` form of a report.
inline std::string format_keyed(const EvalReport& r) {
  std::string out;
  out += "classifier=" + r.classifier + "\n";
  out += "seed=" + std::to_string(r.seed) + "\n";
  out += "folds=" + std::to_string(r.folds) + "\n";
  out += "total=" + std::to_string(r.total()) + "\n";
  out += "accuracy=" + detail::fmt("%.17g", r.accuracy) + "\n";
  out += "classes=";
  for (std::size_t i = 0; i < r.classes.size(); ++i) out += (i ? "," : "") + std::string(to_string(r.classes[i]));
  out += "\n";
  for (std::size_t i = 0; i < r.confusion.size(); ++i) {
    out += "confusion." + std::string(to_string(r.classes[i])) + "=";
    for (std::size_t j = 0; j < r.confusion[i].size(); ++j) out += (j ? "," : "") + std::to_string(r.confusion[i][j]);
    out += "\n";
  }
  out += "fold_accuracies=";
  for (std::size_t i = 0; i < r.fold_accuracies.size(); ++i)
    out += (i ? "," : "") + detail::fmt("%.17g", r.fold_accuracies[i]);
  out += "\n";
  return out;
}

}  // namespace gaitemo
