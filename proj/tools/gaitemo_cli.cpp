// Command-line front end: synth, extract, crossval, ablate, train, predict.

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "gaitemo/gaitemo.hpp"

namespace {

using namespace gaitemo;

const std::map<std::string, ClassifierKind> kClassifierNames = {{"gnb", ClassifierKind::Gnb},
                                                                {"svm", ClassifierKind::Svm}};

void add_feature_flags(CLI::App* cmd, FeatureOptions& f, int& joints, std::string& missing) {
  cmd->add_option("--joints", joints, "Joint set: 14 significant joints or all 25")
      ->check(CLI::IsMember({14, 25}))
      ->default_val(14);
  cmd->add_option("--missing-side", missing, "Walks lacking front or back segments: reject|zerofill")
      ->check(CLI::IsMember({"reject", "zerofill"}))
      ->default_val("reject");
  cmd->add_option("--min-segment", f.pipeline.min_segment_frames, "Minimum segment length in differenced frames")
      ->default_val(40);
  cmd->add_flag("--circular-phase", "Average phases on the circle instead of arithmetically");
}

void finish_feature_flags(const CLI::App* cmd, FeatureOptions& f, int joints, const std::string& missing) {
  f.pipeline.joint_set = joints == 25 ? JointSet::All25 : JointSet::Significant14;
  f.missing_side = missing == "zerofill" ? MissingSidePolicy::ZeroFill : MissingSidePolicy::Reject;
  if (cmd->count("--circular-phase") > 0) f.phases = PhaseAveraging::Circular;
}

void add_smo_flags(CLI::App* cmd, SmoOptions& smo) {
  cmd->add_option("--svm-c", smo.C, "SVM regularization C")->default_val(1.0);
  cmd->add_option("--svm-tol", smo.tol, "SMO KKT tolerance")->default_val(1e-3);
  cmd->add_option("--svm-passes", smo.max_passes, "SMO quiet sweeps before stopping")->default_val(10);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gait-based emotion recognition from skeleton streams"};
  app.require_subcommand(1);

  // synth
  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic two-class walk corpus");
  synth_cmd->add_option("--params", synth.params, "Corpus parameters (JSON)")->required();
  synth_cmd->add_option("--out", synth.out_dir, "Output directory")->required();
  synth_cmd->add_flag("--force", synth.force, "Write into a non-empty directory");

  // extract
  ExtractOptions extract;
  int extract_joints = 14;
  std::string extract_missing = "reject";
  auto* extract_cmd = app.add_subcommand("extract", "Compute one feature row per walk in a manifest");
  extract_cmd->add_option("--manifest", extract.manifest, "Manifest CSV")->required();
  extract_cmd->add_option("--out", extract.out, "Features CSV to write")->required();
  extract_cmd->add_option("--report", extract.report, "Per-walk status CSV to write");
  add_feature_flags(extract_cmd, extract.features, extract_joints, extract_missing);

  // crossval
  CrossvalOptions crossval;
  std::string crossval_classifier = "gnb";
  auto* crossval_cmd = app.add_subcommand("crossval", "Stratified k-fold accuracy of a classifier");
  crossval_cmd->add_option("--features", crossval.features, "Features CSV")->required();
  crossval_cmd->add_option("--classifier", crossval_classifier, "gnb|svm|all")
      ->check(CLI::IsMember({"gnb", "svm", "all"}))
      ->default_val("gnb");
  crossval_cmd->add_option("--folds", crossval.folds, "Number of folds")->default_val(10);
  crossval_cmd->add_option("--seed", crossval.seed, "Fold shuffling seed")->default_val(0);
  crossval_cmd->add_option("--out", crossval.out, "Keyed report to write");
  add_smo_flags(crossval_cmd, crossval.smo);

  // ablate
  AblateOptions ablate;
  int ablate_joints = 14;
  std::string ablate_missing = "reject";
  std::string ablate_classifier = "gnb";
  auto* ablate_cmd = app.add_subcommand("ablate", "Compare 14-joint and 25-joint pipelines");
  ablate_cmd->add_option("--manifest", ablate.manifest, "Manifest CSV")->required();
  ablate_cmd->add_option("--classifier", ablate_classifier, "gnb|svm")
      ->check(CLI::IsMember({"gnb", "svm"}))
      ->default_val("gnb");
  ablate_cmd->add_option("--folds", ablate.folds, "Number of folds")->default_val(10);
  ablate_cmd->add_option("--seed", ablate.seed, "Fold shuffling seed")->default_val(0);
  ablate_cmd->add_option("--out", ablate.out, "Keyed reports to write");
  add_feature_flags(ablate_cmd, ablate.features, ablate_joints, ablate_missing);
  add_smo_flags(ablate_cmd, ablate.smo);

  // train
  TrainOptions train;
  std::string train_classifier = "gnb";
  auto* train_cmd = app.add_subcommand("train", "Fit a classifier on a features CSV and save it");
  train_cmd->add_option("--features", train.features, "Features CSV")->required();
  train_cmd->add_option("--out", train.out, "Model file to write")->required();
  train_cmd->add_option("--classifier", train_classifier, "gnb|svm")
      ->check(CLI::IsMember({"gnb", "svm"}))
      ->default_val("gnb");
  add_smo_flags(train_cmd, train.smo);

  // predict
  PredictOptions predict_opt;
  auto* predict_cmd = app.add_subcommand("predict", "Label feature rows with a saved model");
  predict_cmd->add_option("--model", predict_opt.model, "Model file")->required();
  predict_cmd->add_option("--features", predict_opt.features, "Features CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInvalid;
  }

  if (*synth_cmd) return cmd_synth(synth, std::cout, std::cerr);
  if (*extract_cmd) {
    finish_feature_flags(extract_cmd, extract.features, extract_joints, extract_missing);
    return cmd_extract(extract, std::cout, std::cerr);
  }
  if (*crossval_cmd) {
    if (crossval_classifier == "all")
      crossval.classifiers = {ClassifierKind::Gnb, ClassifierKind::Svm};
    else
      crossval.classifiers = {kClassifierNames.at(crossval_classifier)};
    return cmd_crossval(crossval, std::cout, std::cerr);
  }
  if (*ablate_cmd) {
    finish_feature_flags(ablate_cmd, ablate.features, ablate_joints, ablate_missing);
    ablate.classifier = kClassifierNames.at(ablate_classifier);
    return cmd_ablate(ablate, std::cout, std::cerr);
  }
  if (*train_cmd) {
    train.classifier = kClassifierNames.at(train_classifier);
    return cmd_train(train, std::cout, std::cerr);
  }
  if (*predict_cmd) return cmd_predict(predict_opt, std::cout, std::cerr);
  return kExitInvalid;
}
