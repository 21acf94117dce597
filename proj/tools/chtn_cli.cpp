// chtn: batch front end for the hybrid transfer network.
//
//   chtn synth     --config PATH --out DIR
//   chtn train     --src PATH --tgt-img PATH --tgt-txt PATH --config PATH --out CKPT
//   chtn eval      --checkpoint PATH --test-img PATH --test-txt PATH --labels PATH --out CSV
//   chtn gradcheck --seed N --dims SPEC
//   chtn report    --inputs A.csv B.csv ... [--names ...] [--out PATH]
//
// Exit codes: 0 success, 2 input/config error, 3 numerical divergence,
// 4 gradient check failure.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "chtn/checkpoint.hpp"
#include "chtn/config_file.hpp"
#include "chtn/dataset.hpp"
#include "chtn/errors.hpp"
#include "chtn/gradcheck.hpp"
#include "chtn/retrieval.hpp"
#include "chtn/synth.hpp"
#include "chtn/trainer.hpp"

namespace fs = std::filesystem;
using namespace chtn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitDiverged = 3;
constexpr int kExitGradcheck = 4;
constexpr double kGradcheckTolerance = 1e-5;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::string history_csv(const TrainLog& log) {
  std::string out = "iter,single,source,cross,correlation,total\n";
  char buf[256];
  for (std::size_t i = 0; i < log.history.size(); ++i) {
    const auto& b = log.history[i];
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n", i + 1, b.single,
                  b.source, b.cross, b.correlation, b.total);
    out += buf;
  }
  return out;
}

// --- synth -----------------------------------------------------------------

struct SynthArgs {
  std::string config;
  std::string out;
  std::string format = "csv";
};

int run_synth(const SynthArgs& a) {
  const SynthConfig cfg =
      a.config.empty() ? SynthConfig{} : parse_synth_config(KeyValueFile::load(a.config));
  cfg.validate();
  const FileFormat fmt = a.format == "bin" ? FileFormat::Binary : FileFormat::Csv;
  const std::string ext = fmt == FileFormat::Binary ? ".bin" : ".csv";

  const SynthSplit data = generate_synthetic_split(cfg);
  const fs::path dir(a.out);
  fs::create_directories(dir);
  save_features(dir / ("source" + ext), data.source, fmt);
  save_features(dir / ("target_img" + ext), data.train.img, fmt);
  save_features(dir / ("target_txt" + ext), data.train.txt, fmt);
  if (cfg.n_test > 0) {
    save_matrix(dir / ("test_img" + ext), data.test.img, fmt);
    save_matrix(dir / ("test_txt" + ext), data.test.txt, fmt);
    save_labels(dir / "test_labels.csv", data.test.labels, data.test.class_count);
  }
  write_text(dir / "synth.cfg", format_synth_config(cfg));

  std::cout << "source:     " << data.source.size() << " x " << data.source.dim() << ", "
            << data.source.class_count << " classes\n"
            << "target:     " << data.train.size() << " pairs (img " << data.train.img.dim()
            << ", txt " << data.train.txt.dim() << "), " << data.train.img.class_count
            << " classes\n"
            << "test:       " << data.test.labels.size() << " pairs\n"
            << "written to: " << dir.string() << "\n";
  return kExitOk;
}

// --- train -----------------------------------------------------------------

struct TrainArgs {
  std::string src, tgt_img, tgt_txt, config, out, history, ablation;
  std::optional<std::size_t> iterations;
  std::optional<std::uint64_t> seed;
};

int run_train(const TrainArgs& a) {
  RunConfig run = a.config.empty() ? RunConfig{} : parse_run_config(KeyValueFile::load(a.config));
  if (!a.ablation.empty()) run.train.ablation = parse_ablation(a.ablation);
  if (a.iterations) run.train.iterations = *a.iterations;
  if (a.seed) run.train.seed = *a.seed;
  run.train.validate();

  const Dataset source = load_features(a.src);
  PairedDataset target;
  target.img = load_features(a.tgt_img);
  target.txt = load_features(a.tgt_txt);
  target.validate();

  const NetworkConfig net = make_network_config(source, target, run.hidden, run.train.ablation);
  const fs::path out(a.out);
  const fs::path history = a.history.empty() ? fs::path(a.out + ".history.csv") : fs::path(a.history);

  CheckpointHook hook = [&](std::size_t it, const Params& p) {
    save_checkpoint(fs::path(a.out + ".iter" + std::to_string(it)), p);
  };

  TrainResult result;
  try {
    result = train(source, target, net, run.train, hook);
  } catch (const DivergenceError& e) {
    std::cerr << "error: training diverged: " << e.what() << "\n";
    return kExitDiverged;
  }
  save_checkpoint(out, result.params);
  write_text(history, history_csv(result.log));

  std::cout << "ablation:   " << to_string(net.ablation) << "\n"
            << "iterations: " << run.train.iterations << "\n"
            << "parameters: " << result.params.values.parameter_count() << "\n";
  if (!result.log.history.empty()) {
    const auto& first = result.log.history.front();
    const auto& last = result.log.history.back();
    std::cout << std::setprecision(6) << "loss:       " << first.total << " -> " << last.total
              << "\n";
  }
  std::cout << "wall time:  " << std::fixed << std::setprecision(2) << result.log.wall_seconds
            << " s\n"
            << "checkpoint: " << out.string() << "\n"
            << "history:    " << history.string() << "\n";
  return kExitOk;
}

// --- eval ------------------------------------------------------------------

struct EvalArgs {
  std::string checkpoint, test_img, test_txt, labels, out, ap_dump, name = "CHTN";
  bool oracle_onehot = false;
};

Matrix one_hot(const Labels& labels, std::size_t classes) {
  Matrix m(labels.size(), classes);
  for (std::size_t i = 0; i < labels.size(); ++i) m(i, labels[i]) = 1.0;
  return m;
}

int run_eval(const EvalArgs& a) {
  const Params params = load_checkpoint(a.checkpoint);
  const Matrix img = load_matrix(a.test_img);
  const Matrix txt = load_matrix(a.test_txt);
  const LabelFile labels = load_labels(a.labels);
  if (img.rows() != labels.labels.size() || txt.rows() != labels.labels.size()) {
    throw InvalidArgument("eval: test features and labels differ in row count");
  }
  if (labels.class_count != params.config.c_tgt) {
    throw InvalidArgument("eval: label file has " + std::to_string(labels.class_count) +
                          " classes, checkpoint expects " + std::to_string(params.config.c_tgt));
  }

  Matrix img_reps, txt_reps;
  if (a.oracle_onehot) {
    img_reps = one_hot(labels.labels, labels.class_count);
    txt_reps = img_reps;
  } else {
    img_reps = common_representation(img, Modality::Image, params);
    txt_reps = common_representation(txt, Modality::Text, params);
  }
  const RetrievalReport report =
      evaluate_retrieval(img_reps, txt_reps, labels.labels, labels.labels);
  write_text(a.out, report_csv(report));
  if (!a.ap_dump.empty()) write_text(a.ap_dump, per_query_csv(report));
  print_report_table(std::cout, report, a.name);
  return kExitOk;
}

// --- gradcheck -------------------------------------------------------------

struct GradcheckArgs {
  std::uint64_t seed = 1;
  std::string dims;
  double corrupt = 0.0;
};

int run_gradcheck_cmd(const GradcheckArgs& a) {
  const GradcheckSpec spec = parse_gradcheck_dims(a.dims);
  const GradcheckReport report = run_gradcheck(spec, a.seed, 1e-5, a.corrupt);
  std::cout << "parameters: " << report.parameter_count << "  ablation: " << to_string(spec.ablation)
            << "  seed: " << a.seed << "\n\n";
  std::cout << std::left << std::setw(14) << "term" << std::setw(14) << "max rel err"
            << "worst block\n";
  for (const auto& t : report.terms) {
    std::cout << std::setw(14) << t.term << std::setw(14) << std::scientific
              << std::setprecision(3) << t.max_rel_error << t.worst_block << "\n";
  }
  std::cout << "\nper block (total):\n";
  for (const auto& b : report.terms.back().blocks) {
    std::cout << "  " << std::setw(28) << b.block << std::scientific << std::setprecision(3)
              << b.rel_error << "\n";
  }
  const double worst = report.max_rel_error();
  if (!(worst < kGradcheckTolerance)) {
    std::cout << "\nFAIL: worst offender " << report.worst() << " rel err " << worst
              << " >= " << kGradcheckTolerance << "\n";
    return kExitGradcheck;
  }
  std::cout << "\nPASS: all relative errors < " << kGradcheckTolerance << "\n";
  return kExitOk;
}

// --- report ----------------------------------------------------------------

struct ReportArgs {
  std::vector<std::string> inputs;
  std::vector<std::string> names;
  std::string out;
};

int run_report(const ReportArgs& a) {
  if (!a.names.empty() && a.names.size() != a.inputs.size()) {
    throw InvalidArgument("report: --names must match --inputs in count");
  }
  std::vector<ReportRow> rows;
  for (std::size_t i = 0; i < a.inputs.size(); ++i) {
    const std::string name = a.names.empty() ? fs::path(a.inputs[i]).stem().string() : a.names[i];
    rows.push_back(load_report_csv(a.inputs[i], name));
  }
  print_comparison_table(std::cout, rows);
  if (!a.out.empty()) {
    std::string csv = "method,image_to_text,text_to_image,average\n";
    char buf[128];
    for (const auto& r : rows) {
      std::snprintf(buf, sizeof(buf), ",%.6f,%.6f,%.6f\n", r.img2txt, r.txt2img, r.average);
      csv += r.method + buf;
    }
    write_text(a.out, csv);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-modal hybrid transfer network: synthesize, train, evaluate"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic source + paired target dataset");
  synth_cmd->add_option("--config", synth.config, "Synthetic data config file (key = value)");
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();
  synth_cmd->add_option("--format", synth.format, "File encoding")
      ->check(CLI::IsMember({"csv", "bin"}));

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Train the network and write a checkpoint");
  train_cmd->add_option("--src", tr.src, "Source image dataset")->required();
  train_cmd->add_option("--tgt-img", tr.tgt_img, "Target image dataset")->required();
  train_cmd->add_option("--tgt-txt", tr.tgt_txt, "Target text dataset (row-paired)")->required();
  train_cmd->add_option("--config", tr.config, "Training config file (key = value)");
  train_cmd->add_option("--out", tr.out, "Checkpoint path")->required();
  train_cmd->add_option("--history", tr.history, "Loss history CSV (default: <out>.history.csv)");
  train_cmd->add_option("--ablation", tr.ablation, "full | only-cross | no-share | no-src-sp");
  train_cmd->add_option("--iterations", tr.iterations, "Override the configured iteration count");
  train_cmd->add_option("--seed", tr.seed, "Override the configured seed");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Score cross-modal retrieval on a test split");
  eval_cmd->add_option("--checkpoint", ev.checkpoint, "Checkpoint path")->required();
  eval_cmd->add_option("--test-img", ev.test_img, "Test image features")->required();
  eval_cmd->add_option("--test-txt", ev.test_txt, "Test text features")->required();
  eval_cmd->add_option("--labels", ev.labels, "Test pair labels")->required();
  eval_cmd->add_option("--out", ev.out, "Report CSV (task,map)")->required();
  eval_cmd->add_option("--ap-dump", ev.ap_dump, "Per-query AP CSV");
  eval_cmd->add_option("--name", ev.name, "Method name for the printed table");
  eval_cmd->add_flag("--oracle-onehot", ev.oracle_onehot,
                     "Debug: score one-hot label vectors instead of network outputs");

  GradcheckArgs gc;
  auto* gc_cmd = app.add_subcommand("gradcheck", "Compare analytic gradients with central differences");
  gc_cmd->add_option("--seed", gc.seed, "Random instance seed");
  gc_cmd->add_option("--dims", gc.dims,
                     "Toy dims, e.g. d_src=4,d_img=4,d_txt=3,hidden=4,c_src=3,c_tgt=3,batch=3,ablation=full");
  gc_cmd->add_option("--corrupt", gc.corrupt, "Debug: scale analytic gradients by (1 + x)");

  ReportArgs rep;
  auto* report_cmd = app.add_subcommand("report", "Combine eval reports into one comparison table");
  report_cmd->add_option("--inputs", rep.inputs, "Report CSVs written by eval")->required();
  report_cmd->add_option("--names", rep.names, "Row names (default: file stems)");
  report_cmd->add_option("--out", rep.out, "Write the combined table as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*synth_cmd) return run_synth(synth);
    if (*train_cmd) return run_train(tr);
    if (*eval_cmd) return run_eval(ev);
    if (*gc_cmd) return run_gradcheck_cmd(gc);
    if (*report_cmd) return run_report(rep);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
