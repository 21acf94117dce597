#include "chtn/gradcheck.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "chtn/errors.hpp"

namespace chtn {
namespace {

double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

double relative_error(std::span<const double> analytic, std::span<const double> numeric) {
  double diff = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double d = analytic[i] - numeric[i];
    diff += d * d;
  }
  const double scale = std::max(norm(analytic), norm(numeric));
  if (scale == 0.0) return 0.0;
  return std::sqrt(diff) / scale;
}

// Central differences of the weighted total over every parameter entry.
Gradients numeric_gradients(const GradcheckProblem& p, const LossWeights& w, double step) {
  Params probe = p.params;
  Gradients out = ParamSet::zeros(p.params.config);
  std::vector<Matrix*> slots;
  probe.values.for_each([&](const std::string&, Matrix& m) { slots.push_back(&m); });
  std::vector<Matrix*> outs;
  out.for_each([&](const std::string&, Matrix& m) { outs.push_back(&m); });

  for (std::size_t b = 0; b < slots.size(); ++b) {
    auto values = slots[b]->values();
    auto grads = outs[b]->values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + step;
      const double up = objective_value(probe, p.batch, p.kernels, w).total;
      values[i] = saved - step;
      const double down = objective_value(probe, p.batch, p.kernels, w).total;
      values[i] = saved;
      grads[i] = (up - down) / (2.0 * step);
    }
  }
  return out;
}

TermReport check_term(const GradcheckProblem& p, const std::string& term, const LossWeights& w,
                      double step, double corrupt) {
  Gradients analytic;
  objective_gradients(p.params, p.batch, p.kernels, w, analytic);
  if (corrupt != 0.0) {
    analytic.for_each([&](const std::string&, Matrix& m) { m *= 1.0 + corrupt; });
  }
  const Gradients numeric = numeric_gradients(p, w, step);

  std::vector<std::span<const double>> num_blocks;
  numeric.for_each([&](const std::string&, const Matrix& m) { num_blocks.push_back(m.values()); });

  TermReport report{term, 0.0, "", {}};
  std::size_t i = 0;
  analytic.for_each([&](const std::string& name, const Matrix& m) {
    const double err = relative_error(m.values(), num_blocks[i++]);
    report.blocks.push_back({name, err});
    if (err > report.max_rel_error || report.worst_block.empty()) {
      report.max_rel_error = std::max(report.max_rel_error, err);
      report.worst_block = name;
    }
  });
  return report;
}

}  // namespace

GradcheckSpec parse_gradcheck_dims(const std::string& text) {
  GradcheckSpec spec;
  std::map<std::string, std::size_t*> fields = {
      {"d_src", &spec.d_src},   {"d_img", &spec.d_img}, {"d_txt", &spec.d_txt},
      {"hidden", &spec.hidden}, {"c_src", &spec.c_src}, {"c_tgt", &spec.c_tgt},
      {"batch", &spec.batch}};
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw InvalidArgument("dims: expected key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    if (key == "ablation") {
      spec.ablation = parse_ablation(value);
      continue;
    }
    auto it = fields.find(key);
    if (it == fields.end()) throw InvalidArgument("dims: unknown key '" + key + "'");
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
      throw InvalidArgument("dims: invalid value for '" + key + "'");
    }
    *it->second = v;
  }
  if (spec.batch < 2) throw InvalidArgument("dims: batch must be >= 2 for the MMD bandwidth");
  return spec;
}

double GradcheckReport::max_rel_error() const {
  double m = 0.0;
  for (const auto& t : terms) m = std::max(m, t.max_rel_error);
  return m;
}

std::string GradcheckReport::worst() const {
  const TermReport* worst = nullptr;
  for (const auto& t : terms) {
    if (!worst || t.max_rel_error > worst->max_rel_error) worst = &t;
  }
  return worst ? worst->term + "/" + worst->worst_block : "";
}

GradcheckProblem make_gradcheck_problem(const GradcheckSpec& spec, std::uint64_t seed) {
  NetworkConfig cfg;
  cfg.d_img_src = spec.d_src;
  cfg.d_img_tgt = spec.d_img;
  cfg.d_txt = spec.d_txt;
  cfg.hidden = spec.hidden;
  cfg.c_src = spec.c_src;
  cfg.c_tgt = spec.c_tgt;
  cfg.ablation = spec.ablation;
  cfg.validate();

  Rng rng(seed);
  GradcheckProblem p{init_params(cfg, rng), {}, {}};
  const std::size_t count = p.params.values.parameter_count();
  if (count > GradcheckSpec::kMaxParameters) {
    throw InvalidArgument("gradcheck: " + std::to_string(count) + " parameters exceeds the limit of " +
                          std::to_string(GradcheckSpec::kMaxParameters));
  }
  // Non-zero biases, and target weights that differ from the source ones,
  // so every code path carries signal.
  p.params.values.for_each([&](const std::string& name, Matrix& m) {
    const bool bias = name.ends_with(".bias");
    for (double& v : m.values()) v += rng.normal(0.0, bias ? 0.3 : 0.1);
  });

  auto features = [&](std::size_t rows, std::size_t cols) {
    Matrix m(rows, cols);
    for (double& v : m.values()) v = rng.normal();
    return m;
  };
  p.batch.src_x = features(spec.batch, spec.d_src);
  p.batch.img_x = features(spec.batch, spec.d_img);
  p.batch.txt_x = features(spec.batch, spec.d_txt);
  for (std::size_t i = 0; i < spec.batch; ++i) {
    p.batch.src_y.push_back(rng.below(spec.c_src));
    p.batch.tgt_y.push_back(rng.below(spec.c_tgt));
  }
  p.kernels = Objective(p.params, p.batch).median_kernels(KernelSpec::default_multipliers());
  return p;
}

GradcheckReport run_gradcheck(const GradcheckSpec& spec, std::uint64_t seed, double step,
                              double corrupt) {
  const GradcheckProblem p = make_gradcheck_problem(spec, seed);
  GradcheckReport report;
  report.parameter_count = p.params.values.parameter_count();
  const std::pair<const char*, LossWeights> cases[] = {
      {"single", {1.0, 0.0, 0.0, 0.0}},
      {"source", {0.0, 1.0, 0.0, 0.0}},
      {"cross", {0.0, 0.0, 1.0, 0.0}},
      {"correlation", {0.0, 0.0, 0.0, 1.0}},
      {"total", LossWeights{}},
  };
  for (const auto& [term, w] : cases) {
    report.terms.push_back(check_term(p, term, w, step, corrupt));
  }
  return report;
}

}  // namespace chtn
