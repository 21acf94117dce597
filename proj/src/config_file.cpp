#include "chtn/config_file.hpp"

#include <charconv>
#include <optional>
#include <set>
#include <sstream>

#include "binary_io.hpp"
#include "chtn/errors.hpp"

namespace chtn {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

// Typed access that remembers which keys were consumed.
class KeyValueReader {
 public:
  explicit KeyValueReader(const KeyValueFile& f) : f_(f) {}

  void count(const char* key, std::size_t& out) {
    if (auto v = take(key)) {
      std::size_t x = 0;
      auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), x);
      if (ec != std::errc() || ptr != v->data() + v->size()) fail(key, "expected a non-negative integer");
      out = x;
    }
  }
  void u64(const char* key, std::uint64_t& out) {
    std::size_t x = out;
    count(key, x);
    out = x;
  }
  void real(const char* key, double& out) {
    if (auto v = take(key)) out = parse_real(key, *v);
  }
  void flag(const char* key, bool& out) {
    if (auto v = take(key)) {
      if (*v == "true" || *v == "1" || *v == "yes") out = true;
      else if (*v == "false" || *v == "0" || *v == "no") out = false;
      else fail(key, "expected true or false");
    }
  }
  void reals(const char* key, std::vector<double>& out) {
    if (auto v = take(key)) {
      out.clear();
      std::stringstream ss(*v);
      std::string item;
      while (std::getline(ss, item, ',')) out.push_back(parse_real(key, trim(item)));
      if (out.empty()) fail(key, "expected a comma-separated list");
    }
  }
  void ablation(const char* key, Ablation& out) {
    if (auto v = take(key)) {
      try {
        out = parse_ablation(*v);
      } catch (const InvalidArgument& e) {
        fail(key, e.what());
      }
    }
  }

  void reject_unknown() const {
    for (const auto& [k, v] : f_.entries_) {
      if (!used_.count(k)) throw ParseError(f_.origin_, f_.lines_.at(k), "unknown key '" + k + "'");
    }
  }

 private:
  std::optional<std::string> take(const char* key) {
    used_.insert(key);
    auto it = f_.entries_.find(key);
    if (it == f_.entries_.end()) return std::nullopt;
    return it->second;
  }
  double parse_real(const char* key, const std::string& v) {
    double x = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size()) fail(key, "expected a real number");
    return x;
  }
  [[noreturn]] void fail(const char* key, const std::string& what) const {
    throw ParseError(f_.origin_, f_.lines_.at(key), std::string(key) + ": " + what);
  }

  const KeyValueFile& f_;
  std::set<std::string> used_;
};

KeyValueFile KeyValueFile::parse(const std::string& text, const std::string& origin) {
  KeyValueFile f;
  f.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(origin, line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(origin, line_no, "empty key");
    if (f.entries_.count(key)) throw ParseError(origin, line_no, "duplicate key '" + key + "'");
    f.entries_[key] = value;
    f.lines_[key] = line_no;
  }
  return f;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  return parse(detail::read_file(path.string()), path.string());
}

RunConfig parse_run_config(const KeyValueFile& file) {
  RunConfig cfg;
  TrainConfig& t = cfg.train;
  KeyValueReader r(file);
  r.real("lr", t.lr);
  r.count("iterations", t.iterations);
  r.count("batch_src", t.batch_src);
  r.count("batch_tgt", t.batch_tgt);
  r.u64("seed", t.seed);
  r.count("hidden", cfg.hidden);
  r.real("w_single", t.weights.single);
  r.real("w_source", t.weights.source);
  r.real("w_cross", t.weights.cross);
  r.real("w_corr", t.weights.correlation);
  r.ablation("ablation", t.ablation);
  r.flag("bandwidth_refresh", t.bandwidth_refresh);
  r.reals("kernel_multipliers", t.kernel_multipliers);
  r.count("lr_decay_every", t.lr_decay_every);
  r.real("lr_decay_factor", t.lr_decay_factor);
  r.count("checkpoint_every", t.checkpoint_every);
  r.reject_unknown();
  if (cfg.hidden == 0) throw InvalidArgument(file.origin() + ": hidden must be >= 1");
  t.validate();
  return cfg;
}

std::string format_run_config(const RunConfig& cfg) {
  const TrainConfig& t = cfg.train;
  std::string mult;
  for (double m : t.kernel_multipliers) mult += (mult.empty() ? "" : ",") + fmt_double(m);
  std::ostringstream o;
  o << "lr = " << fmt_double(t.lr) << "\n"
    << "iterations = " << t.iterations << "\n"
    << "batch_src = " << t.batch_src << "\n"
    << "batch_tgt = " << t.batch_tgt << "\n"
    << "seed = " << t.seed << "\n"
    << "hidden = " << cfg.hidden << "\n"
    << "w_single = " << fmt_double(t.weights.single) << "\n"
    << "w_source = " << fmt_double(t.weights.source) << "\n"
    << "w_cross = " << fmt_double(t.weights.cross) << "\n"
    << "w_corr = " << fmt_double(t.weights.correlation) << "\n"
    << "ablation = " << to_string(t.ablation) << "\n"
    << "bandwidth_refresh = " << (t.bandwidth_refresh ? "true" : "false") << "\n"
    << "kernel_multipliers = " << mult << "\n"
    << "lr_decay_every = " << t.lr_decay_every << "\n"
    << "lr_decay_factor = " << fmt_double(t.lr_decay_factor) << "\n"
    << "checkpoint_every = " << t.checkpoint_every << "\n";
  return o.str();
}

SynthConfig parse_synth_config(const KeyValueFile& file) {
  SynthConfig c;
  KeyValueReader r(file);
  r.count("c_tgt", c.c_tgt);
  r.count("c_src", c.c_src);
  r.count("overlap", c.overlap);
  r.count("d_latent", c.d_latent);
  r.count("d_img", c.d_img);
  r.count("d_txt", c.d_txt);
  r.real("noise_sigma", c.noise_sigma);
  r.real("source_shift", c.source_shift);
  r.count("n_train", c.n_train);
  r.count("n_test", c.n_test);
  r.count("n_src", c.n_src);
  r.u64("seed", c.seed);
  r.reject_unknown();
  c.validate();
  return c;
}

std::string format_synth_config(const SynthConfig& c) {
  std::ostringstream o;
  o << "c_tgt = " << c.c_tgt << "\n"
    << "c_src = " << c.c_src << "\n"
    << "overlap = " << c.overlap << "\n"
    << "d_latent = " << c.d_latent << "\n"
    << "d_img = " << c.d_img << "\n"
    << "d_txt = " << c.d_txt << "\n"
    << "noise_sigma = " << fmt_double(c.noise_sigma) << "\n"
    << "source_shift = " << fmt_double(c.source_shift) << "\n"
    << "n_train = " << c.n_train << "\n"
    << "n_test = " << c.n_test << "\n"
    << "n_src = " << c.n_src << "\n"
    << "seed = " << c.seed << "\n";
  return o.str();
}

}  // namespace chtn
