#include <gtest/gtest.h>

#include <filesystem>

#include "chtn/checkpoint.hpp"
#include "chtn/config_file.hpp"
#include "chtn/errors.hpp"
#include "chtn/rng.hpp"

using namespace chtn;
namespace fs = std::filesystem;

namespace {

Params sample_params(Ablation ab = Ablation::Full) {
  NetworkConfig c;
  c.d_img_src = 5;
  c.d_img_tgt = 4;
  c.d_txt = 3;
  c.hidden = 6;
  c.c_src = 3;
  c.c_tgt = 2;
  c.ablation = ab;
  Rng r(12);
  Params p = init_params(c, r);
  p.values.for_each([&](const std::string&, Matrix& m) {
    for (double& v : m.values()) v += r.normal(0.0, 1e-3);
  });
  p.generation = 42;
  return p;
}

}  // namespace

TEST(Checkpoint, RoundTripIsIdentity) {
  for (auto ab : {Ablation::Full, Ablation::OnlyCross, Ablation::NoShare, Ablation::NoSrcSp}) {
    const Params p = sample_params(ab);
    const Params q = decode_checkpoint(encode_checkpoint(p));
    EXPECT_EQ(q.config, p.config);
    EXPECT_EQ(q.values, p.values);
    EXPECT_EQ(q.generation, p.generation);
  }
  const fs::path path = fs::temp_directory_path() / "chtn_ckpt_test.bin";
  save_checkpoint(path, sample_params());
  EXPECT_EQ(encode_checkpoint(load_checkpoint(path)), encode_checkpoint(sample_params()));
}

TEST(Checkpoint, CorruptionDetected) {
  const std::string good = encode_checkpoint(sample_params());
  std::string bad_magic = good;
  bad_magic[0] = 'X';
  EXPECT_THROW(decode_checkpoint(bad_magic), ParseError);
  EXPECT_THROW(decode_checkpoint(good.substr(0, good.size() - 1)), ParseError);
  EXPECT_THROW(decode_checkpoint(good + "x"), ParseError);
  std::string bad_version = good;
  bad_version[8] = 9;
  EXPECT_THROW(decode_checkpoint(bad_version), ParseError);
}

TEST(RunConfig, ParsesFixture) {
  const RunConfig c = parse_run_config(KeyValueFile::load(fs::path(CHTN_FIXTURE_DIR) / "run.cfg"));
  EXPECT_EQ(c.train.lr, 0.02);
  EXPECT_EQ(c.train.iterations, 30u);
  EXPECT_EQ(c.train.seed, 3u);
  EXPECT_EQ(c.hidden, 16u);
  EXPECT_EQ(c.train.ablation, Ablation::NoShare);
  EXPECT_EQ(c.train.kernel_multipliers, (std::vector<double>{0.5, 1, 2}));
  EXPECT_EQ(c.train.weights.single, 1.0);
}

TEST(RunConfig, FormatRoundTrips) {
  RunConfig c;
  c.train.lr = 0.003;
  c.train.ablation = Ablation::NoSrcSp;
  c.train.bandwidth_refresh = false;
  c.hidden = 9;
  const RunConfig d = parse_run_config(KeyValueFile::parse(format_run_config(c), "mem"));
  EXPECT_EQ(format_run_config(d), format_run_config(c));
}

TEST(RunConfig, ErrorsCarryLineNumbers) {
  try {
    parse_run_config(KeyValueFile::parse("lr = 0.1\n\nbatch_size = 3\n", "cfg"));
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.location(), 3u);
  }
  EXPECT_THROW(KeyValueFile::parse("lr = 1\nlr = 2\n", "cfg"), ParseError);
  EXPECT_THROW(KeyValueFile::parse("just text\n", "cfg"), ParseError);
  EXPECT_THROW(parse_run_config(KeyValueFile::parse("iterations = -4\n", "cfg")), ParseError);
  EXPECT_THROW(parse_run_config(KeyValueFile::parse("ablation = most\n", "cfg")), ParseError);
  EXPECT_THROW(parse_run_config(KeyValueFile::parse("lr = 0\n", "cfg")), InvalidArgument);
}

TEST(SynthConfigFile, RoundTrips) {
  const SynthConfig c =
      parse_synth_config(KeyValueFile::load(fs::path(CHTN_FIXTURE_DIR) / "synth_small.cfg"));
  EXPECT_EQ(c.n_train, 80u);
  EXPECT_EQ(c.d_txt, 10u);
  EXPECT_EQ(c.c_tgt, 4u);
  const SynthConfig d = parse_synth_config(KeyValueFile::parse(format_synth_config(c), "mem"));
  EXPECT_EQ(format_synth_config(d), format_synth_config(c));
  EXPECT_THROW(parse_synth_config(KeyValueFile::parse("overlap = 9\n", "cfg")), InvalidArgument);
}
