#include "chtn/checkpoint.hpp"

#include <cmath>
#include <string_view>

#include "binary_io.hpp"
#include "chtn/errors.hpp"

namespace chtn {
namespace {

constexpr std::string_view kMagic = "CHTNCKPT";
constexpr std::uint32_t kVersion = 1;
constexpr std::uint64_t kTensorCount = 20;

}  // namespace

std::string encode_checkpoint(const Params& params) {
  detail::ByteWriter w;
  const auto& c = params.config;
  w.bytes(kMagic);
  w.u32(kVersion);
  for (std::uint64_t v : {c.d_img_src, c.d_img_tgt, c.d_txt, c.hidden, c.c_src, c.c_tgt}) w.u64(v);
  w.u32(static_cast<std::uint32_t>(c.ablation));
  w.u64(params.generation);
  w.u64(kTensorCount);
  params.values.for_each([&](const std::string&, const Matrix& m) {
    w.u64(m.rows());
    w.u64(m.cols());
    for (double v : m.values()) w.f64(v);
  });
  return w.take();
}

Params decode_checkpoint(const std::string& bytes, const std::string& origin) {
  detail::ByteReader r(bytes, origin);
  if (r.bytes(kMagic.size()) != kMagic) r.fail("not a checkpoint (bad magic)");
  if (const auto v = r.u32(); v != kVersion) r.fail("unsupported checkpoint version " + std::to_string(v));

  NetworkConfig c;
  c.d_img_src = r.u64();
  c.d_img_tgt = r.u64();
  c.d_txt = r.u64();
  c.hidden = r.u64();
  c.c_src = r.u64();
  c.c_tgt = r.u64();
  const std::uint32_t ablation = r.u32();
  if (ablation > static_cast<std::uint32_t>(Ablation::NoSrcSp)) r.fail("unknown ablation code");
  c.ablation = static_cast<Ablation>(ablation);
  try {
    c.validate();
  } catch (const InvalidArgument& e) {
    r.fail(e.what());
  }

  Params p{c, ParamSet::zeros(c), r.u64()};
  if (r.u64() != kTensorCount) r.fail("unexpected tensor count");
  p.values.for_each([&](const std::string& name, Matrix& m) {
    const std::uint64_t rows = r.u64();
    const std::uint64_t cols = r.u64();
    if (rows != m.rows() || cols != m.cols()) r.fail("shape mismatch for " + name);
    for (double& v : m.values()) {
      v = r.f64();
      if (!std::isfinite(v)) r.fail("non-finite value in " + name);
    }
  });
  if (r.remaining() != 0) r.fail("trailing bytes after last tensor");
  return p;
}

void save_checkpoint(const std::filesystem::path& path, const Params& params) {
  detail::write_file(path.string(), encode_checkpoint(params));
}

Params load_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(detail::read_file(path.string()), path.string());
}

}  // namespace chtn
