#include "chtn/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>
#include <vector>

#include "binary_io.hpp"
#include "chtn/errors.hpp"

namespace chtn {

namespace detail {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace detail

namespace {

constexpr std::string_view kDatasetMagic = "CHTNDSET";
constexpr std::string_view kMatrixMagic = "CHTNMATX";
constexpr std::uint32_t kBinaryVersion = 1;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

// Line-oriented CSV reader that tracks 1-based line numbers for errors.
class CsvReader {
 public:
  CsvReader(const std::string& text, std::string origin)
      : stream_(text), origin_(std::move(origin)) {}

  // Next non-blank, non-comment line split on commas; false at EOF.
  bool next(std::vector<std::string_view>& fields) {
    while (std::getline(stream_, line_)) {
      ++line_no_;
      std::string_view view = trim(line_);
      if (view.empty() || view.front() == '#') continue;
      fields.clear();
      std::size_t start = 0;
      while (true) {
        const std::size_t comma = view.find(',', start);
        fields.push_back(trim(view.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
      }
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(origin_, line_no_, what);
  }

  std::size_t to_count(std::string_view field, const char* what) const {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
      fail(std::string("invalid ") + what + " '" + std::string(field) + "'");
    }
    return v;
  }

  double to_double(std::string_view field) const {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v)) {
      fail("invalid value '" + std::string(field) + "'");
    }
    return v;
  }

  std::size_t line() const { return line_no_; }

 private:
  std::istringstream stream_;
  std::string origin_;
  std::string line_;
  std::size_t line_no_ = 0;
};

void append_double(std::string& out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

void append_count(std::string& out, std::size_t v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

std::vector<std::string_view> header(CsvReader& csv, std::size_t fields_expected,
                                     const char* layout) {
  std::vector<std::string_view> fields;
  if (!csv.next(fields)) csv.fail(std::string("missing header '") + layout + "'");
  if (fields.size() != fields_expected) {
    csv.fail(std::string("header must be '") + layout + "'");
  }
  return fields;
}

Matrix read_matrix_rows(CsvReader& csv, std::size_t n, std::size_t d, std::size_t lead,
                        Labels* labels, std::size_t class_count) {
  Matrix m(n, d);
  std::vector<std::string_view> fields;
  for (std::size_t i = 0; i < n; ++i) {
    if (!csv.next(fields)) {
      csv.fail("expected " + std::to_string(n) + " rows, found " + std::to_string(i));
    }
    if (fields.size() != d + lead) {
      csv.fail("row has " + std::to_string(fields.size()) + " fields, expected " +
               std::to_string(d + lead));
    }
    if (labels) {
      const std::size_t y = csv.to_count(fields[0], "label");
      if (y >= class_count) {
        csv.fail("label " + std::to_string(y) + " out of range [0, " +
                 std::to_string(class_count) + ")");
      }
      labels->push_back(y);
    }
    auto row = m.row(i);
    for (std::size_t j = 0; j < d; ++j) row[j] = csv.to_double(fields[lead + j]);
  }
  if (csv.next(fields)) csv.fail("unexpected extra row");
  return m;
}

bool has_magic(const std::string& bytes, std::string_view magic) {
  return bytes.size() >= magic.size() && std::string_view(bytes).substr(0, magic.size()) == magic;
}

void read_binary_header(detail::ByteReader& r, std::string_view magic) {
  if (r.bytes(magic.size()) != magic) r.fail("bad magic");
  const std::uint32_t version = r.u32();
  if (version != kBinaryVersion) r.fail("unsupported version " + std::to_string(version));
}

Matrix read_binary_values(detail::ByteReader& r, std::uint64_t n, std::uint64_t d) {
  if (n == 0 || d == 0) r.fail("empty matrix");
  if (r.remaining() / 8 / n < d) r.fail("truncated file: fewer values than the header declares");
  std::vector<double> values(n * d);
  for (double& v : values) {
    v = r.f64();
    if (!std::isfinite(v)) r.fail("non-finite value");
  }
  if (r.remaining() != 0) r.fail("trailing bytes after data");
  return Matrix(n, d, std::move(values));
}

}  // namespace

void Dataset::validate() const {
  if (features.rows() == 0) throw InvalidArgument("Dataset: no samples");
  if (labels.size() != features.rows()) {
    throw InvalidArgument("Dataset: " + std::to_string(labels.size()) + " labels for " +
                          std::to_string(features.rows()) + " rows");
  }
  for (std::size_t y : labels) {
    if (y >= class_count) {
      throw InvalidArgument("Dataset: label " + std::to_string(y) + " out of range [0, " +
                            std::to_string(class_count) + ")");
    }
  }
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out{gather_rows(features, rows), {}, class_count};
  out.labels.reserve(rows.size());
  for (std::size_t r : rows) out.labels.push_back(labels.at(r));
  return out;
}

void PairedDataset::validate() const {
  img.validate();
  txt.validate();
  if (img.size() != txt.size()) {
    throw InvalidArgument("PairedDataset: image and text sets differ in size");
  }
  if (img.labels != txt.labels || img.class_count != txt.class_count) {
    throw InvalidArgument("PairedDataset: paired image and text labels disagree");
  }
  if (unlabeled_img.rows() != unlabeled_txt.rows()) {
    throw InvalidArgument("PairedDataset: unlabeled image and text sets differ in size");
  }
}

SplitResult split(const PairedDataset& paired, std::size_t train_n, std::size_t test_n,
                  Rng& rng) {
  paired.validate();
  if (train_n == 0 || train_n + test_n > paired.size()) {
    throw InvalidArgument("split: requested " + std::to_string(train_n) + " + " +
                          std::to_string(test_n) + " pairs from " +
                          std::to_string(paired.size()));
  }
  const auto perm = rng.permutation(paired.size());
  std::vector<std::size_t> train_rows(perm.begin(), perm.begin() + train_n);
  std::vector<std::size_t> test_rows(perm.begin() + train_n, perm.begin() + train_n + test_n);

  SplitResult out;
  out.train.img = paired.img.subset(train_rows);
  out.train.txt = paired.txt.subset(train_rows);
  out.test.img = gather_rows(paired.img.features, test_rows);
  out.test.txt = gather_rows(paired.txt.features, test_rows);
  out.test.class_count = paired.img.class_count;
  for (std::size_t r : test_rows) out.test.labels.push_back(paired.img.labels[r]);
  out.train.unlabeled_img = out.test.img;
  out.train.unlabeled_txt = out.test.txt;
  return out;
}

FileFormat format_for_path(const std::filesystem::path& path) {
  return path.extension() == ".bin" ? FileFormat::Binary : FileFormat::Csv;
}

Dataset parse_features_csv(const std::string& text, const std::string& origin) {
  CsvReader csv(text, origin);
  auto h = header(csv, 3, "n,d,c");
  const std::size_t n = csv.to_count(h[0], "row count");
  const std::size_t d = csv.to_count(h[1], "dimension");
  const std::size_t c = csv.to_count(h[2], "class count");
  if (n == 0 || d == 0) csv.fail("n and d must be >= 1");
  if (c < 1) csv.fail("class count must be >= 1");
  Dataset out;
  out.class_count = c;
  out.features = read_matrix_rows(csv, n, d, 1, &out.labels, c);
  return out;
}

std::string format_features_csv(const Dataset& data) {
  data.validate();
  std::string out;
  append_count(out, data.size());
  out += ',';
  append_count(out, data.dim());
  out += ',';
  append_count(out, data.class_count);
  out += '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    append_count(out, data.labels[i]);
    for (double v : data.features.row(i)) {
      out += ',';
      append_double(out, v);
    }
    out += '\n';
  }
  return out;
}

Dataset load_features(const std::filesystem::path& path) {
  const std::string bytes = detail::read_file(path.string());
  if (!has_magic(bytes, kDatasetMagic)) return parse_features_csv(bytes, path.string());

  detail::ByteReader r(bytes, path.string());
  read_binary_header(r, kDatasetMagic);
  const std::uint64_t n = r.u64();
  const std::uint64_t d = r.u64();
  const std::uint64_t c = r.u64();
  if (n == 0) r.fail("empty dataset");
  if (r.remaining() / 8 < n) r.fail("truncated labels");
  Dataset out;
  out.class_count = c;
  out.labels.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint64_t y = r.u64();
    if (y >= c) r.fail("label " + std::to_string(y) + " out of range");
    out.labels.push_back(y);
  }
  out.features = read_binary_values(r, n, d);
  return out;
}

void save_features(const std::filesystem::path& path, const Dataset& data, FileFormat format) {
  if (format == FileFormat::Csv) {
    detail::write_file(path.string(), format_features_csv(data));
    return;
  }
  data.validate();
  detail::ByteWriter w;
  w.bytes(kDatasetMagic);
  w.u32(kBinaryVersion);
  w.u64(data.size());
  w.u64(data.dim());
  w.u64(data.class_count);
  for (std::size_t y : data.labels) w.u64(y);
  for (double v : data.features.values()) w.f64(v);
  detail::write_file(path.string(), w.str());
}

Matrix load_matrix(const std::filesystem::path& path) {
  const std::string bytes = detail::read_file(path.string());
  if (has_magic(bytes, kMatrixMagic)) {
    detail::ByteReader r(bytes, path.string());
    read_binary_header(r, kMatrixMagic);
    const std::uint64_t n = r.u64();
    const std::uint64_t d = r.u64();
    return read_binary_values(r, n, d);
  }
  CsvReader csv(bytes, path.string());
  auto h = header(csv, 2, "n,d");
  const std::size_t n = csv.to_count(h[0], "row count");
  const std::size_t d = csv.to_count(h[1], "dimension");
  if (n == 0 || d == 0) csv.fail("n and d must be >= 1");
  return read_matrix_rows(csv, n, d, 0, nullptr, 0);
}

void save_matrix(const std::filesystem::path& path, const Matrix& m, FileFormat format) {
  if (m.empty()) throw InvalidArgument("save_matrix: empty matrix");
  if (format == FileFormat::Binary) {
    detail::ByteWriter w;
    w.bytes(kMatrixMagic);
    w.u32(kBinaryVersion);
    w.u64(m.rows());
    w.u64(m.cols());
    for (double v : m.values()) w.f64(v);
    detail::write_file(path.string(), w.str());
    return;
  }
  std::string out;
  append_count(out, m.rows());
  out += ',';
  append_count(out, m.cols());
  out += '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto row = m.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ',';
      append_double(out, row[j]);
    }
    out += '\n';
  }
  detail::write_file(path.string(), out);
}

LabelFile load_labels(const std::filesystem::path& path) {
  CsvReader csv(detail::read_file(path.string()), path.string());
  auto h = header(csv, 2, "n,c");
  const std::size_t n = csv.to_count(h[0], "row count");
  LabelFile out;
  out.class_count = csv.to_count(h[1], "class count");
  if (n == 0) csv.fail("n must be >= 1");
  std::vector<std::string_view> fields;
  for (std::size_t i = 0; i < n; ++i) {
    if (!csv.next(fields)) csv.fail("expected " + std::to_string(n) + " labels");
    if (fields.size() != 1) csv.fail("expected one label per line");
    const std::size_t y = csv.to_count(fields[0], "label");
    if (y >= out.class_count) csv.fail("label " + std::to_string(y) + " out of range");
    out.labels.push_back(y);
  }
  if (csv.next(fields)) csv.fail("unexpected extra row");
  return out;
}

void save_labels(const std::filesystem::path& path, const Labels& labels,
                 std::size_t class_count) {
  std::string out;
  append_count(out, labels.size());
  out += ',';
  append_count(out, class_count);
  out += '\n';
  for (std::size_t y : labels) {
    if (y >= class_count) throw InvalidArgument("save_labels: label out of range");
    append_count(out, y);
    out += '\n';
  }
  detail::write_file(path.string(), out);
}

}  // namespace chtn
