#pragma once

#include <cstddef>
#include <filesystem>
#include <string>

#include "chtn/losses.hpp"
#include "chtn/rng.hpp"
#include "chtn/tensor.hpp"

namespace chtn {

// Labeled feature vectors, one sample per row.
struct Dataset {
  Matrix features;
  Labels labels;
  std::size_t class_count = 0;

  std::size_t size() const { return features.rows(); }
  std::size_t dim() const { return features.cols(); }

  // Throws InvalidArgument unless n >= 1, labels are row-aligned and every
  // label lies in [0, class_count).
  void validate() const;

  Dataset subset(std::span<const std::size_t> rows) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Image/text pairs. Row p of img and txt is one pair; both carry the same
// label. The unlabeled matrices hold held-out pairs, also row-aligned.
struct PairedDataset {
  Dataset img;
  Dataset txt;
  Matrix unlabeled_img;
  Matrix unlabeled_txt;

  std::size_t size() const { return img.size(); }
  void validate() const;
};

// Held-out pairs with their labels, kept apart from training data and used
// only to score retrieval.
struct TestSplit {
  Matrix img;
  Matrix txt;
  Labels labels;
  std::size_t class_count = 0;
};

struct SplitResult {
  PairedDataset train;
  TestSplit test;
};

// Draws train_n + test_n distinct pairs at random. The train pairs become
// the labeled sets; the test pairs fill unlabeled_img / unlabeled_txt of the
// result and the separate TestSplit.
SplitResult split(const PairedDataset& paired, std::size_t train_n, std::size_t test_n,
                  Rng& rng);

// ---------------------------------------------------------------------------
// File formats.
//
// Dataset CSV:
//   n,d,c
//   label,f1,...,fd        (n rows)
// Unlabeled matrix CSV:
//   n,d
//   f1,...,fd              (n rows)
// Labels CSV:
//   n,c
//   label                  (n rows)
// Values are written in shortest round-trip form, so save -> load preserves
// every double bit-for-bit. Blank lines and lines starting with '#' are
// skipped when reading.
//
// Dataset binary (all integers and floats little-endian):
//   "CHTNDSET"  u32 version=1  u64 n  u64 d  u64 c
//   n x u64 labels
//   n*d x f64 features, row-major
// Matrix binary:
//   "CHTNMATX"  u32 version=1  u64 n  u64 d
//   n*d x f64, row-major
//
// The loaders sniff the magic bytes, so either encoding can be passed
// anywhere a path is accepted.
// ---------------------------------------------------------------------------

enum class FileFormat { Csv, Binary };

// Picks Binary for ".bin" extensions, Csv otherwise.
FileFormat format_for_path(const std::filesystem::path& path);

Dataset load_features(const std::filesystem::path& path);
void save_features(const std::filesystem::path& path, const Dataset& data,
                   FileFormat format = FileFormat::Csv);

Matrix load_matrix(const std::filesystem::path& path);
void save_matrix(const std::filesystem::path& path, const Matrix& m,
                 FileFormat format = FileFormat::Csv);

struct LabelFile {
  Labels labels;
  std::size_t class_count = 0;
};
LabelFile load_labels(const std::filesystem::path& path);
void save_labels(const std::filesystem::path& path, const Labels& labels,
                 std::size_t class_count);

// In-memory parsers used by the loaders; `origin` names the source in errors.
Dataset parse_features_csv(const std::string& text, const std::string& origin);
std::string format_features_csv(const Dataset& data);

}  // namespace chtn
