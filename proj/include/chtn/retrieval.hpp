#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "chtn/tensor.hpp"

namespace chtn {

// Average precision over a complete ranked list:
//   AP = (1/R) * sum_k (R_k / k) * rel_k
// where R_k counts relevant items in the top k. `total_relevant` is R.
// Throws UndefinedQuery when total_relevant is 0.
double average_precision(std::span<const std::uint8_t> relevance, std::size_t total_relevant);

// Gallery row indices by descending cosine similarity to `query`; ties keep
// ascending index order.
std::vector<std::size_t> rank_gallery(std::span<const double> query, const Matrix& gallery);

struct RetrievalReport {
  double map_img2txt = 0.0;
  double map_txt2img = 0.0;
  double map_avg = 0.0;
  // One entry per scored query, in query order. Queries with no relevant
  // gallery item are skipped and counted below.
  std::vector<double> ap_img2txt;
  std::vector<double> ap_txt2img;
  std::vector<std::size_t> query_ids_img2txt;
  std::vector<std::size_t> query_ids_txt2img;
  std::size_t skipped_queries = 0;

  // ap_img2txt followed by ap_txt2img.
  std::vector<double> per_query_ap() const;
};

// Image->Text: every image row queries all text rows; relevance is label
// equality. Text->Image symmetrically.
RetrievalReport evaluate_retrieval(const Matrix& img_reps, const Matrix& txt_reps,
                                   std::span<const std::size_t> img_labels,
                                   std::span<const std::size_t> txt_labels);

// "task,map" rows for Image->Text, Text->Image and Average.
std::string report_csv(const RetrievalReport& report);
// "task,query,ap" rows.
std::string per_query_csv(const RetrievalReport& report);
void print_report_table(std::ostream& out, const RetrievalReport& report,
                        const std::string& method = "CHTN");

struct ReportRow {
  std::string method;
  double img2txt = 0.0;
  double txt2img = 0.0;
  double average = 0.0;
};
// Parses a file written by report_csv.
ReportRow load_report_csv(const std::filesystem::path& path, std::string method);
void print_comparison_table(std::ostream& out, std::span<const ReportRow> rows);

inline constexpr const char* kTaskImg2Txt = "Image->Text";
inline constexpr const char* kTaskTxt2Img = "Text->Image";
inline constexpr const char* kTaskAverage = "Average";

}  // namespace chtn
