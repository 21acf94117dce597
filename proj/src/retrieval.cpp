#include "chtn/retrieval.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <iostream>
#include <numeric>
#include <sstream>

#include "binary_io.hpp"
#include "chtn/errors.hpp"

namespace chtn {
namespace {

struct Direction {
  std::vector<double> ap;
  std::vector<std::size_t> ids;
  std::size_t skipped = 0;
};

Direction score_direction(const Matrix& queries, std::span<const std::size_t> query_labels,
                          const Matrix& gallery, std::span<const std::size_t> gallery_labels) {
  Direction d;
  std::vector<std::uint8_t> rel(gallery.rows());
  for (std::size_t q = 0; q < queries.rows(); ++q) {
    const auto order = rank_gallery(queries.row(q), gallery);
    std::size_t relevant = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
      rel[k] = gallery_labels[order[k]] == query_labels[q];
      relevant += rel[k] ? 1 : 0;
    }
    if (relevant == 0) {
      ++d.skipped;
      continue;
    }
    d.ap.push_back(average_precision(rel, relevant));
    d.ids.push_back(q);
  }
  return d;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) throw UndefinedQuery("evaluate_retrieval: no query has a relevant item");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

double average_precision(std::span<const std::uint8_t> relevance, std::size_t total_relevant) {
  if (total_relevant == 0) throw UndefinedQuery("average_precision: no relevant items");
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < relevance.size(); ++k) {
    if (!relevance[k]) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(k + 1);
  }
  return sum / static_cast<double>(total_relevant);
}

std::vector<std::size_t> rank_gallery(std::span<const double> query, const Matrix& gallery) {
  if (gallery.rows() == 0) throw InvalidArgument("rank_gallery: empty gallery");
  if (gallery.cols() != query.size()) {
    throw InvalidArgument("rank_gallery: query has " + std::to_string(query.size()) +
                          " dims, gallery has " + std::to_string(gallery.cols()));
  }
  std::vector<double> sim(gallery.rows());
  for (std::size_t i = 0; i < gallery.rows(); ++i) sim[i] = cosine_similarity(query, gallery.row(i));
  std::vector<std::size_t> order(gallery.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return sim[a] > sim[b]; });
  return order;
}

std::vector<double> RetrievalReport::per_query_ap() const {
  std::vector<double> all = ap_img2txt;
  all.insert(all.end(), ap_txt2img.begin(), ap_txt2img.end());
  return all;
}

RetrievalReport evaluate_retrieval(const Matrix& img_reps, const Matrix& txt_reps,
                                   std::span<const std::size_t> img_labels,
                                   std::span<const std::size_t> txt_labels) {
  if (img_reps.rows() != img_labels.size() || txt_reps.rows() != txt_labels.size()) {
    throw InvalidArgument("evaluate_retrieval: representations and labels differ in length");
  }
  if (img_reps.cols() != txt_reps.cols()) {
    throw InvalidArgument("evaluate_retrieval: image and text representations differ in width");
  }
  auto i2t = score_direction(img_reps, img_labels, txt_reps, txt_labels);
  auto t2i = score_direction(txt_reps, txt_labels, img_reps, img_labels);

  RetrievalReport r;
  r.skipped_queries = i2t.skipped + t2i.skipped;
  if (r.skipped_queries > 0) {
    std::cerr << "warning: " << r.skipped_queries
              << " queries have no relevant gallery item and were excluded from MAP\n";
  }
  r.map_img2txt = mean(i2t.ap);
  r.map_txt2img = mean(t2i.ap);
  r.map_avg = (r.map_img2txt + r.map_txt2img) / 2.0;
  r.ap_img2txt = std::move(i2t.ap);
  r.ap_txt2img = std::move(t2i.ap);
  r.query_ids_img2txt = std::move(i2t.ids);
  r.query_ids_txt2img = std::move(t2i.ids);
  return r;
}

std::string report_csv(const RetrievalReport& r) {
  std::string out = "task,map\n";
  out += std::string(kTaskImg2Txt) + "," + fmt(r.map_img2txt) + "\n";
  out += std::string(kTaskTxt2Img) + "," + fmt(r.map_txt2img) + "\n";
  out += std::string(kTaskAverage) + "," + fmt(r.map_avg) + "\n";
  return out;
}

std::string per_query_csv(const RetrievalReport& r) {
  std::string out = "task,query,ap\n";
  for (std::size_t i = 0; i < r.ap_img2txt.size(); ++i) {
    out += std::string(kTaskImg2Txt) + "," + std::to_string(r.query_ids_img2txt[i]) + "," +
           fmt(r.ap_img2txt[i]) + "\n";
  }
  for (std::size_t i = 0; i < r.ap_txt2img.size(); ++i) {
    out += std::string(kTaskTxt2Img) + "," + std::to_string(r.query_ids_txt2img[i]) + "," +
           fmt(r.ap_txt2img[i]) + "\n";
  }
  return out;
}

void print_report_table(std::ostream& out, const RetrievalReport& report,
                        const std::string& method) {
  const ReportRow row{method, report.map_img2txt, report.map_txt2img, report.map_avg};
  print_comparison_table(out, std::span<const ReportRow>(&row, 1));
}

ReportRow load_report_csv(const std::filesystem::path& path, std::string method) {
  std::istringstream in(detail::read_file(path.string()));
  std::string line;
  std::size_t line_no = 0;
  ReportRow row{std::move(method)};
  bool seen[3] = {false, false, false};
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "task,map") throw ParseError(path.string(), line_no, "header must be 'task,map'");
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError(path.string(), line_no, "expected 'task,map'");
    const std::string task = line.substr(0, comma);
    double value = 0.0;
    const char* first = line.data() + comma + 1;
    const char* last = line.data() + line.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
      throw ParseError(path.string(), line_no, "invalid MAP value");
    }
    if (task == kTaskImg2Txt) { row.img2txt = value; seen[0] = true; }
    else if (task == kTaskTxt2Img) { row.txt2img = value; seen[1] = true; }
    else if (task == kTaskAverage) { row.average = value; seen[2] = true; }
    else throw ParseError(path.string(), line_no, "unknown task '" + task + "'");
  }
  if (!(seen[0] && seen[1] && seen[2])) {
    throw ParseError(path.string(), line_no, "report is missing a task row");
  }
  return row;
}

void print_comparison_table(std::ostream& out, std::span<const ReportRow> rows) {
  std::size_t width = 6;
  for (const auto& r : rows) width = std::max(width, r.method.size());
  auto pad = [](std::string s, std::size_t w) {
    s.resize(std::max(w, s.size()), ' ');
    return s;
  };
  out << pad("Method", width) << "  Image->Text  Text->Image  Average\n";
  out << std::string(width, '-') << "  -----------  -----------  -------\n";
  for (const auto& r : rows) {
    out << pad(r.method, width) << "  " << pad(fmt(r.img2txt), 11) << "  "
        << pad(fmt(r.txt2img), 11) << "  " << fmt(r.average) << "\n";
  }
}

}  // namespace chtn
