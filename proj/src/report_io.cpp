#include "rfdm/report_io.hpp"

#include <fstream>
#include <sstream>

#include "csv.hpp"
#include "rfdm/error.hpp"

namespace rfdm::io {

using detail::format_double;
using detail::open_output;

void save_snp_ranking(const std::vector<RankedFeature>& ranking, const std::vector<std::uint64_t>& candidacy,
                      const std::vector<std::string>& names, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "rank\tscore\tid\tg_alpha\n";
  for (std::size_t k = 0; k < ranking.size(); ++k) {
    const auto& r = ranking[k];
    out << k + 1 << '\t' << format_double(r.score) << '\t' << names.at(r.feature) << '\t'
        << candidacy.at(r.feature) << '\n';
  }
  if (!out) throw Error("failed writing " + path.string());
}

void save_pair_ranking(const std::vector<RankedPair>& ranking, const std::vector<std::uint64_t>& candidacy,
                       const std::vector<std::string>& names, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "rank\tscore\tid_a\tid_b\tg_alpha_a\tg_alpha_b\n";
  for (std::size_t k = 0; k < ranking.size(); ++k) {
    const auto& r = ranking[k];
    out << k + 1 << '\t' << format_double(r.score) << '\t' << names.at(r.a) << '\t' << names.at(r.b) << '\t'
        << candidacy.at(r.a) << '\t' << candidacy.at(r.b) << '\n';
  }
  if (!out) throw Error("failed writing " + path.string());
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, '\t')) cells.push_back(cell);
  return cells;
}

}  // namespace

RankingTable load_ranking(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": empty ranking");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_tabs(line);
  RankingTable t;
  if (header.size() == 4 && header[2] == "id") {
    t.pairs = false;
  } else if (header.size() == 6 && header[2] == "id_a" && header[3] == "id_b") {
    t.pairs = true;
  } else {
    throw DataError(path.string() + ": unrecognized ranking header");
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_tabs(line);
    if (cells.size() != header.size()) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": wrong number of columns");
    }
    t.score.push_back(detail::parse_double(cells[1], path, line_no, 1));
    t.id_a.push_back(cells[2]);
    t.id_b.push_back(t.pairs ? cells[3] : std::string());
  }
  return t;
}

void save_roc(const RocCurve& curve, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "fpr,tpr\n";
  for (const auto& p : curve.points) out << format_double(p.fpr) << ',' << format_double(p.tpr) << '\n';
  if (!out) throw Error("failed writing " + path.string());
}

RocCurve load_roc(const std::filesystem::path& path) {
  detail::CsvFile csv(path);
  const auto& rows = csv.rows();
  if (rows.empty() || rows.front().cells.size() != 2 || rows.front().cells[0] != "fpr" ||
      rows.front().cells[1] != "tpr") {
    throw DataError(path.string() + ": expected an fpr,tpr header");
  }
  RocCurve c;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].cells.size() != 2) throw DataError(path.string() + ":" + std::to_string(rows[r].line) + ": expected fpr,tpr");
    const double f = detail::parse_double(rows[r].cells[0], path, rows[r].line, 0);
    const double t = detail::parse_double(rows[r].cells[1], path, rows[r].line, 1);
    if (f < 0.0 || f > 1.0 || t < 0.0 || t > 1.0) {
      throw DataError(path.string() + ":" + std::to_string(rows[r].line) + ": point outside [0,1]^2");
    }
    if (!c.points.empty() && f < c.points.back().fpr) {
      throw DataError(path.string() + ":" + std::to_string(rows[r].line) + ": fpr decreases");
    }
    c.points.push_back({f, t});
  }
  if (c.points.empty()) throw DataError(path.string() + ": no ROC points");
  c.auc = trapezoid_auc(c.points);
  return c;
}

void save_embedding(const Embedding& e, const std::vector<std::string>& subject_ids,
                    const std::filesystem::path& path) {
  if (static_cast<std::size_t>(e.coordinates.rows()) != subject_ids.size()) {
    throw DataError("embedding rows do not match subject ids");
  }
  auto out = open_output(path);
  out << "# eigenvalues";
  for (Eigen::Index c = 0; c < e.eigenvalues.size(); ++c) out << ',' << format_double(e.eigenvalues(c));
  out << "\nsubject_id";
  for (Eigen::Index c = 0; c < e.coordinates.cols(); ++c) out << ",dim" << c + 1;
  out << '\n';
  for (Eigen::Index r = 0; r < e.coordinates.rows(); ++r) {
    out << subject_ids[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < e.coordinates.cols(); ++c) out << ',' << format_double(e.coordinates(r, c));
    out << '\n';
  }
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace rfdm::io
