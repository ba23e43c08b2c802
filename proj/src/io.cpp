#include "rfdm/io.hpp"

#include <algorithm>
#include <fstream>

#include "csv.hpp"
#include "rfdm/error.hpp"

namespace rfdm::io {

using detail::CsvFile;
using detail::format_double;
using detail::open_output;

GenotypeMatrix load_genotypes(const fs::path& path) {
  CsvFile csv(path);
  const auto& rows = csv.rows();
  if (rows.empty()) throw DataError(path.string() + ": empty genotype file");
  const auto& header = rows.front().cells;
  if (header.size() < 2) throw DataError(path.string() + ": header needs an id column and SNP ids");
  const std::size_t p = header.size() - 1;
  const std::size_t n = rows.size() - 1;
  if (n == 0) throw DataError(path.string() + ": no subject rows");

  std::vector<std::string> snp_ids;
  for (std::size_t c = 1; c < header.size(); ++c) snp_ids.emplace_back(header[c]);
  std::vector<std::string> subject_ids;
  std::vector<std::uint8_t> values(n * p);
  for (std::size_t r = 0; r < n; ++r) {
    const auto& row = rows[r + 1];
    if (row.cells.size() != p + 1) {
      throw DataError(path.string() + ":" + std::to_string(row.line) + ": expected " +
                      std::to_string(p + 1) + " cells, found " + std::to_string(row.cells.size()));
    }
    subject_ids.emplace_back(row.cells[0]);
    for (std::size_t c = 0; c < p; ++c) {
      const long long v = detail::parse_int(row.cells[c + 1], path, row.line, c + 1);
      if (v < 0 || v > 2) {
        throw DataError("genotype '" + std::string(row.cells[c + 1]) + "' at " + path.string() +
                        ":" + std::to_string(row.line) + ", column " + std::to_string(c + 2) +
                        " (subject " + subject_ids.back() + ", snp " + snp_ids[c] +
                        ") is not in {0,1,2}");
      }
      values[c * n + r] = static_cast<std::uint8_t>(v);
    }
  }
  return GenotypeMatrix(n, p, std::move(values), std::move(snp_ids), std::move(subject_ids));
}

void save_genotypes(const GenotypeMatrix& g, const fs::path& path) {
  auto out = open_output(path);
  out << "subject_id";
  for (const auto& id : g.snp_ids()) out << ',' << id;
  out << '\n';
  for (std::size_t i = 0; i < g.n_subjects(); ++i) {
    out << g.subject_ids()[i];
    for (std::size_t c = 0; c < g.n_snps(); ++c) out << ',' << static_cast<int>(g(i, c));
    out << '\n';
  }
  if (!out) throw Error("failed writing " + path.string());
}

Eigen::MatrixXd load_matrix(const fs::path& path) {
  CsvFile csv(path);
  const auto& rows = csv.rows();
  if (rows.empty()) throw DataError(path.string() + ": empty matrix file");
  const std::size_t cols = rows.front().cells.size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].cells.size() != cols) {
      throw DataError(path.string() + ":" + std::to_string(rows[r].line) + ": ragged row");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          detail::parse_double(rows[r].cells[c], path, rows[r].line, c);
    }
  }
  return m;
}

void save_matrix(const Eigen::MatrixXd& m, const fs::path& path) {
  auto out = open_output(path);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
  if (!out) throw Error("failed writing " + path.string());
}

DistanceMatrix load_distances(const fs::path& path) {
  return validate_distance_matrix(load_matrix(path));
}

void save_distances(const DistanceMatrix& d, const fs::path& path) { save_matrix(d.values(), path); }

Table load_table(const fs::path& path) {
  CsvFile csv(path);
  const auto& rows = csv.rows();
  if (rows.empty()) throw DataError(path.string() + ": empty table");
  Table t;
  const auto& header = rows.front().cells;
  if (header.size() < 2) throw DataError(path.string() + ": table needs an id column and data");
  for (std::size_t c = 1; c < header.size(); ++c) t.columns.emplace_back(header[c]);
  const std::size_t q = t.columns.size();
  t.values.resize(static_cast<Eigen::Index>(rows.size() - 1), static_cast<Eigen::Index>(q));
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].cells.size() != q + 1) {
      throw DataError(path.string() + ":" + std::to_string(rows[r].line) + ": ragged row");
    }
    t.subject_ids.emplace_back(rows[r].cells[0]);
    for (std::size_t c = 0; c < q; ++c) {
      t.values(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(c)) =
          detail::parse_double(rows[r].cells[c + 1], path, rows[r].line, c + 1);
    }
  }
  return t;
}

void save_table(const Table& t, const fs::path& path) {
  if (static_cast<std::size_t>(t.values.rows()) != t.subject_ids.size() ||
      static_cast<std::size_t>(t.values.cols()) != t.columns.size()) {
    throw DataError("table shape does not match its ids");
  }
  auto out = open_output(path);
  out << "subject_id";
  for (const auto& c : t.columns) out << ',' << c;
  out << '\n';
  for (Eigen::Index r = 0; r < t.values.rows(); ++r) {
    out << t.subject_ids[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < t.values.cols(); ++c) out << ',' << format_double(t.values(r, c));
    out << '\n';
  }
  if (!out) throw Error("failed writing " + path.string());
}

std::vector<int> load_labels(const fs::path& path, std::vector<std::string>* subject_ids) {
  CsvFile csv(path);
  const auto& rows = csv.rows();
  if (rows.size() < 2) throw DataError(path.string() + ": no labels");
  std::vector<int> labels;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].cells.size() != 2) {
      throw DataError(path.string() + ":" + std::to_string(rows[r].line) + ": expected id,label");
    }
    const long long v = detail::parse_int(rows[r].cells[1], path, rows[r].line, 1);
    if (v < 0) throw DataError(path.string() + ":" + std::to_string(rows[r].line) + ": negative label");
    labels.push_back(static_cast<int>(v));
    if (subject_ids) subject_ids->emplace_back(rows[r].cells[0]);
  }
  return labels;
}

void save_labels(const std::vector<int>& labels, const std::vector<std::string>& subject_ids,
                 const fs::path& path) {
  if (labels.size() != subject_ids.size()) throw DataError("label and id counts differ");
  auto out = open_output(path);
  out << "subject_id,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) out << subject_ids[i] << ',' << labels[i] << '\n';
  if (!out) throw Error("failed writing " + path.string());
}

namespace {

std::vector<std::string> read_manifest(const fs::path& dir, std::size_t* vertices) {
  std::ifstream in(dir / "manifest.txt");
  if (!in) throw DataError("cannot open " + (dir / "manifest.txt").string());
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("#vertices", 0) == 0) {
      if (vertices) *vertices = std::stoul(line.substr(9));
      continue;
    }
    if (line.front() == '#') continue;
    ids.push_back(line);
  }
  if (ids.empty()) throw DataError((dir / "manifest.txt").string() + ": no subjects listed");
  return ids;
}

void write_manifest(const std::vector<std::string>& ids, const fs::path& dir,
                    const std::string& preamble = {}) {
  auto out = open_output(dir / "manifest.txt");
  out << preamble;
  for (const auto& id : ids) out << id << '\n';
}

}  // namespace

void save_matrix_bundle(const std::vector<Eigen::MatrixXd>& matrices,
                        const std::vector<std::string>& subject_ids, const fs::path& dir) {
  if (matrices.size() != subject_ids.size()) throw DataError("matrix and id counts differ");
  fs::create_directories(dir);
  write_manifest(subject_ids, dir);
  for (std::size_t i = 0; i < matrices.size(); ++i) save_matrix(matrices[i], dir / (subject_ids[i] + ".csv"));
}

std::vector<Eigen::MatrixXd> load_matrix_bundle(const fs::path& dir,
                                                std::vector<std::string>* subject_ids) {
  const auto ids = read_manifest(dir, nullptr);
  std::vector<Eigen::MatrixXd> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(load_matrix(dir / (id + ".csv")));
  if (subject_ids) *subject_ids = ids;
  return out;
}

void save_graph_bundle(const std::vector<Graph>& graphs, const std::vector<std::string>& subject_ids,
                       const fs::path& dir) {
  if (graphs.size() != subject_ids.size()) throw DataError("graph and id counts differ");
  fs::create_directories(dir);
  const std::size_t nv = graphs.empty() ? 0 : graphs.front().n_vertices;
  write_manifest(subject_ids, dir, "#vertices " + std::to_string(nv) + "\n");
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    auto out = open_output(dir / (subject_ids[i] + ".csv"));
    for (const Edge& e : graphs[i].edges) {
      out << e.u << ',' << e.v;
      if (e.weight != 1.0) out << ',' << format_double(e.weight);
      out << '\n';
    }
  }
}

std::vector<Graph> load_graph_bundle(const fs::path& dir, std::vector<std::string>* subject_ids) {
  std::size_t vertices = 0;
  const auto ids = read_manifest(dir, &vertices);
  std::vector<Graph> graphs;
  std::size_t max_vertex = 0;
  for (const auto& id : ids) {
    const fs::path file = dir / (id + ".csv");
    CsvFile csv(file);
    Graph g;
    for (const auto& row : csv.rows()) {
      if (row.cells.size() < 2 || row.cells.size() > 3) {
        throw DataError(file.string() + ":" + std::to_string(row.line) + ": expected u,v[,weight]");
      }
      const long long u = detail::parse_int(row.cells[0], file, row.line, 0);
      const long long v = detail::parse_int(row.cells[1], file, row.line, 1);
      if (u < 0 || v < 0) throw DataError(file.string() + ":" + std::to_string(row.line) + ": negative vertex");
      Edge e{static_cast<std::size_t>(u), static_cast<std::size_t>(v), 1.0};
      if (row.cells.size() == 3) e.weight = detail::parse_double(row.cells[2], file, row.line, 2);
      max_vertex = std::max({max_vertex, e.u + 1, e.v + 1});
      g.edges.push_back(e);
    }
    graphs.push_back(std::move(g));
  }
  const std::size_t nv = vertices ? vertices : max_vertex;
  for (auto& g : graphs) g.n_vertices = nv;
  validate_responses(GraphResponses{graphs});
  if (subject_ids) *subject_ids = ids;
  return graphs;
}

}  // namespace rfdm::io
