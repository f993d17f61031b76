#include "overdict/csv_io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "overdict/errors.hpp"

namespace overdict {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path + " for reading");
  return in;
}

std::string next_line(std::ifstream& in, const std::string& path) {
  std::string line;
  if (!std::getline(in, line)) throw Error("unexpected end of " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

// Parse a full line of comma-separated doubles (exactly `expect` of them).
void parse_double_row(const std::string& line, const std::string& path,
                      int expect, double* row_out) {
  const char* cur = line.c_str();
  for (int c = 0; c < expect; ++c) {
    char* end = nullptr;
    const double v = std::strtod(cur, &end);
    if (end == cur) throw Error("malformed numeric row in " + path);
    row_out[c] = v;
    cur = end;
    if (c + 1 < expect) {
      if (*cur != ',') throw Error("expected a comma in " + path);
      ++cur;
    }
  }
  while (*cur == ' ') ++cur;
  if (*cur != '\0') throw Error("trailing characters in a row of " + path);
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_matrix_csv(const std::string& path, const Matrix& M) {
  std::ofstream out = open_out(path);
  out << "# rows=" << M.rows() << " cols=" << M.cols() << "\n";
  std::string line;
  for (int i = 0; i < M.rows(); ++i) {
    line.clear();
    for (int j = 0; j < M.cols(); ++j) {
      if (j > 0) line.push_back(',');
      line += format_double(M(i, j));
    }
    line.push_back('\n');
    out << line;
  }
  if (!out) throw Error("failed writing " + path);
}

Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  const std::string header = next_line(in, path);
  long rows = 0, cols = 0;
  if (std::sscanf(header.c_str(), "# rows=%ld cols=%ld", &rows, &cols) != 2 ||
      rows < 0 || cols < 0)
    throw Error("bad matrix header in " + path);
  Matrix M(rows, cols);
  std::vector<double> row(static_cast<std::size_t>(cols));
  for (long i = 0; i < rows; ++i) {
    const std::string line = next_line(in, path);
    parse_double_row(line, path, static_cast<int>(cols), row.data());
    for (long j = 0; j < cols; ++j)
      M(i, j) = row[static_cast<std::size_t>(j)];
  }
  return M;
}

void write_supports_csv(const std::string& path,
                        const std::vector<std::vector<int>>& supports) {
  std::ofstream out = open_out(path);
  out << "# cols=" << supports.size() << "\n";
  std::string line;
  for (const auto& sup : supports) {
    line.clear();
    for (std::size_t t = 0; t < sup.size(); ++t) {
      if (t > 0) line.push_back(',');
      line += std::to_string(sup[t]);
    }
    line.push_back('\n');
    out << line;
  }
  if (!out) throw Error("failed writing " + path);
}

std::vector<std::vector<int>> read_supports_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  const std::string header = next_line(in, path);
  long n = 0;
  if (std::sscanf(header.c_str(), "# cols=%ld", &n) != 1 || n < 0)
    throw Error("bad supports header in " + path);
  std::vector<std::vector<int>> out;
  out.reserve(static_cast<std::size_t>(n));
  for (long j = 0; j < n; ++j) {
    const std::string line = next_line(in, path);
    std::vector<int> sup;
    const char* cur = line.c_str();
    while (*cur != '\0') {
      char* end = nullptr;
      const long v = std::strtol(cur, &end, 10);
      if (end == cur) throw Error("malformed support list in " + path);
      sup.push_back(static_cast<int>(v));
      cur = end;
      if (*cur == ',') ++cur;
    }
    out.push_back(std::move(sup));
  }
  return out;
}

void write_graph_csv(const std::string& path, const CorrelationGraph& G) {
  std::ofstream out = open_out(path);
  out << "# n=" << G.n << " rho=" << format_double(G.rho) << "\n";
  std::string line;
  for (const auto& [i, j] : G.edges) {
    line = std::to_string(i);
    line.push_back(',');
    line += std::to_string(j);
    line.push_back('\n');
    out << line;
  }
  if (!out) throw Error("failed writing " + path);
}

CorrelationGraph read_graph_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  const std::string header = next_line(in, path);
  long n = 0;
  double rho = 0.0;
  if (std::sscanf(header.c_str(), "# n=%ld rho=%lf", &n, &rho) != 2 || n < 0)
    throw Error("bad graph header in " + path);
  CorrelationGraph G;
  G.n = static_cast<int>(n);
  G.rho = rho;
  G.neighbors.assign(static_cast<std::size_t>(n), {});
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    long i = 0, j = 0;
    if (std::sscanf(line.c_str(), "%ld,%ld", &i, &j) != 2 || i < 0 || j <= i ||
        j >= n)
      throw Error("malformed edge line in " + path);
    G.edges.emplace_back(static_cast<int>(i), static_cast<int>(j));
    G.neighbors[static_cast<std::size_t>(i)].push_back(static_cast<int>(j));
    G.neighbors[static_cast<std::size_t>(j)].push_back(static_cast<int>(i));
  }
  for (auto& lst : G.neighbors) std::sort(lst.begin(), lst.end());
  std::sort(G.edges.begin(), G.edges.end());
  return G;
}

}  // namespace overdict
