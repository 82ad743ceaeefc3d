#include "kernelrmt/csv_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "kernelrmt/errors.hpp"

namespace kernelrmt {
namespace {

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

bool next_line(std::istream& is, std::string& line) {
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) return true;
  }
  return false;
}

std::size_t parse_size(const std::string& s) {
  const double v = parse_double(s);
  if (v < 0.0 || v != static_cast<double>(static_cast<std::size_t>(v))) throw IoError("expected a count, got '" + s + "'");
  return static_cast<std::size_t>(v);
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  if (s.empty()) throw IoError("empty numeric field");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0' || errno == ERANGE) throw IoError("malformed number '" + s + "'");
  return v;
}

void write_data_csv(std::ostream& os, const DataMatrix& x) {
  os << x.n() << ',' << x.p() << ',' << x.model_tag() << ',' << x.seed() << '\n';
  const Eigen::MatrixXd& r = x.rows();
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    for (Eigen::Index k = 0; k < r.cols(); ++k) {
      if (k) os << ',';
      os << format_double(r(i, k));
    }
    os << '\n';
  }
}

DataMatrix read_data_csv(std::istream& is) {
  std::string line;
  if (!next_line(is, line)) throw IoError("data csv: missing header");
  const auto head = split(line);
  if (head.size() != 4) throw IoError("data csv: header must be n,p,model_tag,seed");
  const std::size_t n = parse_size(head[0]);
  const std::size_t p = parse_size(head[1]);
  std::uint64_t seed = 0;
  try {
    std::size_t used = 0;
    seed = std::stoull(head[3], &used);
    if (used != head[3].size()) throw IoError("data csv: malformed seed '" + head[3] + "'");
  } catch (const std::logic_error&) {
    throw IoError("data csv: malformed seed '" + head[3] + "'");
  }
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (std::size_t i = 0; i < n; ++i) {
    if (!next_line(is, line)) throw IoError("data csv: fewer rows than declared");
    const auto f = split(line);
    if (f.size() != p) throw IoError("data csv: row " + std::to_string(i) + " has wrong length");
    for (std::size_t k = 0; k < p; ++k)
      rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = parse_double(f[k]);
  }
  if (next_line(is, line)) throw IoError("data csv: more rows than declared");
  return DataMatrix(std::move(rows), head[2], seed);
}

void write_sym_csv(std::ostream& os, const SymMatrix& m) {
  const std::size_t n = m.order();
  os << n << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      if (j > i) os << ',';
      os << format_double(m(i, j));
    }
    os << '\n';
  }
}

SymMatrix read_sym_csv(std::istream& is) {
  std::string line;
  if (!next_line(is, line)) throw IoError("sym csv: missing order");
  const std::size_t n = parse_size(line);
  Eigen::MatrixXd a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (!next_line(is, line)) throw IoError("sym csv: fewer rows than declared");
    const auto f = split(line);
    if (f.size() != n - i) throw IoError("sym csv: row " + std::to_string(i) + " has wrong length");
    for (std::size_t j = i; j < n; ++j)
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = parse_double(f[j - i]);
  }
  return SymMatrix::from_upper(a);
}

void write_spectrum_csv(std::ostream& os, const SpectralDistribution& d) {
  os << "eigenvalue\n";
  for (double v : d.values()) os << format_double(v) << '\n';
}

SpectralDistribution read_spectrum_csv(std::istream& is) {
  std::string line;
  if (!next_line(is, line) || line != "eigenvalue") throw IoError("spectrum csv: missing 'eigenvalue' header");
  std::vector<double> v;
  while (next_line(is, line)) v.push_back(parse_double(line));
  return SpectralDistribution(std::move(v));
}

void write_stieltjes_csv(std::ostream& os, const std::vector<std::pair<Complex, Complex>>& rows) {
  os << "re_z,im_z,re_w,im_w\n";
  for (const auto& [z, w] : rows)
    os << format_double(z.real()) << ',' << format_double(z.imag()) << ',' << format_double(w.real()) << ','
       << format_double(w.imag()) << '\n';
}

void write_histogram_csv(std::ostream& os, const Histogram& h) {
  os << "bin_left,count\n";
  for (std::size_t b = 0; b < h.counts.size(); ++b) os << format_double(h.left_edges[b]) << ',' << h.counts[b] << '\n';
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("write to " + path.string() + " failed");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace kernelrmt
