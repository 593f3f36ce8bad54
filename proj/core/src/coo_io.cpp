#include "tucker/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace tucker {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& tok, const std::filesystem::path& path,
                    std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
    throw ParseError(path.string() + ":" + std::to_string(line) +
                     ": not a number: '" + tok + "'");
  }
  return v;
}

long parse_int(const std::string& tok, const std::filesystem::path& path,
               std::size_t line) {
  long v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
    throw ParseError(path.string() + ":" + std::to_string(line) +
                     ": not an integer: '" + tok + "'");
  }
  return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  return in;
}

}  // namespace

SparseTensor3 load_coo(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file");
  ++lineno;
  std::istringstream header(line);
  std::string hash, dims_kw, base_kw;
  long n1 = 0, n2 = 0, n3 = 0;
  header >> hash >> dims_kw >> n1 >> n2 >> n3 >> base_kw;
  if (header.fail() || hash != "#" || dims_kw != "dims" ||
      (base_kw != "base=0" && base_kw != "base=1")) {
    throw ParseError(path.string() + ":1: expected header '# dims n1 n2 n3 base={0|1}'");
  }
  const int base = base_kw == "base=1" ? 1 : 0;
  if (n1 <= 0 || n2 <= 0 || n3 <= 0)
    throw ParseError(path.string() + ":1: dims must be positive");

  std::vector<SparseEntry> entries;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string t1, t2, t3, tv, extra;
    row >> t1 >> t2 >> t3 >> tv;
    if (row.fail())
      throw ParseError(path.string() + ":" + std::to_string(lineno) +
                       ": expected 'i j k value'");
    if (row >> extra)
      throw ParseError(path.string() + ":" + std::to_string(lineno) +
                       ": trailing content '" + extra + "'");
    SparseEntry e;
    e.i1 = static_cast<int>(parse_int(t1, path, lineno)) - base;
    e.i2 = static_cast<int>(parse_int(t2, path, lineno)) - base;
    e.i3 = static_cast<int>(parse_int(t3, path, lineno)) - base;
    e.value = parse_double(tv, path, lineno);
    entries.push_back(e);
  }
  try {
    return SparseTensor3({static_cast<int>(n1), static_cast<int>(n2),
                          static_cast<int>(n3)},
                         std::move(entries));
  } catch (const Error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void save_coo(const SparseTensor3& t, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "# dims " << t.dim(1) << ' ' << t.dim(2) << ' ' << t.dim(3)
      << " base=0\n";
  for (const SparseEntry& e : t.entries()) {
    out << e.i1 << ' ' << e.i2 << ' ' << e.i3 << ' ' << format_double(e.value)
        << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

void save_factors(const TuckerPoint& x, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  const Dims n = x.dims();
  const Dims r = x.ranks();
  out << "# tucker-factors dims " << n[0] << ' ' << n[1] << ' ' << n[2]
      << " ranks " << r[0] << ' ' << r[1] << ' ' << r[2] << "\n";
  for (int d = 1; d <= 3; ++d) {
    const Matrix& u = x.U(d);
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      for (Eigen::Index j = 0; j < u.cols(); ++j) {
        if (j) out << ' ';
        out << format_double(u(i, j));
      }
      out << '\n';
    }
  }
  const auto& g = x.G.values();
  for (std::size_t i = 0; i < g.size(); ++i) out << format_double(g[i]) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

TuckerPoint load_factors(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file");
  std::istringstream header(line);
  std::string hash, kind, dims_kw, ranks_kw;
  Dims n{}, r{};
  header >> hash >> kind >> dims_kw >> n[0] >> n[1] >> n[2] >> ranks_kw >> r[0] >>
      r[1] >> r[2];
  if (header.fail() || hash != "#" || kind != "tucker-factors" ||
      dims_kw != "dims" || ranks_kw != "ranks") {
    throw ParseError(path.string() + ":1: malformed factor file header");
  }

  std::size_t lineno = 1;
  auto next_tokens = [&](int count) {
    std::vector<double> vals;
    if (!std::getline(in, line))
      throw ParseError(path.string() + ": unexpected end of file");
    ++lineno;
    std::istringstream row(line);
    std::string tok;
    while (row >> tok) vals.push_back(parse_double(tok, path, lineno));
    if (static_cast<int>(vals.size()) != count)
      throw ParseError(path.string() + ":" + std::to_string(lineno) +
                       ": expected " + std::to_string(count) + " numbers");
    return vals;
  };

  TuckerPoint x;
  for (int d = 1; d <= 3; ++d) {
    Matrix u(n[static_cast<std::size_t>(d - 1)], r[static_cast<std::size_t>(d - 1)]);
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      const std::vector<double> vals = next_tokens(static_cast<int>(u.cols()));
      for (Eigen::Index j = 0; j < u.cols(); ++j)
        u(i, j) = vals[static_cast<std::size_t>(j)];
    }
    x.U(d) = u;
  }
  x.G = DenseTensor3(r[0], r[1], r[2]);
  for (double& v : x.G.values()) v = next_tokens(1)[0];
  return x;
}

void write_trace_csv(const RunTrace& trace, const std::filesystem::path& path,
                     bool include_timing) {
  std::ofstream out = open_out(path);
  out << "iter,train_mse,test_mse,grad_norm,step,backtracks,time_s\n";
  for (const TraceRecord& r : trace.records) {
    out << r.iter << ',' << format_double(r.train_mse) << ','
        << format_double(r.test_mse) << ',' << format_double(r.grad_norm) << ','
        << format_double(r.step) << ',' << r.backtracks << ','
        << (include_timing ? format_double(r.time_s) : std::string("0")) << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace tucker
