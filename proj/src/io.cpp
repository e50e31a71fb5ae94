#include "htype/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "htype/common.hpp"

namespace htype {

namespace {

constexpr char kGridMagic[8] = {'H', 'T', 'G', 'R', 'I', 'D', '0', '1'};
constexpr char kSampleMagic[8] = {'H', 'T', 'S', 'A', 'M', 'P', '0', '1'};

template <class T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in, const std::string& path) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw ParseError(path + ": truncated file");
  return v;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  return in;
}

void check_magic(std::istream& in, const char (&magic)[8], const std::string& path) {
  char m[8];
  in.read(m, 8);
  if (!in || !std::equal(m, m + 8, magic)) throw ParseError(path + ": bad magic");
}

void write_binary(const std::string& path, const std::string& bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ParseError("cannot write " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ParseError("write failed for " + path);
  }
  std::filesystem::rename(tmp, path);
}

double parse_number(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ParseError("bad number '" + s + "' in " + what);
  }
  if (used != s.size()) throw ParseError("bad number '" + s + "' in " + what);
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

Json group_to_json(const HTypeGroup& g) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["n"] = g.n();
  j["m"] = g.m();
  Json u = Json::array();
  for (const Matrix& mat : g.u()) {
    Json rows = Json::array();
    for (int r = 0; r < mat.rows(); ++r) {
      Json row = Json::array();
      for (int c = 0; c < mat.cols(); ++c) row.push_back(mat(r, c));
      rows.push_back(row);
    }
    u.push_back(rows);
  }
  j["U"] = u;
  return j;
}

HTypeGroup group_from_json(const Json& j) {
  try {
    const int n = j.at("n").get<int>();
    const int m = j.at("m").get<int>();
    if (n < 1 || m < 1) throw ParseError("group file needs n, m >= 1");
    const Json& u = j.at("U");
    if (!u.is_array() || static_cast<int>(u.size()) != m) {
      throw ParseError("group file needs m generator matrices");
    }
    std::vector<Matrix> mats;
    for (const Json& rows : u) {
      if (!rows.is_array() || static_cast<int>(rows.size()) != 2 * n) {
        throw ParseError("generators must be 2n x 2n");
      }
      Matrix mat(2 * n, 2 * n);
      for (int r = 0; r < 2 * n; ++r) {
        if (static_cast<int>(rows[r].size()) != 2 * n) throw ParseError("generators must be 2n x 2n");
        for (int c = 0; c < 2 * n; ++c) mat(r, c) = rows[r][c].get<double>();
      }
      mats.push_back(std::move(mat));
    }
    return HTypeGroup(n, m, std::move(mats));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed group file: ") + e.what());
  }
}

void write_grid(const std::string& path, const GridField& f, int n) {
  std::ostringstream out;
  out.write(kGridMagic, 8);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(n));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(f.grid.dims()));
  for (const Axis& a : f.grid.axes()) {
    put<std::uint64_t>(out, static_cast<std::uint64_t>(a.count));
    put<double>(out, a.half_extent);
  }
  for (const Complex& v : f.values) {
    put<double>(out, v.real());
    put<double>(out, v.imag());
  }
  write_binary(path, out.str());
}

GridField read_grid(const std::string& path, int* n) {
  std::ifstream in = open_in(path);
  check_magic(in, kGridMagic, path);
  const auto nn = get<std::uint64_t>(in, path);
  const auto dims = get<std::uint64_t>(in, path);
  if (dims == 0 || dims > 16) throw ParseError(path + ": bad dimension count");
  std::vector<Axis> axes;
  for (std::uint64_t d = 0; d < dims; ++d) {
    Axis a;
    a.count = static_cast<int>(get<std::uint64_t>(in, path));
    a.half_extent = get<double>(in, path);
    if (a.count < 1 || !(a.half_extent > 0)) throw ParseError(path + ": bad axis");
    axes.push_back(a);
  }
  GridField f{TensorGrid(std::move(axes))};
  for (Complex& v : f.values) {
    const double re = get<double>(in, path);
    const double im = get<double>(in, path);
    v = {re, im};
  }
  if (in.peek() != std::char_traits<char>::eof()) throw ParseError(path + ": trailing bytes");
  if (n) *n = static_cast<int>(nn);
  return f;
}

void write_grid_csv(const std::string& path, const GridField& f) {
  std::string text;
  const int d = f.grid.dims();
  for (int i = 0; i < d; ++i) text += "x" + std::to_string(i) + ",";
  text += "re,im\n";
  std::vector<double> x(d);
  char buf[64];
  for (std::size_t q = 0; q < f.values.size(); ++q) {
    f.grid.coordinates(q, x);
    for (double v : x) {
      std::snprintf(buf, sizeof buf, "%.17g,", v);
      text += buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", f.values[q].real(), f.values[q].imag());
    text += buf;
  }
  write_text(path, text);
}

void write_samples(const std::string& path, const GroupSamples& s) {
  std::ostringstream out;
  out.write(kSampleMagic, 8);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(s.n));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(s.m));
  put<std::uint64_t>(out, s.radii.size());
  put<std::uint64_t>(out, s.t_count());
  for (double r : s.radii) put<double>(out, r);
  for (double t : s.t_points) put<double>(out, t);
  for (const Complex& v : s.values) {
    put<double>(out, v.real());
    put<double>(out, v.imag());
  }
  write_binary(path, out.str());
}

GroupSamples read_samples(const std::string& path) {
  std::ifstream in = open_in(path);
  check_magic(in, kSampleMagic, path);
  const int n = static_cast<int>(get<std::uint64_t>(in, path));
  const int m = static_cast<int>(get<std::uint64_t>(in, path));
  const auto nr = get<std::uint64_t>(in, path);
  const auto nt = get<std::uint64_t>(in, path);
  if (n < 1 || m < 1 || nr > (1u << 24) || nt > (1u << 24)) throw ParseError(path + ": bad header");
  std::vector<double> radii(nr), t(nt * m);
  for (double& r : radii) r = get<double>(in, path);
  for (double& v : t) v = get<double>(in, path);
  GroupSamples s = make_samples(n, m, std::move(radii), std::move(t));
  for (Complex& v : s.values) {
    const double re = get<double>(in, path);
    const double im = get<double>(in, path);
    v = {re, im};
  }
  return s;
}

std::string curve_csv(const ConstantCurve& c) {
  std::string text = "mu,c_mu,k_used,tail_bound\n";
  char buf[128];
  for (const ConstantRow& r : c.rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d,%.17g\n", r.mu, r.c_mu, r.k_used, r.tail_bound);
    text += buf;
  }
  return text;
}

std::vector<ConstantRow> parse_curve_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "mu,c_mu,k_used,tail_bound") {
    throw ParseError("curve CSV must start with the header mu,c_mu,k_used,tail_bound");
  }
  std::vector<ConstantRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    const std::string where = "curve CSV line " + std::to_string(lineno);
    if (f.size() != 4) throw ParseError(where + ": expected 4 fields");
    ConstantRow r;
    r.mu = parse_number(f[0], where);
    r.c_mu = parse_number(f[1], where);
    r.k_used = static_cast<int>(parse_number(f[2], where));
    r.tail_bound = parse_number(f[3], where);
    rows.push_back(r);
  }
  return rows;
}

Json exponent_report(const ExponentPrediction& pred, const ExponentFit& fit) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["family"] = pred.family;
  j["params"] = pred.params;
  j["regime"] = to_string(pred.regime);
  j["variable"] = pred.variable;
  j["predicted"] = pred.exponent;
  j["fitted"] = fit.slope;
  j["stderr"] = fit.stderr_slope;
  j["max_residual"] = fit.max_residual;
  j["points"] = fit.points;
  j["window"] = {fit.window_lo, fit.window_hi};
  j["source"] = pred.source;
  return j;
}

std::vector<double> parse_mu_spec(const std::string& spec) {
  const auto f = split(spec, ':');
  if (f.size() != 4) throw ParseError("mu spec '" + spec + "' must be kind:lo:hi:count");
  const double lo = parse_number(f[1], "mu spec");
  const double hi = parse_number(f[2], "mu spec");
  const double cnt = parse_number(f[3], "mu spec");
  if (cnt < 2 || cnt != std::floor(cnt) || cnt > 1e6) throw ParseError("mu spec count must be an integer >= 2");
  const int count = static_cast<int>(cnt);
  if (!(hi > lo)) throw ParseError("mu spec needs lo < hi");
  std::vector<double> mu;
  if (f[0] == "lin") {
    for (int i = 0; i < count; ++i) mu.push_back(lo + (hi - lo) * i / (count - 1));
  } else if (f[0] == "log" || f[0] == "eps1") {
    if (!(lo > 0)) throw ParseError("geometric mu spec needs lo > 0");
    for (int i = 0; i < count; ++i) mu.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
    if (f[0] == "eps1") {
      if (!(hi < 1)) throw ParseError("eps1 spec needs eps < 1");
      for (double& v : mu) v = 1.0 - v;
      std::reverse(mu.begin(), mu.end());
    }
  } else {
    throw ParseError("unknown mu spec kind '" + f[0] + "' (log, lin, eps1)");
  }
  return mu;
}

std::string format_double(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const std::string& path, const std::string& text) { write_binary(path, text); }

}  // namespace htype
