#include "config.hpp"

#include <cmath>
#include <sstream>

namespace zenolab::cli {

void fail(const std::string& field, const std::string& what) {
  throw ConfigError("config field '" + field + "': " + what);
}

Reader::Reader(const json& node, std::string path, json& out) : node_(node), path_(std::move(path)), out_(out) {
  if (!node_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected a JSON object");
  if (!out_.is_object()) out_ = json::object();
}

std::string Reader::field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

bool Reader::has(const std::string& key) const { return node_.contains(key); }

const json& Reader::raw(const std::string& key) const {
  if (!node_.contains(key)) fail(field(key), "missing required value");
  return node_.at(key);
}

void Reader::record(const std::string& key, json value) {
  seen_.insert(key);
  out_[key] = std::move(value);
}

double Reader::number(const std::string& key) {
  const json& v = raw(key);
  if (!v.is_number()) fail(field(key), "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(field(key), "must be finite");
  record(key, x);
  return x;
}

double Reader::number(const std::string& key, double fallback) {
  if (!has(key)) {
    record(key, fallback);
    return fallback;
  }
  return number(key);
}

double Reader::positive(const std::string& key) {
  const double x = number(key);
  if (!(x > 0.0)) fail(field(key), "must be > 0");
  return x;
}

double Reader::positive(const std::string& key, double fallback) {
  const double x = number(key, fallback);
  if (!(x > 0.0)) fail(field(key), "must be > 0");
  return x;
}

double Reader::non_negative(const std::string& key, double fallback) {
  const double x = number(key, fallback);
  if (x < 0.0) fail(field(key), "must be >= 0");
  return x;
}

long Reader::integer(const std::string& key) {
  const json& v = raw(key);
  if (!v.is_number_integer()) fail(field(key), "expected an integer");
  const long x = v.get<long>();
  record(key, x);
  return x;
}

long Reader::integer(const std::string& key, long fallback) {
  if (!has(key)) {
    record(key, fallback);
    return fallback;
  }
  return integer(key);
}

bool Reader::boolean(const std::string& key, bool fallback) {
  if (!has(key)) {
    record(key, fallback);
    return fallback;
  }
  const json& v = raw(key);
  if (!v.is_boolean()) fail(field(key), "expected true or false");
  record(key, v.get<bool>());
  return v.get<bool>();
}

std::string Reader::text(const std::string& key, const std::string& fallback, const std::vector<std::string>& allowed) {
  std::string s = fallback;
  if (has(key)) {
    const json& v = raw(key);
    if (!v.is_string()) fail(field(key), "expected a string");
    s = v.get<std::string>();
  }
  bool ok = allowed.empty();
  for (const auto& a : allowed) ok = ok || a == s;
  if (!ok) {
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
    fail(field(key), "'" + s + "' is not one of {" + list + "}");
  }
  record(key, s);
  return s;
}

std::vector<double> Reader::numbers(const std::string& key) {
  const json& v = raw(key);
  if (!v.is_array()) fail(field(key), "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) fail(field(key) + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(v[i].get<double>());
    if (!std::isfinite(out.back())) fail(field(key) + "[" + std::to_string(i) + "]", "must be finite");
  }
  record(key, out);
  return out;
}

std::vector<long> Reader::integers(const std::string& key) {
  const json& v = raw(key);
  if (!v.is_array()) fail(field(key), "expected an array of integers");
  std::vector<long> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number_integer()) fail(field(key) + "[" + std::to_string(i) + "]", "expected an integer");
    out.push_back(v[i].get<long>());
  }
  record(key, out);
  return out;
}

Reader Reader::object(const std::string& key) {
  const json& v = raw(key);
  seen_.insert(key);
  out_[key] = json::object();
  return Reader(v, field(key), out_[key]);
}

void Reader::finish() {
  for (const auto& [key, value] : node_.items()) {
    (void)value;
    if (!seen_.count(key)) fail(field(key), "unknown key");
  }
}

namespace {

std::vector<double> grid_piece(Reader& g) {
  const double start = g.number("start");
  const double stop = g.number("stop");
  if (g.has("count") == g.has("step")) fail(g.path(), "give exactly one of 'count' or 'step'");
  std::vector<double> t;
  if (g.has("count")) {
    const long n = g.integer("count");
    if (n < 1) fail(g.field("count"), "must be >= 1");
    if (n == 1) {
      if (start != stop) fail(g.path(), "a single-point grid needs start == stop");
      t.push_back(start);
    } else {
      for (long i = 0; i < n; ++i) t.push_back(start + (stop - start) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
  } else {
    const double step = g.positive("step");
    const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    if (n < 0) fail(g.path(), "stop must be >= start");
    for (long i = 0; i <= n; ++i) t.push_back(start + step * static_cast<double>(i));
  }
  g.finish();
  return t;
}

}  // namespace

std::vector<double> read_grid(Reader& r, const std::string& key) {
  const json& v = r.raw(key);
  std::vector<double> t;
  if (v.is_array()) {
    t = r.numbers(key);
  } else if (v.is_object() && v.contains("segments")) {
    Reader g = r.object(key);
    const json& segs = g.raw("segments");
    if (!segs.is_array() || segs.empty()) fail(g.field("segments"), "expected a non-empty array of grid objects");
    json resolved = json::array();
    for (std::size_t i = 0; i < segs.size(); ++i) {
      json out;
      Reader s(segs[i], g.field("segments") + "[" + std::to_string(i) + "]", out);
      auto piece = grid_piece(s);
      for (double x : piece)
        if (t.empty() || x > t.back()) t.push_back(x);
      resolved.push_back(out);
    }
    g.record("segments", resolved);
    g.finish();
  } else if (v.is_object()) {
    Reader g = r.object(key);
    t = grid_piece(g);
  } else {
    fail(r.field(key), "expected a list of times or a grid object");
  }
  if (t.empty()) fail(r.field(key), "grid is empty");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t[i])) fail(r.field(key), "grid values must be finite");
    if (i > 0 && !(t[i] > t[i - 1])) fail(r.field(key), "grid must be strictly increasing");
  }
  return t;
}

std::vector<double> read_grid(Reader& r, const std::string& key, const std::vector<double>& fallback) {
  if (r.has(key)) return read_grid(r, key);
  r.record(key, fallback);
  return fallback;
}

complex read_complex(const json& v, const std::string& field) {
  if (v.is_number()) {
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(field, "must be finite");
    return {x, 0.0};
  }
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    const complex z(v[0].get<double>(), v[1].get<double>());
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) fail(field, "must be finite");
    return z;
  }
  fail(field, "expected a number or a [re, im] pair");
}

namespace {

json complex_json(complex z) {
  if (z.imag() == 0.0) return z.real();
  return json::array({z.real(), z.imag()});
}

}  // namespace

OperatorMatrix read_hamiltonian(Reader& r, const std::string& key, std::uint64_t seed) {
  const json& v = r.raw(key);
  const std::string f = r.field(key);
  if (v.is_object()) {
    Reader h = r.object(key);
    if (h.has("rabi")) {
      Reader rabi = h.object("rabi");
      const double omega = rabi.number("omega");
      rabi.finish();
      h.finish();
      return sigma1().scaled(omega);
    }
    if (h.has("random_hermitian")) {
      Reader rnd = h.object("random_hermitian");
      const long dim = rnd.integer("dim");
      if (dim < 1 || dim > 64) fail(rnd.field("dim"), "must be in [1, 64]");
      rnd.record("seed", seed);
      rnd.finish();
      h.finish();
      return random_hermitian(dim, seed);
    }
    fail(f, "expected a matrix, {\"rabi\": ...} or {\"random_hermitian\": ...}");
  }
  if (!v.is_array() || v.empty()) fail(f, "expected a non-empty square matrix (array of rows)");
  const auto n = static_cast<Eigen::Index>(v.size());
  CMatrix m(n, n);
  json echo = json::array();
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& row = v[static_cast<std::size_t>(i)];
    const std::string rf = f + "[" + std::to_string(i) + "]";
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
      fail(rf, "row must have " + std::to_string(n) + " entries (matrix must be square)");
    json erow = json::array();
    for (Eigen::Index j = 0; j < n; ++j) {
      m(i, j) = read_complex(row[static_cast<std::size_t>(j)], rf + "[" + std::to_string(j) + "]");
      erow.push_back(complex_json(m(i, j)));
    }
    echo.push_back(erow);
  }
  r.record(key, echo);
  try {
    return OperatorMatrix::detect(m);
  } catch (const Error& e) {
    fail(f, e.what());
  }
}

StateVector read_state(Reader& r, const std::string& key, Eigen::Index dim, std::uint64_t seed) {
  const std::string f = r.field(key);
  if (!r.has(key)) {
    r.record(key, json{{"basis", 0}});
    return StateVector::basis(dim, 0);
  }
  const json& v = r.raw(key);
  if (v.is_string()) {
    if (v.get<std::string>() != "random") fail(f, "the only named state is \"random\"");
    r.record(key, json{{"random", seed + 1}});
    return random_state(dim, seed + 1);
  }
  if (v.is_object()) {
    Reader s = r.object(key);
    const long k = s.integer("basis");
    s.finish();
    if (k < 0 || k >= dim) fail(s.field("basis"), "index outside [0, dim)");
    return StateVector::basis(dim, k);
  }
  if (!v.is_array()) fail(f, "expected a vector, {\"basis\": k} or \"random\"");
  if (static_cast<Eigen::Index>(v.size()) != dim)
    fail(f, "has " + std::to_string(v.size()) + " components but the Hamiltonian has dim " + std::to_string(dim));
  CVector c(dim);
  json echo = json::array();
  for (Eigen::Index i = 0; i < dim; ++i) {
    c(i) = read_complex(v[static_cast<std::size_t>(i)], f + "[" + std::to_string(i) + "]");
    echo.push_back(complex_json(c(i)));
  }
  r.record(key, echo);
  try {
    return StateVector::normalized(c, Tolerances{.unit_norm = 1e-10});
  } catch (const Error& e) {
    fail(f, e.what());
  }
}

FormFactor read_form_factor(Reader& r, const std::string& key) {
  Reader ff = r.object(key);
  const std::string kind = ff.text("kind", "", {"flat_interval", "constant_line", "tabulated"});
  try {
    if (kind == "flat_interval") {
      const double g0_sq = ff.non_negative("g0_sq", 0.01);
      const double a = ff.number("omega_g", 0.0);
      const double b = ff.number("omega_max", 1.0);
      ff.finish();
      return FormFactor::flat_interval(g0_sq, a, b);
    }
    if (kind == "constant_line") {
      const double gamma = ff.non_negative("gamma", 1.0);
      ff.finish();
      return FormFactor::constant_line(gamma);
    }
    auto omega = ff.numbers("omega");
    auto g_sq = ff.numbers("g_sq");
    ff.finish();
    return FormFactor::tabulated(std::move(omega), std::move(g_sq));
  } catch (const Error& e) {
    fail(ff.path(), e.what());
  }
}

json form_factor_json(const FormFactor& ff) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FlatInterval>)
          return {{"kind", "flat_interval"}, {"g0_sq", s.g0_sq}, {"omega_g", s.omega_g}, {"omega_max", s.omega_max}};
        else if constexpr (std::is_same_v<T, ConstantLine>)
          return {{"kind", "constant_line"}, {"gamma", s.gamma}};
        else
          return {{"kind", "tabulated"}, {"omega", s.omega}, {"g_sq", s.g_sq}};
      },
      ff.spec());
}

}  // namespace zenolab::cli
