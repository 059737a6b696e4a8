#include "dnls/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace dnls {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error(path + ": " + what);
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(path, "cannot open for writing");
  return out;
}

}  // namespace

std::string format_full(double v) {
  char buf[40];
  if (v == std::floor(v) && std::fabs(v) < 1e15) {
    std::snprintf(buf, sizeof buf, "%.0f", v);
    return buf;
  }
  for (int prec = 1; prec <= 16; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_field_csv(const std::string& path, const LatticeField& f) {
  std::ofstream out = open_out(path);
  out << "# dim=" << f.dim() << " mu=" << format_full(f.mesh())
      << " radius=" << f.radius() << "\n";
  const int box = f.radius();
  if (f.dim() == 1) {
    for (int i = -box; i <= box; ++i)
      out << i << "," << format_full(f.at(i)) << "\n";
  } else {
    for (int i = -box; i <= box; ++i)
      for (int j = -box; j <= box; ++j)
        out << i << "," << j << "," << format_full(f.at(i, j)) << "\n";
  }
  if (!out) fail(path, "write failed");
}

LatticeField read_field_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) fail(path, "empty file");
  int dim = 0;
  int box = 0;
  double mesh = 0.0;
  if (std::sscanf(line.c_str(), "# dim=%d mu=%lf radius=%d", &dim, &mesh,
                  &box) != 3)
    fail(path, "malformed header: " + line);
  if (dim != 1 && dim != 2) fail(path, "dim must be 1 or 2");
  if (box < 0) fail(path, "radius must be nonnegative");
  if (!(mesh > 0.0)) fail(path, "mu must be positive");

  LatticeField f(dim, mesh, box);
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (row >= f.size()) fail(path, "more rows than sites");
    int i = 0;
    int j = 0;
    double v = 0.0;
    const bool ok =
        dim == 1 ? std::sscanf(line.c_str(), "%d,%lf", &i, &v) == 2
                 : std::sscanf(line.c_str(), "%d,%d,%lf", &i, &j, &v) == 3;
    if (!ok) fail(path, "malformed row: " + line);
    if (i < -box || i > box || j < -box || j > box)
      fail(path, "index outside box: " + line);
    (dim == 1 ? f.at(i) : f.at(i, j)) = v;
    ++row;
  }
  if (row != f.size()) fail(path, "fewer rows than sites");
  return f;
}

void write_state_csv(const std::string& path, const ComplexLatticeState& s) {
  std::ofstream out = open_out(path);
  out << "# dim=" << s.dim() << " mu=" << format_full(s.mesh())
      << " radius=" << s.radius() << " time=" << format_full(s.time) << "\n";
  const int box = s.radius();
  if (s.dim() == 1) {
    for (int i = -box; i <= box; ++i)
      out << i << "," << format_full(s.at(i).real()) << ","
          << format_full(s.at(i).imag()) << "\n";
  } else {
    for (int i = -box; i <= box; ++i)
      for (int j = -box; j <= box; ++j)
        out << i << "," << j << "," << format_full(s.at(i, j).real()) << ","
            << format_full(s.at(i, j).imag()) << "\n";
  }
  if (!out) fail(path, "write failed");
}

void write_profile_csv(const std::string& path, const ContinuumProfile& prof) {
  std::ofstream out = open_out(path);
  out << "r,psi\n";
  for (std::size_t k = 0; k < prof.values.size(); ++k)
    out << format_full(static_cast<double>(k) * prof.step) << ","
        << format_full(prof.values[k]) << "\n";
  if (!out) fail(path, "write failed");
}

nlohmann::ordered_json profile_summary_json(const ContinuumProfile& prof) {
  const ContinuumFunctionals fn = continuum_functionals(prof, prof.p);
  nlohmann::ordered_json j;
  j["dim"] = prof.dim;
  j["p"] = prof.p;
  j["lambda_c"] = prof.lambda_c;
  j["amplitude"] = prof.amplitude;
  j["mass"] = fn.mass;
  return j;
}

void write_json_file(const std::string& path, const nlohmann::ordered_json& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << "\n";
  if (!out) fail(path, "write failed");
}

nlohmann::ordered_json read_json_file(const std::string& path) {
  std::ifstream in = open_in(path);
  try {
    return nlohmann::ordered_json::parse(in);
  } catch (const std::exception& e) {
    fail(path, std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace dnls
