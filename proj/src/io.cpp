#include "ridgeapprox/io.hpp"

#include <fstream>
#include <sstream>

#include "ridgeapprox/errors.hpp"

namespace ridge::io {

namespace {
template <class T>
T field(const Json& j, const char* key) {
  if (!j.contains(key)) throw UsageError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("bad field '") + key + "': " + e.what());
  }
}
}  // namespace

Json to_json(const RidgeCombination& c) {
  Json j;
  j["version"] = kFormatVersion;
  j["dim"] = c.dim;
  j["order"] = c.order;
  j["b0"] = c.b0;
  j["a0"] = c.a0;
  if (c.A0) j["A0"] = *c.A0;
  j["v"] = c.v;
  Json terms = Json::array();
  for (const auto& t : c.terms) {
    Json e;
    e["b"] = t.b;
    e["sign"] = t.atom.sign;
    e["a"] = t.atom.a;
    e["t"] = t.atom.t;
    terms.push_back(std::move(e));
  }
  j["terms"] = std::move(terms);
  return j;
}

RidgeCombination combination_from_json(const Json& j) {
  RidgeCombination c;
  if (j.contains("version") && field<int>(j, "version") != kFormatVersion)
    throw UsageError("unsupported combination format version");
  c.dim = field<int>(j, "dim");
  c.order = field<int>(j, "order");
  c.b0 = field<double>(j, "b0");
  c.a0 = field<std::vector<double>>(j, "a0");
  if (j.contains("A0")) c.A0 = field<std::vector<double>>(j, "A0");
  c.v = field<double>(j, "v");
  for (const auto& e : field<Json>(j, "terms")) {
    RidgeTerm t;
    t.b = field<double>(e, "b");
    t.atom.sign = field<int>(e, "sign");
    t.atom.a = field<std::vector<double>>(e, "a");
    t.atom.t = field<double>(e, "t");
    t.atom.order = c.order;
    c.terms.push_back(std::move(t));
  }
  c.validate();
  return c;
}

Json to_json(const SpectralMeasure& m) {
  Json j;
  j["dim"] = m.dim();
  Json atoms = Json::array();
  for (const auto& a : m.atoms()) {
    Json e;
    e["omega"] = a.omega;
    e["mag"] = a.mag;
    e["phase"] = a.phase;
    atoms.push_back(std::move(e));
  }
  j["atoms"] = std::move(atoms);
  return j;
}

SpectralMeasure measure_from_json(const Json& j) {
  const int dim = field<int>(j, "dim");
  std::vector<SpectralAtom> atoms;
  for (const auto& e : field<Json>(j, "atoms")) {
    SpectralAtom a;
    a.omega = field<std::vector<double>>(e, "omega");
    a.mag = field<double>(e, "mag");
    a.phase = e.contains("phase") ? field<double>(e, "phase") : 0.0;
    atoms.push_back(std::move(a));
  }
  return SpectralMeasure(dim, std::move(atoms));
}

Json to_json(const RateFit& f) {
  Json j;
  j["slope"] = f.slope;
  j["intercept"] = f.intercept;
  j["r2"] = f.r2;
  j["n"] = f.points.size();
  return j;
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("cannot parse " + path.string() + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_json(const std::filesystem::path& path, const Json& j) {
  write_text(path, j.dump(2) + "\n");
}

SpectralMeasure load_measure(const std::filesystem::path& path) {
  return measure_from_json(read_json(path));
}

void save_measure(const std::filesystem::path& path, const SpectralMeasure& m) {
  write_json(path, to_json(m));
}

}  // namespace ridge::io
