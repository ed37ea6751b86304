#include "fbmr/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "fbmr/constants.hpp"
#include "fbmr/errors.hpp"

namespace fbmr {

using nlohmann::json;

namespace {

const std::set<std::string>& known_keys()
{
  static const std::set<std::string> keys{
      "schema_version", "experiment", "measure",  "function",   "ell",
      "hurst",          "n",          "m",        "hurst_values", "r_values",
      "horizon",        "times",      "paths",    "seed",       "method",
      "statistics",     "lemmas",     "power",    "h",          "include_timing"};
  return keys;
}

template <class T>
T get_as(const json& doc, const std::string& key)
{
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("field '" + key + "': " + e.what());
  }
}

template <class T>
std::vector<T> get_list(const json& doc, const std::string& key)
{
  const json& v = doc.at(key);
  if (!v.is_array()) {
    // a scalar is accepted as a one-element list
    return {get_as<T>(doc, key)};
  }
  return get_as<std::vector<T>>(doc, key);
}

bool is_two_partition(LemmaKind k)
{
  return k == LemmaKind::L22_26 || k == LemmaKind::L22_27 || k == LemmaKind::L22_28;
}

}  // namespace

SymmetricMeasure parse_measure(const json& spec)
{
  if (spec.is_string()) {
    try {
      return SymmetricMeasure::by_name(spec.get<std::string>());
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
  }
  if (!spec.is_array()) throw ConfigError("measure must be a keyword or a list of [location, weight]");
  std::vector<Atom> atoms;
  for (const json& a : spec) {
    if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number())
      throw ConfigError("each atom must be [location, weight]");
    atoms.push_back({a[0].get<double>(), a[1].get<double>()});
  }
  return SymmetricMeasure::make(std::move(atoms), std::nullopt, MomentRule::none, spec.dump());
}

FunctionFamily parse_function(const json& spec)
{
  if (spec.is_string()) {
    const std::string name = spec.get<std::string>();
    if (name == "sin") return FunctionFamily::trig(1.0, 1.0, 0.0);
    if (name == "cos") return FunctionFamily::trig(1.0, 1.0, std::numbers::pi / 2);
    throw ConfigError("unknown function keyword '" + name + "'");
  }
  if (!spec.is_object() || !spec.contains("kind")) throw ConfigError("function needs a 'kind'");
  const std::string kind = get_as<std::string>(spec, "kind");
  const int order = spec.contains("max_derivative_order")
                        ? get_as<int>(spec, "max_derivative_order")
                        : FunctionFamily::kUnlimitedOrder;
  if (kind == "polynomial") return FunctionFamily::polynomial(get_as<std::vector<double>>(spec, "coefficients"), order);
  if (kind == "monomial") return FunctionFamily::monomial(get_as<int>(spec, "degree"), order);
  if (kind == "trig")
    return FunctionFamily::trig(spec.value("a", 1.0), spec.value("b", 1.0), spec.value("c", 0.0), order);
  if (kind == "gauss_mollified") {
    try {
      return FunctionFamily::gauss_mollified(spec.value("sigma", 1.0), order);
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
  }
  throw ConfigError("unknown function kind '" + kind + "'");
}

ExperimentConfig parse_config(const json& doc, const std::string& experiment)
{
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : doc.items())
    if (!known_keys().contains(key)) throw ConfigError("unknown key '" + key + "'");
  if (!doc.contains("schema_version")) throw ConfigError("missing 'schema_version'");
  const int version = get_as<int>(doc, "schema_version");
  if (version != kSchemaVersion)
    throw ConfigError("unsupported schema_version " + std::to_string(version));

  ExperimentConfig c;
  c.schema_version = version;
  c.experiment = experiment;
  if (doc.contains("experiment")) {
    const std::string declared = get_as<std::string>(doc, "experiment");
    if (!experiment.empty() && declared != experiment)
      throw ConfigError("config declares experiment '" + declared + "' but '" + experiment +
                        "' was requested");
    c.experiment = declared;
  }

  if (doc.contains("measure")) {
    try {
      c.measure = parse_measure(doc["measure"]);
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(std::string("measure: ") + e.what());
    }
    c.measure_spec = doc["measure"].dump();
  }
  if (doc.contains("function")) {
    c.function = parse_function(doc["function"]);
    c.function_spec = doc["function"].dump();
  }
  if (doc.contains("ell")) c.ell = get_as<int>(doc, "ell");
  if (doc.contains("hurst")) c.hurst = get_as<double>(doc, "hurst");
  if (doc.contains("n")) c.n_values = get_list<long>(doc, "n");
  if (doc.contains("m")) c.m_values = get_list<long>(doc, "m");
  if (doc.contains("hurst_values")) c.hurst_values = get_list<double>(doc, "hurst_values");
  if (doc.contains("r_values")) c.r_values = get_list<int>(doc, "r_values");
  if (doc.contains("horizon")) c.horizon = get_as<double>(doc, "horizon");
  if (doc.contains("times")) c.times = get_list<double>(doc, "times");
  if (doc.contains("paths")) {
    const long p = get_as<long>(doc, "paths");
    if (p < 1) throw ConfigError("paths must be at least 1");
    c.paths = static_cast<std::size_t>(p);
  }
  if (doc.contains("seed")) c.seed = get_as<std::uint64_t>(doc, "seed");
  if (doc.contains("method")) {
    try {
      c.method = sampler_method_from_string(get_as<std::string>(doc, "method"));
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
  }
  if (doc.contains("statistics")) c.statistics = get_list<std::string>(doc, "statistics");
  if (doc.contains("lemmas"))
    for (const std::string& name : get_list<std::string>(doc, "lemmas"))
      c.lemmas.push_back(lemma_from_string(name));
  if (doc.contains("power")) c.power = get_as<int>(doc, "power");
  if (doc.contains("h")) c.h = get_as<int>(doc, "h");
  if (doc.contains("include_timing")) c.include_timing = get_as<bool>(doc, "include_timing");
  if (!doc.contains("function")) {
    // default f(x) = x^{2ℓ+1}
    const EllResult measure_ell = ell_of(c.measure);
    const int ell = c.ell.value_or(measure_ell.is_infinite() ? 1 : measure_ell.value);
    if (ell >= 1) {
      c.function = FunctionFamily::monomial(2 * ell + 1);
      c.function_spec = json{{"kind", "monomial"}, {"degree", 2 * ell + 1}}.dump();
    }
  }
  return c;
}

std::vector<std::string> config_diagnostics(const ExperimentConfig& c)
{
  std::vector<std::string> out;
  const std::string& exp = c.experiment;

  if (c.n_values.empty()) out.push_back("'n' must list at least one grid resolution");
  for (long n : c.n_values)
    if (n < 1) out.push_back("every n must be a positive integer");
  if (!(c.horizon > 0.0)) out.push_back("horizon must be positive");
  for (double t : c.times)
    if (!(t > 0.0 && t <= c.horizon)) out.push_back("every time must lie in (0, horizon]");
  if (c.hurst && !(*c.hurst > 0.0 && *c.hurst < 0.5)) out.push_back("H must lie in (0, 1/2)");

  if (c.ell && *c.ell < 1) out.push_back("ell must be at least 1");
  if (c.ell && *c.ell >= 1 && c.hurst && std::abs(*c.hurst - critical_hurst(*c.ell)) > 1e-12)
    out.push_back("H must equal 1/(4l+2) = " + std::to_string(critical_hurst(*c.ell)) +
                  " for l = " + std::to_string(*c.ell));

  const EllResult measure_ell = ell_of(c.measure);
  const bool needs_measure_ell = exp == "verify-limit" || exp == "verify-residual" || exp == "riemann";
  int ell = 0;
  if (needs_measure_ell) {
    if (measure_ell.is_infinite()) {
      out.push_back("measure has infinite ell; the limit theorem needs a finite ell");
    } else {
      ell = measure_ell.value;
      if (c.ell && *c.ell != ell)
        out.push_back("ell = " + std::to_string(*c.ell) + " does not match ell(nu) = " + std::to_string(ell));
      if (c.hurst && std::abs(*c.hurst - critical_hurst(ell)) > 1e-12)
        out.push_back("H must equal 1/(4l+2) = " + std::to_string(critical_hurst(ell)) +
                      " for l = ell(nu) = " + std::to_string(ell));
    }
  } else if (exp == "simulate") {
    if (!c.hurst) {
      try {
        c.resolved_ell();
      } catch (const Error& e) {
        out.push_back(std::string("simulate needs 'hurst' or a finite ell: ") + e.what());
      }
    }
  } else if (exp == "verify-clt" || exp == "verify-lemmas") {
    try {
      ell = c.resolved_ell();
      if (c.hurst && std::abs(*c.hurst - critical_hurst(ell)) > 1e-12)
        out.push_back("H must equal 1/(4l+2) for an integer l >= 1");
    } catch (const Error& e) {
      out.push_back(e.what());
    }
  }

  if (ell >= 1) {
    const int order_needed = 4 * ell + 1;
    if (needs_measure_ell && c.function.max_derivative_order() < order_needed)
      out.push_back("function declares derivative order " +
                    std::to_string(c.function.max_derivative_order()) + " but 4l+1 = " +
                    std::to_string(order_needed) + " is required");
    if (exp == "verify-limit" && c.function.derivative_vanishes(2 * ell + 1))
      out.push_back("f^(" + std::to_string(2 * ell + 1) +
                    ") vanishes identically; the statistics based on it degenerate to 0");
  }

  if ((exp == "verify-clt" || exp == "verify-limit") && c.paths < 100)
    out.push_back("paths must be at least 100 for the Kolmogorov-Smirnov test");
  if (exp == "verify-clt" && c.power && (*c.power < 1 || *c.power % 2 == 0))
    out.push_back("power must be an odd integer >= 1");

  if (c.method == SamplerMethod::cholesky)
    for (long n : c.n_values)
      if (static_cast<double>(n) * c.horizon > static_cast<double>(PathSampler::kCholeskyCap))
        out.push_back("SizeError: Cholesky sampler is capped at " +
                      std::to_string(PathSampler::kCholeskyCap) + " steps");

  if (exp == "verify-lemmas") {
    std::vector<LemmaKind> lemmas = c.lemmas;
    const bool all = lemmas.empty();
    const bool partitions = all || std::any_of(lemmas.begin(), lemmas.end(), is_two_partition);
    if (partitions) {
      if (c.m_values.empty()) out.push_back("GridError: two-partition scans need at least one m");
      for (long n : c.n_values)
        for (long m : c.m_values)
          if (!(n > m && m >= 2))
            out.push_back("GridError: two-partition scans need n > m >= 2, got n=" +
                          std::to_string(n) + ", m=" + std::to_string(m));
    }
    for (double h : c.hurst_values)
      if (!(h > 0.0 && h < 0.5)) out.push_back("every hurst_values entry must lie in (0, 1/2)");
    const bool phi4 = all || std::find(lemmas.begin(), lemmas.end(), LemmaKind::phi4moment) != lemmas.end();
    if (phi4 && ell >= 1) {
      const int h = c.h.value_or(ell);
      if (h < 1) out.push_back("h must be at least 1");
      else if (c.function.max_derivative_order() < 2 * h + 1)
        out.push_back("function declares derivative order " +
                      std::to_string(c.function.max_derivative_order()) + " but phi4moment needs " +
                      std::to_string(2 * h + 1));
      else if (c.function.derivative_vanishes(2 * h + 1))
        out.push_back("f^(" + std::to_string(2 * h + 1) +
                      ") vanishes identically; the phi4moment statistic degenerates to 0");
    }
  }
  return out;
}

json read_json_file(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

std::vector<std::string> validate_config(const std::filesystem::path& path,
                                         const std::string& experiment)
{
  const json doc = [&] {
    try {
      return read_json_file(path);
    } catch (const ConfigError&) {
      return json();  // reported below
    }
  }();
  if (doc.is_null()) return {"config is not valid JSON"};
  try {
    return config_diagnostics(parse_config(doc, experiment));
  } catch (const Error& e) {
    return {e.what()};
  }
}

nlohmann::ordered_json config_to_json(const ExperimentConfig& c)
{
  nlohmann::ordered_json j;
  j["schema_version"] = c.schema_version;
  j["experiment"] = c.experiment;
  j["measure"] = json::parse(c.measure_spec);
  j["function"] = json::parse(c.function_spec);
  if (c.ell) j["ell"] = *c.ell;
  if (c.hurst) j["hurst"] = *c.hurst;
  j["n"] = c.n_values;
  if (!c.m_values.empty()) j["m"] = c.m_values;
  if (!c.hurst_values.empty()) j["hurst_values"] = c.hurst_values;
  if (!c.r_values.empty()) j["r_values"] = c.r_values;
  j["horizon"] = c.horizon;
  j["times"] = c.times;
  j["paths"] = c.paths;
  j["seed"] = c.seed;
  j["method"] = to_string(c.method);
  if (!c.statistics.empty()) j["statistics"] = c.statistics;
  if (!c.lemmas.empty()) {
    std::vector<std::string> names;
    for (LemmaKind k : c.lemmas) names.push_back(to_string(k));
    j["lemmas"] = names;
  }
  if (c.power) j["power"] = *c.power;
  if (c.h) j["h"] = *c.h;
  j["include_timing"] = c.include_timing;
  return j;
}

}  // namespace fbmr
