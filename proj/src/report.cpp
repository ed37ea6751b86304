#include "fbmr/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "fbmr/config.hpp"
#include "fbmr/errors.hpp"

namespace fbmr {

namespace {

// CSV cells: names are plain identifiers, but quote defensively.
std::string csv_cell(const std::string& s)
{
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

template <class T>
std::string opt_cell(const std::optional<T>& v)
{
  if (!v) return "";
  if constexpr (std::is_same_v<T, bool>) return *v ? "true" : "false";
  else return format_double(*v);
}

nlohmann::ordered_json number_or_null(double x)
{
  if (std::isfinite(x)) return x;
  return nullptr;
}

}  // namespace

std::string format_double(double x)
{
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw std::logic_error("to_chars failed");
  return std::string(buf, end);
}

OutputFormat output_format_from_string(const std::string& name)
{
  if (name == "json") return OutputFormat::json;
  if (name == "csv") return OutputFormat::csv;
  if (name == "table") return OutputFormat::table;
  throw ConfigError("unknown output format '" + name + "'");
}

nlohmann::ordered_json report_to_json(const ExperimentReport& report)
{
  nlohmann::ordered_json j;
  j["experiment"] = report.experiment;
  j["version"] = kLibraryVersion;
  j["seed"] = report.config.seed;
  j["config"] = config_to_json(report.config);
  nlohmann::ordered_json records = nlohmann::ordered_json::array();
  for (const StatRecord& r : report.records) {
    nlohmann::ordered_json rec;
    rec["name"] = r.name;
    rec["estimate"] = number_or_null(r.estimate);
    if (r.standard_error) rec["se"] = number_or_null(*r.standard_error);
    rec["exact"] = r.exact;
    if (r.statistic) rec["statistic"] = number_or_null(*r.statistic);
    if (r.p_value) rec["p_value"] = number_or_null(*r.p_value);
    if (r.pass) rec["pass"] = *r.pass;
    if (r.control) rec["control"] = true;
    records.push_back(std::move(rec));
  }
  j["records"] = std::move(records);
  j["all_controls_pass"] = report.all_controls_pass();
  j["all_pass"] = report.all_pass();
  if (report.wall_clock_seconds) j["wall_clock_seconds"] = *report.wall_clock_seconds;
  return j;
}

void write_report_csv(const ExperimentReport& report, std::ostream& os)
{
  os << "name,estimate,se,stat,p,pass\n";
  for (const StatRecord& r : report.records) {
    os << csv_cell(r.name) << ',' << format_double(r.estimate) << ',' << opt_cell(r.standard_error)
       << ',' << opt_cell(r.statistic) << ',' << opt_cell(r.p_value) << ',' << opt_cell(r.pass)
       << '\n';
  }
}

std::string render_report(const ExperimentReport& report, OutputFormat format)
{
  std::ostringstream os;
  switch (format) {
    case OutputFormat::json:
      os << report_to_json(report).dump(2) << '\n';
      break;
    case OutputFormat::csv:
      write_report_csv(report, os);
      break;
    case OutputFormat::table:
      os << report.experiment << " (seed " << report.config.seed << ")\n";
      for (const StatRecord& r : report.records) {
        os << std::left << std::setw(44) << r.name << ' ' << std::setw(24) << format_double(r.estimate);
        if (r.standard_error) os << " se=" << format_double(*r.standard_error);
        if (r.p_value) os << " p=" << format_double(*r.p_value);
        if (r.pass) os << (*r.pass ? "  ok" : "  FAIL");
        os << '\n';
      }
      break;
  }
  return os.str();
}

std::string render_constants(const std::vector<ConstantsRow>& rows, OutputFormat format)
{
  std::ostringstream os;
  auto ell_text = [](const ConstantsRow& r) {
    return r.ell == EllResult::infinite ? std::string("inf") : std::to_string(r.ell);
  };
  if (format == OutputFormat::json) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const ConstantsRow& r : rows) {
      nlohmann::ordered_json j;
      j["measure"] = r.measure;
      if (r.ell == EllResult::infinite) {
        j["ell"] = "inf";
      } else {
        j["ell"] = r.ell;
        j["k_nu_ell"] = r.k_nu_ell;
        j["sigma_sq"] = r.sigma_sq.value;
        j["sigma_sq_terms"] = r.sigma_sq.terms_used;
        j["sigma_sq_tail_bound"] = r.sigma_sq.tail_bound;
        j["oracle_variance"] = r.oracle_variance.value;
        j["oracle_variance_tail_bound"] = r.oracle_variance.tail_bound;
        j["c_nu"] = r.c_nu;
        j["oracle_over_sigma_sq"] = r.oracle_ratio;
      }
      arr.push_back(std::move(j));
    }
    os << arr.dump(2) << '\n';
    return os.str();
  }
  if (format == OutputFormat::csv) {
    os << "measure,ell,k_nu_ell,sigma_sq,sigma_sq_tail,oracle_variance,oracle_tail,c_nu,oracle_over_sigma_sq\n";
    for (const ConstantsRow& r : rows) {
      os << csv_cell(r.measure) << ',' << ell_text(r);
      if (r.ell != EllResult::infinite) {
        os << ',' << format_double(r.k_nu_ell) << ',' << format_double(r.sigma_sq.value) << ','
           << format_double(r.sigma_sq.tail_bound) << ',' << format_double(r.oracle_variance.value)
           << ',' << format_double(r.oracle_variance.tail_bound) << ',' << format_double(r.c_nu)
           << ',' << format_double(r.oracle_ratio);
      } else {
        os << ",,,,,,,";
      }
      os << '\n';
    }
    return os.str();
  }
  os << std::left << std::setw(12) << "measure" << std::setw(5) << "ell" << std::setw(25) << "k_nu_ell"
     << std::setw(20) << "sigma_sq" << std::setw(20) << "oracle_var" << std::setw(25) << "c_nu"
     << "tail(sigma,oracle)\n";
  for (const ConstantsRow& r : rows) {
    os << std::setw(12) << r.measure << std::setw(5) << ell_text(r);
    if (r.ell != EllResult::infinite) {
      os << std::setw(25) << format_double(r.k_nu_ell) << std::setw(20)
         << format_double(r.sigma_sq.value) << std::setw(20) << format_double(r.oracle_variance.value)
         << std::setw(25) << format_double(r.c_nu) << format_double(r.sigma_sq.tail_bound) << ", "
         << format_double(r.oracle_variance.tail_bound);
    } else {
      os << "-";
    }
    os << '\n';
  }
  return os.str();
}

void write_atomically(const std::filesystem::path& path, const std::string& contents)
{
  namespace fs = std::filesystem;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  const fs::path tmp = dir / ("." + path.filename().string() + ".tmp" + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignore;
    fs::remove(tmp, ignore);
    throw IoError("cannot rename onto '" + path.string() + "': " + ec.message());
  }
}

}  // namespace fbmr
