#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "qconnect/suites.hpp"

namespace qconnect {

using ojson = nlohmann::ordered_json;

namespace {

constexpr const char* kSchema = "qconnect-report/1";

ojson complex_to_json(cplx z) { return ojson::array({z.real(), z.imag()}); }

cplx complex_from_json(const ojson& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw ConfigError("complex value must be a number or [re, im]");
}

ojson optional_to_json(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

std::optional<double> optional_from_json(const ojson& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

ojson config_json(const RunConfig& c) {
  ojson j;
  j["q"] = complex_to_json(c.q);
  j["N"] = c.N;
  j["M"] = c.M;
  j["suites"] = c.suites;
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  ojson tol = ojson::object();
  if (c.tail_tol) tol["tail_tol"] = *c.tail_tol;
  if (c.cmp_tol) tol["cmp_tol"] = *c.cmp_tol;
  j["tolerances"] = tol;
  j["output"] = c.output;
  j["budget"] = c.budget;
  j["record_timing"] = c.record_timing;
  return j;
}

template <class T>
void read_field(const ojson& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

RunConfig config_from(const ojson& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  static const std::vector<std::string> known = {"q",      "N",      "M",      "suites",
                                                 "samples", "seed",  "tolerances", "output",
                                                 "budget", "record_timing"};
  for (const auto& [key, _] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("unknown config field '" + key + "'");
  RunConfig c;
  if (j.contains("q")) c.q = complex_from_json(j["q"]);
  read_field(j, "N", c.N);
  read_field(j, "M", c.M);
  read_field(j, "suites", c.suites);
  read_field(j, "samples", c.samples);
  read_field(j, "seed", c.seed);
  read_field(j, "output", c.output);
  read_field(j, "budget", c.budget);
  read_field(j, "record_timing", c.record_timing);
  if (j.contains("tolerances")) {
    const ojson& t = j["tolerances"];
    if (!t.is_object()) throw ConfigError("tolerances must be an object");
    for (const auto& [key, _] : t.items())
      if (key != "tail_tol" && key != "cmp_tol")
        throw ConfigError("unknown tolerance '" + key + "'");
    if (t.contains("tail_tol")) c.tail_tol = t["tail_tol"].get<double>();
    if (t.contains("cmp_tol")) c.cmp_tol = t["cmp_tol"].get<double>();
  }
  return c;
}

std::string fmt_double(double v, int prec = 3) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(prec) << v;
  return os.str();
}

std::string fmt_point(const CVec& p) {
  std::ostringstream os;
  os << std::setprecision(4);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) os << ";";
    os << p[i].real();
    if (p[i].imag() != 0.0) os << (p[i].imag() < 0 ? "" : "+") << p[i].imag() << "i";
  }
  return os.str();
}

}  // namespace

bool operator==(const RunConfig& a, const RunConfig& b) {
  return config_json(a) == config_json(b);
}

bool operator==(const Report& a, const Report& b) {
  return a.config == b.config && a.records == b.records && a.summary == b.summary &&
         a.pass == b.pass;
}

void summarize(Report& rep) {
  rep.summary.clear();
  for (const auto& name : rep.config.suites) {
    SuiteSummary s;
    s.suite = name;
    for (const auto& r : rep.records) {
      if (r.suite != name) continue;
      ++s.count;
      if (!r.pass) ++s.failed;
      if (r.kind == "upper" && r.residual)
        s.max_residual = std::max(s.max_residual.value_or(0.0), *r.residual);
    }
    s.pass = s.failed == 0;
    rep.summary.push_back(s);
  }
  rep.pass = std::all_of(rep.summary.begin(), rep.summary.end(),
                         [](const SuiteSummary& s) { return s.pass; });
}

std::string emit_report(const Report& rep, ReportFormat format) {
  if (format == ReportFormat::Json) {
    ojson j;
    j["schema"] = kSchema;
    j["config"] = config_json(rep.config);
    ojson recs = ojson::array();
    for (const auto& r : rep.records) {
      ojson o;
      o["suite"] = r.suite;
      o["check"] = r.check;
      o["params_digest"] = r.params_digest;
      o["sample"] = r.sample;
      ojson pt = ojson::array();
      for (cplx z : r.point) pt.push_back(complex_to_json(z));
      o["point"] = pt;
      o["residual"] = optional_to_json(r.residual);
      o["bound"] = r.bound;
      o["kind"] = r.kind;
      o["pass"] = r.pass;
      o["margin"] = r.margin;
      o["timing_ms"] = r.timing_ms;
      o["error"] = r.error;
      recs.push_back(o);
    }
    j["records"] = recs;
    ojson suites = ojson::array();
    for (const auto& s : rep.summary) {
      ojson o;
      o["suite"] = s.suite;
      o["count"] = s.count;
      o["failed"] = s.failed;
      o["max_residual"] = optional_to_json(s.max_residual);
      o["pass"] = s.pass;
      suites.push_back(o);
    }
    j["summary"] = {{"suites", suites}, {"pass", rep.pass}};
    return j.dump(2) + "\n";
  }

  std::vector<std::vector<std::string>> rows;
  rows.push_back({"suite", "check", "sample", "residual", "bound", "pass", "margin", "point"});
  for (const auto& r : rep.records) {
    std::string res = r.residual ? fmt_double(*r.residual) : "error";
    std::string bound = (r.kind == "upper" ? "<" : ">") + fmt_double(r.bound, 0);
    rows.push_back({r.suite, r.check, std::to_string(r.sample), res, bound,
                    r.pass ? "PASS" : "FAIL", r.residual ? fmt_double(r.margin, 2) : "-",
                    r.error.empty() ? fmt_point(r.point) : r.error});
  }
  std::vector<std::size_t> width(rows[0].size(), 0);
  for (const auto& row : rows)
    for (std::size_t c = 0; c + 1 < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  std::ostringstream os;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      os << row[c];
      if (c + 1 < row.size()) os << std::string(width[c] - row[c].size() + 2, ' ');
    }
    os << "\n";
  }
  return os.str();
}

void write_report(const Report& rep, ReportFormat format, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IOError("cannot open '" + path + "' for writing");
  out << emit_report(rep, format);
  if (!out) throw IOError("failed writing '" + path + "'");
}

Report parse_report(const std::string& text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("report is not valid JSON: ") + e.what());
  }
  if (j.value("schema", "") != kSchema) throw ConfigError("unknown report schema");
  Report rep;
  rep.config = config_from(j.at("config"));
  for (const auto& o : j.at("records")) {
    CheckRecord r;
    r.suite = o.at("suite").get<std::string>();
    r.check = o.at("check").get<std::string>();
    r.params_digest = o.at("params_digest").get<std::string>();
    r.sample = o.at("sample").get<int>();
    for (const auto& z : o.at("point")) r.point.push_back(complex_from_json(z));
    r.residual = optional_from_json(o.at("residual"));
    r.bound = o.at("bound").get<double>();
    r.kind = o.at("kind").get<std::string>();
    r.pass = o.at("pass").get<bool>();
    r.margin = o.at("margin").get<double>();
    r.timing_ms = o.at("timing_ms").get<double>();
    r.error = o.at("error").get<std::string>();
    rep.records.push_back(std::move(r));
  }
  for (const auto& o : j.at("summary").at("suites")) {
    SuiteSummary s;
    s.suite = o.at("suite").get<std::string>();
    s.count = o.at("count").get<int>();
    s.failed = o.at("failed").get<int>();
    s.max_residual = optional_from_json(o.at("max_residual"));
    s.pass = o.at("pass").get<bool>();
    rep.summary.push_back(s);
  }
  rep.pass = j.at("summary").at("pass").get<bool>();
  return rep;
}

RunConfig config_from_json(const std::string& text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from(j);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IOError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

std::string config_to_json(const RunConfig& cfg) { return config_json(cfg).dump(2); }

}  // namespace qconnect
