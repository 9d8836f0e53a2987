#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qconnect/hyperseries.hpp"
#include "qconnect/suites.hpp"

using namespace qconnect;
using json = nlohmann::ordered_json;

namespace {

cplx to_complex(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  throw ConfigError("complex value must be a number or [re, im]");
}

CVec to_cvec(const json& j) {
  if (!j.is_array()) throw ConfigError("expected an array of complex values");
  CVec v;
  for (const auto& x : j) v.push_back(to_complex(x));
  return v;
}

json from_complex(cplx z) { return json::array({z.real(), z.imag()}); }

std::string read_text(const std::string& arg) {
  if (!arg.empty() && arg.front() == '{') return arg;
  std::ifstream in(arg);
  if (!in) throw IOError("cannot read '" + arg + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Parameters from either exponents (alpha, beta, gamma) or values (a, b, c).
ParamSet params_from(const json& j, const QContext& ctx) {
  if (j.contains("alpha"))
    return ParamSet::from_exponents(to_cvec(j.at("alpha")), to_cvec(j.at("beta")),
                                    to_cvec(j.at("gamma")), ctx);
  ParamSet p;
  p.a = to_cvec(j.at("a"));
  p.b = to_cvec(j.at("b"));
  p.c = to_cvec(j.at("c"));
  if (p.a.size() != p.c.size()) throw ConfigError("a and c must have the same length");
  return p;
}

Permutation perm_from(const json& j, int M) {
  if (!j.contains("sigma")) return Permutation::identity(M);
  return Permutation(j.at("sigma").get<std::vector<int>>());
}

int cmd_eval(const std::string& arg) {
  const json spec = json::parse(read_text(arg));
  QSettings st;
  if (spec.contains("q")) st.q = to_complex(spec["q"]);
  if (spec.contains("series_cap")) st.series_cap = spec["series_cap"].get<int>();
  const QContext ctx(st);
  const std::string kind = spec.at("kind").get<std::string>();
  json out;
  out["kind"] = kind;
  auto put = [&](const SeriesValue& v) {
    out["value"] = from_complex(v.value);
    out["terms_used"] = v.terms_used;
    out["tail_estimate"] = v.tail_estimate;
  };
  if (kind == "nphi") {
    put(eval_nphi(to_cvec(spec.at("upper")), to_cvec(spec.at("lower")), to_complex(spec.at("t")),
                  ctx));
  } else {
    const ParamSet p = params_from(spec, ctx);
    const CVec t = to_cvec(spec.at("t"));
    if (kind == "FNM") {
      put(eval_FNM(p, t, ctx));
    } else if (kind == "FNM_L") {
      put(eval_FNM_L(p, spec.at("L").get<int>(), t, ctx));
    } else if (kind == "FNM_Lkl") {
      put(eval_FNM_Lkl(p, spec.at("L").get<int>(), spec.at("k").get<int>(), spec.at("l").get<int>(),
                       t, ctx));
    } else if (kind == "GNM_Lkl") {
      put(eval_GNM_Lkl(p, spec.at("L").get<int>(), spec.at("k").get<int>(), spec.at("l").get<int>(),
                       t, ctx));
    } else if (kind == "local") {
      if (!spec.contains("alpha")) throw ConfigError("local solutions need exponents alpha/beta/gamma");
      ComponentId id;
      if (spec.contains("component") && spec["component"].is_array()) {
        id.k = spec["component"][0].get<int>();
        id.l = spec["component"][1].get<int>();
      }
      bool warn = false;
      const cplx v = local_solution(p, spec.at("L").get<int>(), perm_from(spec, p.M()), id, t,
                                    ctx, &warn);
      out["component"] = id.str();
      out["value"] = from_complex(v);
      out["branch_warning"] = warn;
    } else {
      throw ConfigError("unknown series kind '" + kind + "'");
    }
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

std::string sum_str(const std::string& sym, int from, int to) {
  std::string s;
  for (int i = from; i <= to; ++i) s += (s.empty() ? "" : " + ") + sym + std::to_string(i);
  return s;
}

int cmd_exponents(int N, int M, int L, const std::string& params) {
  if (N < 1 || M < 1 || L < 0 || L > M) throw ConfigError("need N, M >= 1 and 0 <= L <= M");
  json out;
  out["N"] = N;
  out["M"] = M;
  out["L"] = L;
  json comps = json::array();
  std::vector<CVec> numeric;
  if (!params.empty()) {
    const json j = json::parse(read_text(params));
    QSettings st;
    if (j.contains("q")) st.q = to_complex(j["q"]);
    const QContext ctx(st);
    const ParamSet p = ParamSet::from_exponents(to_cvec(j.at("alpha")), to_cvec(j.at("beta")),
                                                to_cvec(j.at("gamma")), ctx);
    if (p.N() != N || p.M() != M) throw ConfigError("parameter sizes disagree with --N/--M");
    for (const auto& e : char_exponents(p, L)) numeric.push_back(e.delta);
  }
  const auto ids = component_ids(N, M);
  for (std::size_t c = 0; c < ids.size(); ++c) {
    const ComponentId& id = ids[c];
    json delta = json::array();
    for (int i = 1; i <= M; ++i) {
      std::string e = "0";
      if (id.is_zero()) {
        if (i > L) e = "-beta" + std::to_string(i);
      } else if (i > id.l) {
        e = "-beta" + std::to_string(i);
      } else if (i == id.l) {
        const std::string tail = sum_str("beta", id.l + 1, M);
        const std::string k = std::to_string(id.k);
        e = id.l <= L ? "1 - gamma" + k + (tail.empty() ? "" : " + " + tail)
                      : "-alpha" + k + (tail.empty() ? "" : " + " + tail);
      }
      delta.push_back(e);
    }
    json o;
    o["component"] = id.str();
    o["delta"] = delta;
    if (!numeric.empty()) {
      json nv = json::array();
      for (cplx z : numeric[c]) nv.push_back(from_complex(z));
      o["value"] = nv;
    }
    comps.push_back(o);
  }
  out["components"] = comps;
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qconnect: numerical checks for multivariable basic hypergeometric series"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run verification suites and emit a report");
  std::string config_path, out_path, format = "json";
  std::vector<std::string> suites;
  std::optional<double> q_real;
  std::optional<int> N, M, samples;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol, tail_tol;
  bool timing = false;
  run->add_option("config", config_path, "run configuration (JSON)");
  run->add_option("--q", q_real, "real q, overrides the config");
  run->add_option("--N", N, "number of a/c parameters");
  run->add_option("--M", M, "number of variables");
  run->add_option("--suite", suites, "suite to run (repeatable)");
  run->add_option("--samples", samples, "samples per suite");
  run->add_option("--seed", seed, "random seed");
  run->add_option("--tol", tol, "bound replacing every residual tolerance");
  run->add_option("--tail-tol", tail_tol, "series truncation tolerance");
  run->add_option("--out", out_path, "write the report here instead of stdout");
  run->add_option("--format", format, "json or table")->check(CLI::IsMember({"json", "table"}));
  run->add_flag("--timing", timing, "record per-check wall time (breaks byte determinism)");

  auto* ev = app.add_subcommand("eval", "evaluate one series from a JSON spec (file or inline)");
  std::string spec;
  ev->add_option("spec", spec, "series spec")->required();

  auto* ex = app.add_subcommand("exponents", "characteristic exponents of u^{L,id}");
  int eN = 1, eM = 1, eL = 0;
  std::string eparams;
  ex->add_option("--N", eN)->required();
  ex->add_option("--M", eM)->required();
  ex->add_option("--L", eL)->required();
  ex->add_option("--params", eparams, "exponents JSON (file or inline) for numeric values");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ev) return cmd_eval(spec);
    if (*ex) return cmd_exponents(eN, eM, eL, eparams);

    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (q_real) cfg.q = *q_real;
    if (N) cfg.N = *N;
    if (M) cfg.M = *M;
    if (!suites.empty()) cfg.suites = suites;
    if (samples) cfg.samples = *samples;
    if (seed) cfg.seed = *seed;
    if (tol) cfg.cmp_tol = *tol;
    if (tail_tol) cfg.tail_tol = *tail_tol;
    if (!out_path.empty()) cfg.output = out_path;
    if (timing) cfg.record_timing = true;
    const Report rep = run_suite(cfg);
    const ReportFormat fmt = format == "table" ? ReportFormat::Table : ReportFormat::Json;
    if (cfg.output.empty())
      std::cout << emit_report(rep, fmt);
    else
      write_report(rep, fmt, cfg.output);
    return rep.pass ? 0 : 1;
  } catch (const QError& e) {
    std::cerr << "qconnect: " << error_kind_name(e.kind()) << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "qconnect: " << e.what() << "\n";
    return 2;
  }
}
