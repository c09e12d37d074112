#include "bgt/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bgt/errors.hpp"
#include "bgt/fmf.hpp"
#include "bgt/gfunc.hpp"
#include "bgt/landscape.hpp"
#include "bgt/mathcore.hpp"
#include "bgt/mcmc.hpp"
#include "bgt/model.hpp"
#include "bgt/regions.hpp"
#include "bgt/setcover.hpp"

namespace bgt::cli {

namespace {

using nlohmann::json;

struct Globals {
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "csv";
  unsigned threads = 1;
  std::string caps;
  std::string config;
};

struct Caps {
  LandscapeCaps landscape;
  MCMCCaps mcmc;
  CoverCaps cover;
};

// "stratum=2e7,states=2e6,subsets=2e7,flat_k=20"
Caps parse_caps(const std::string& text) {
  Caps c;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw DomainError("--caps: expected key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    double v;
    try {
      v = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw DomainError("--caps: bad number in '" + item + "'");
    }
    if (key == "stratum") {
      c.landscape.stratum = v;
    } else if (key == "states") {
      c.mcmc.states = v;
    } else if (key == "subsets") {
      c.cover.subsets = v;
    } else if (key == "flat_k") {
      c.cover.flat_k = v;
    } else {
      throw DomainError("--caps: unknown key '" + key + "'");
    }
  }
  return c;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::uint64_t as_count(double v, const char* flag) {
  if (!(v >= 1.0) || v != std::floor(v) || v > 1.8e19) {
    throw DomainError(std::string(flag) + " must be a positive integer");
  }
  return static_cast<std::uint64_t>(v);
}

json opt_json(const std::optional<std::uint64_t>& v) { return v ? json(*v) : json(nullptr); }
json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// Instance source shared by gen, mcmc and landscape.
struct InstanceOpts {
  std::string file;
  double n = 0;
  double k = 0;
  double alpha = 0;
  double C = 0;
  std::uint64_t instance_seed = 0;
  CLI::Option* k_opt = nullptr;
  CLI::Option* alpha_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
};

void add_instance_options(CLI::App* sub, InstanceOpts& io, bool with_file) {
  if (with_file) sub->add_option("--instance", io.file, "Instance file (JSON or BGT1 binary)");
  sub->add_option("--n", io.n, "Population size");
  io.k_opt = sub->add_option("--k", io.k, "Infected count");
  io.alpha_opt = sub->add_option("--alpha", io.alpha, "k = floor(n^alpha)");
  sub->add_option("--C", io.C, "Test budget constant in (1,2)");
  io.seed_opt = sub->add_option("--instance-seed", io.instance_seed, "Instance seed (defaults to --seed)");
}

GTInstance load_instance(const InstanceOpts& io, std::uint64_t seed) {
  if (!io.file.empty()) {
    std::ifstream f(io.file, std::ios::binary);
    if (!f) throw DomainError("cannot open instance file " + io.file);
    std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (bytes.rfind("BGT1", 0) == 0) {
      std::istringstream is(bytes);
      return read_binary(is);
    }
    return instance_from_json_string(bytes);
  }
  if (io.n <= 0 || io.C <= 0) throw DomainError("need --instance or --n and --C");
  const std::uint64_t n = as_count(io.n, "--n");
  const std::uint64_t s = io.seed_opt->count() ? io.instance_seed : seed;
  if (io.k_opt->count()) return sample_instance_k(n, as_count(io.k, "--k"), io.C, s);
  if (io.alpha_opt->count()) return sample_instance(n, io.alpha, io.C, s);
  throw DomainError("need --k or --alpha");
}

struct Output {
  std::string body;
  bool binary = false;
  int code = kOk;
};

// gen ----------------------------------------------------------------------

struct GenOpts {
  InstanceOpts inst;
  bool binary = false;
};

Output run_gen(const GenOpts& o, const Globals& g) {
  const auto inst = load_instance(o.inst, g.seed);
  validate(inst);
  if (o.binary) {
    std::ostringstream os(std::ios::binary);
    write_binary(os, inst);
    return {os.str(), true};
  }
  if (g.format == "json") return {to_json_string(inst) + "\n"};
  std::string out = "test,outcome,members\n";
  for (std::size_t j = 0; j < inst.N; ++j) {
    out += std::to_string(j) + "," + (inst.outcomes[j] ? "1" : "0") + ",";
    for (std::size_t m = 0; m < inst.tests[j].size(); ++m) {
      if (m) out += ' ';
      out += std::to_string(inst.tests[j][m]);
    }
    out += "\n";
  }
  return {out};
}

// mcmc ---------------------------------------------------------------------

struct McmcOpts {
  InstanceOpts inst;
  double beta = 0;
  double beta_scale = 0;
  CLI::Option* beta_opt = nullptr;
  CLI::Option* scale_opt = nullptr;
  std::uint64_t steps = 100000;
  std::string init = "uniform";
  std::vector<std::uint32_t> init_state;
  std::size_t stop_overlap = 0;
  CLI::Option* stop_overlap_opt = nullptr;
  bool stop_zero = false;
  std::uint64_t record_every = 1;
  std::string kernel = "glauber";
  std::size_t chains = 1;
};

Output run_mcmc(const McmcOpts& o, const Globals& g) {
  const auto pr = comp_prune(load_instance(o.inst, g.seed));
  ChainConfig cfg;
  if (o.beta_opt->count()) {
    cfg.beta = o.beta;
  } else if (o.scale_opt->count()) {
    cfg.beta = scaled_beta(o.beta_scale, pr.k(), pr.p());
  } else {
    throw DomainError("need --beta or --beta-scale");
  }
  cfg.max_steps = o.steps;
  if (!o.init_state.empty()) {
    cfg.init = InitKind::Explicit;
    cfg.explicit_state = KSubset(o.init_state, pr.p(), pr.k());
  } else if (o.init == "uniform") {
    cfg.init = InitKind::UniformRandomKSubset;
  } else if (o.init == "disjoint") {
    cfg.init = InitKind::DisjointFromPlanted;
  } else {
    throw DomainError("--init must be uniform or disjoint");
  }
  if (o.stop_overlap_opt->count()) cfg.stop_overlap = o.stop_overlap;
  cfg.stop_at_zero_energy = o.stop_zero;
  cfg.record_every = o.record_every;
  cfg.seed = g.seed;
  if (o.kernel == "glauber") {
    cfg.kernel = Kernel::Glauber;
  } else if (o.kernel == "metropolis") {
    cfg.kernel = Kernel::Metropolis;
  } else {
    throw DomainError("--kernel must be glauber or metropolis");
  }

  if (o.chains > 1) {
    std::vector<std::uint64_t> seeds;
    for (std::size_t i = 0; i < o.chains; ++i) seeds.push_back(g.seed + i);
    const auto runs = run_ensemble(pr, cfg, seeds, g.threads);
    if (g.format == "json") return {ensemble_to_json_string(runs) + "\n"};
    std::string out = "seed,hit_step,zero_energy_step,success,final_energy,wall_time_s\n";
    for (const auto& e : runs) {
      out += std::to_string(e.seed) + "," + (e.hit_step ? std::to_string(*e.hit_step) : "") + "," +
             (e.zero_energy_step ? std::to_string(*e.zero_energy_step) : "") + "," +
             (e.success ? "1" : "0") + "," + num(e.final_energy) + "," + num(e.wall_seconds) + "\n";
    }
    return {out};
  }

  const auto tr = run_chain(pr, cfg);
  if (g.format != "json") return {tr.to_csv()};
  json j;
  j["beta"] = cfg.beta;
  j["M"] = pr.M();
  j["p"] = pr.p();
  j["k"] = pr.k();
  j["steps_run"] = tr.steps_run;
  j["accepted_moves"] = tr.accepted_moves;
  j["hit_step"] = opt_json(tr.hit_step);
  j["zero_energy_step"] = opt_json(tr.zero_energy_step);
  j["final_state"] = std::vector<std::uint32_t>(tr.final_state.members().begin(), tr.final_state.members().end());
  j["trace"] = {{"step", tr.steps}, {"energy", tr.energies}, {"overlap", tr.overlaps},
                {"accepted_cum", tr.accepted_cum}};
  return {j.dump(2) + "\n"};
}

// landscape ----------------------------------------------------------------

struct LandscapeOpts {
  InstanceOpts inst;
  std::string mode = "phi";
  double zeta1 = 0, zeta2 = 0, r = 0, delta = 0;
  CLI::Option* zeta1_opt = nullptr;
  double beta = 0;
  double eps1 = 0.5;
};

Output run_landscape(const LandscapeOpts& o, const Globals& g, const Caps& caps) {
  const auto pr = comp_prune(load_instance(o.inst, g.seed));
  const bool js = g.format == "json";
  if (o.mode == "phi") {
    const auto c = phi_curve(pr, caps.landscape);
    if (!js) return {c.to_csv()};
    json j;
    j["k"] = c.k;
    j["M"] = c.M;
    j["l"] = c.l_values;
    j["phi"] = c.phi;
    j["phiM_int"] = c.phi_uncovered;
    json w = json::array();
    for (const auto& s : c.argmin_witness) {
      w.push_back(s ? json(std::vector<std::uint32_t>(s->members().begin(), s->members().end())) : json(nullptr));
    }
    j["argmin_witness"] = w;
    return {j.dump(2) + "\n"};
  }
  if (o.mode == "z") {
    std::string out = "l,t,count\n";
    json j = json::object();
    for (std::size_t l = 0; l <= pr.k(); ++l) {
      if (stratum_size(pr, l) == 0.0) continue;
      const auto h = stratum_histogram(pr, l, caps.landscape);
      std::uint64_t cum = 0;
      std::vector<std::uint64_t> row;
      for (std::size_t t = 0; t <= pr.M(); ++t) {
        cum += h.counts[t];
        row.push_back(cum);
        out += std::to_string(l) + "," + std::to_string(t) + "," + std::to_string(cum) + "\n";
      }
      j[std::to_string(l)] = row;
    }
    if (!js) return {out};
    return {json{{"M", pr.M()}, {"k", pr.k()}, {"Z", j}}.dump(2) + "\n"};
  }
  if (o.mode == "bogp") {
    const auto c = phi_curve(pr, caps.landscape);
    BOGPReport rep;
    if (o.zeta1_opt->count()) {
      rep = detect_bogp(c, o.zeta1, o.zeta2, o.r, o.delta);
    } else if (const auto best = search_bogp(c)) {
      rep = detect_bogp(c, best->zeta1, best->zeta2, best->r, best->delta);
    }
    if (js) return {to_json_string(rep) + "\n"};
    return {"holds,zeta1,zeta2,r,delta\n" + std::string(rep.holds ? "1" : "0") + "," + num(rep.zeta1) + "," +
            num(rep.zeta2) + "," + num(rep.r) + "," + num(rep.delta) + "\n"};
  }
  if (o.mode == "bottleneck") {
    const double ratio = bottleneck_ratio(pr, o.beta, o.eps1, caps.mcmc);
    if (js) return {json{{"beta", o.beta}, {"eps1", o.eps1}, {"ratio", ratio}}.dump(2) + "\n"};
    return {"beta,eps1,ratio\n" + num(o.beta) + "," + num(o.eps1) + "," + num(ratio) + "\n"};
  }
  throw DomainError("--mode must be phi, z, bogp or bottleneck");
}

// fmf ----------------------------------------------------------------------

struct FmfOpts {
  double n = 0, alpha = 0, C = 0, a = 0;
  CLI::Option* a_opt = nullptr;
  double c_r = 0, c_s = 0, c_i = 0;
  double M = 0, p = 0, k = 0;
  CLI::Option* M_opt = nullptr;
  CLI::Option* p_opt = nullptr;
  CLI::Option* k_opt = nullptr;
  std::string grid;
  bool compare = false;
  bool continuous = false;
};

Output run_fmf(const FmfOpts& o, const Globals& g) {
  if (o.n <= 0) throw DomainError("need --n");
  const double a = o.a_opt->count() ? o.a : a_inf(o.alpha, o.C) + 1e-9;
  auto params = FMFParams::from_surrogates(o.n, o.alpha, o.C, a,
                                           o.continuous ? BinomialMode::Continuous : BinomialMode::Floored);
  if (o.k_opt->count()) params.k = as_count(o.k, "--k");
  if (o.M_opt->count()) params.M = o.M;
  if (o.p_opt->count()) params.p = o.p;
  params.c_r = o.c_r;
  params.c_s = o.c_s;
  params.c_i = o.c_i;
  validate(params);
  const auto grid = o.grid.empty() ? default_grid(params.k) : parse_grid(o.grid);
  const auto curve = solve_curve(params, grid, o.compare);
  if (g.format != "json") return {curve.to_csv()};
  json j;
  j["params"] = {{"alpha", params.alpha}, {"C", params.C}, {"a", params.a}, {"c_r", params.c_r},
                 {"c_s", params.c_s}, {"c_i", params.c_i}, {"k", params.k}, {"M", params.M},
                 {"p", params.p}, {"binomials", o.continuous ? "continuous" : "floored"}};
  j["x"] = curve.x_grid;
  json ys = json::array(), yu = json::array(), res = json::array(), flags = json::array();
  for (std::size_t i = 0; i < curve.x_grid.size(); ++i) {
    ys.push_back(opt_json(curve.y[i]));
    res.push_back(curve.y[i] ? json(curve.residuals[i]) : json(nullptr));
    const auto& f = curve.feasible[i];
    flags.push_back({{"r", f.r}, {"s", f.s}, {"exist", f.exist}, {"uni", f.uni}});
    if (o.compare) yu.push_back(opt_json(curve.y_unconditional[i]));
  }
  j["y"] = ys;
  j["residual"] = res;
  j["feasible"] = flags;
  if (o.compare) j["y_unconditional"] = yu;
  const auto nm = nonmonotonicity(curve);
  j["nonmonotonicity"] = nm ? json{{"eps1", nm->eps1}, {"delta1", nm->delta1}} : json(nullptr);
  try {
    j["y_zero"] = y_zero(params);
  } catch (const DomainError&) {
    j["y_zero"] = nullptr;
  }
  j["h_c"] = h_c(params.C);
  return {j.dump(2) + "\n"};
}

// region / critical-c ------------------------------------------------------

struct RegionOpts {
  double alpha_lo = 1e-4, alpha_hi = 0.027;
  std::size_t alpha_n = 20;
  double C_lo = 1.01, C_hi = 1.99;
  std::size_t C_n = 50;
};

Output run_region(const RegionOpts& o, const Globals& g) {
  const auto rep = region_scan(o.alpha_lo, o.alpha_hi, o.alpha_n, o.C_lo, o.C_hi, o.C_n, g.threads);
  if (g.format != "json") return {rep.to_csv()};
  json arr = json::array();
  for (const auto& p : rep.grid) {
    arr.push_back({{"alpha", p.alpha}, {"C", p.C}, {"a", p.a_used}, {"fmf_exists", p.fmf_exists_ok},
                   {"der0", p.der0_ok}, {"alphaC", p.alphaC_ok}, {"all_ok", p.all_ok}});
  }
  return {json{{"grid", arr}}.dump(2) + "\n"};
}

Output run_critical_c(double alpha, const Globals& g) {
  const auto r = critical_c(alpha);
  if (g.format == "json") {
    return {json{{"alpha", alpha}, {"C_star", r.C}, {"residual", r.residual}}.dump(2) + "\n"};
  }
  return {"alpha,C_star,residual\n" + num(alpha) + "," + num(r.C) + "," + num(r.residual) + "\n"};
}

// cover --------------------------------------------------------------------

struct CoverOpts {
  double P = 0, M = 0, k = 0;
  double n = 0, alpha = 0, C = 0;
  CLI::Option* C_opt = nullptr;
  std::size_t trials = 100;
  double flat_y = 0;
  CLI::Option* flat_opt = nullptr;
  double c_dl = 0;
};

Output run_cover(const CoverOpts& o, const Globals& g, const Caps& caps) {
  CoverDims d{};
  if (o.P > 0) {
    d = {as_count(o.P, "--P"), as_count(o.M, "--M"), as_count(o.k, "--k")};
  } else if (o.n > 0) {
    d = cover_dims_from_model(as_count(o.n, "--n"), o.alpha, o.C);
  } else {
    throw DomainError("need --P --M --k or --n --alpha --C");
  }
  const auto inst = sample_cover(d.P, d.M, d.k, g.seed);
  const auto exact = phi_k_exact(inst, caps.cover);
  const auto greedy = phi_k_greedy(inst);
  const double rnd = phi_k_random_mean(inst, o.trials, g.seed);
  json j = json::parse(cover_report_json(inst, exact, greedy, rnd, o.C_opt->count() ? o.C : 2.0));
  if (!o.C_opt->count()) {
    j["phi_limit"] = nullptr;
    j["C"] = nullptr;
  }
  if (o.flat_opt->count()) {
    const auto fc = count_flat(inst, o.flat_y, o.c_dl, caps.cover);
    j["flat"] = {{"t", fc.t}, {"y_used", fc.y_used}, {"c_dl", o.c_dl}, {"Y", fc.Y},
                 {"Z_exact", fc.Z_exact}, {"Z_at_most", fc.Z_at_most}};
  }
  if (g.format == "json") return {j.dump(2) + "\n"};
  std::string out = "P,M,k,q,seed,phi_exact,phi_greedy,phi_random_mean,phi_limit\n";
  out += std::to_string(inst.universe_size) + "," + std::to_string(inst.num_sets) + "," +
         std::to_string(inst.k) + "," + num(inst.q) + "," + std::to_string(inst.seed) + "," +
         num(exact.phi) + "," + num(greedy.phi) + "," + num(rnd) + "," +
         (o.C_opt->count() ? num(phi_k_limit(o.C)) : std::string()) + "\n";
  return {out};
}

// gfun ---------------------------------------------------------------------

struct GfunOpts {
  std::vector<double> ys{0.2};
  std::size_t points = 2001;
  double lo = 1e-3;
};

Output run_gfun(const GfunOpts& o, const Globals& g) {
  GOptions go;
  go.grid_points = o.points;
  go.grid_lo = o.lo;
  std::vector<GReport> reps;
  bool ok = true;
  for (double y : o.ys) {
    reps.push_back(verify_g_properties(y, go));
    ok = ok && reps.back().passed;
  }
  Output out;
  out.code = ok ? kOk : kNumerical;
  if (g.format == "json") {
    json arr = json::array();
    for (const auto& r : reps) arr.push_back(json::parse(r.to_json()));
    out.body = json{{"reports", arr}}.dump(2) + "\n";
  } else if (reps.size() == 1) {
    out.body = reps[0].to_csv();
  } else {
    out.body = "y,passed,concave,positive,endpoints_vanish,derivative_limits_match,derprime_bounds,"
               "min_interior_value,d0_limit,d1_limit\n";
    for (const auto& r : reps) {
      out.body += num(r.y) + "," + std::to_string(r.passed) + "," + std::to_string(r.concave) + "," +
                  std::to_string(r.positive) + "," + std::to_string(r.endpoints_vanish) + "," +
                  std::to_string(r.derivative_limits_match) + "," + std::to_string(r.derprime_bounds) +
                  "," + num(r.min_interior_value) + "," + num(r.d0_limit) + "," + num(r.d1_limit) + "\n";
    }
  }
  return out;
}

// config / manifest --------------------------------------------------------

const char* const kCommands[] = {"gen", "mcmc", "landscape", "fmf", "region", "critical-c", "cover", "gfun"};

bool is_command(const std::string& s) {
  for (const char* c : kCommands) {
    if (s == c) return true;
  }
  return false;
}

bool has_flag(const std::vector<std::string>& args, const std::string& flag) {
  for (const auto& a : args) {
    if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
  }
  return false;
}

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  if (v.is_number_float()) return num(v.get<double>());
  throw DomainError("--config: unsupported value " + v.dump());
}

// Merges a JSON config file into the argument list. Keys mirror long flag
// names; the optional "command" key names the subcommand. Flags given on the
// command line win.
std::vector<std::string> apply_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream f(path);
  if (!f) throw DomainError("cannot open config file " + path);
  json cfg;
  try {
    cfg = json::parse(f);
  } catch (const json::parse_error& e) {
    throw DomainError(std::string("config file is not valid JSON: ") + e.what());
  }
  if (!cfg.is_object()) throw DomainError("config file must hold a JSON object");
  bool have_cmd = false;
  for (const auto& a : args) have_cmd = have_cmd || is_command(a);
  if (cfg.contains("command") && !have_cmd) args.push_back(cfg["command"].get<std::string>());
  for (const auto& [key, val] : cfg.items()) {
    if (key == "command" || key == "config") continue;
    const std::string flag = "--" + key;
    if (has_flag(args, flag)) continue;
    if (val.is_boolean()) {
      if (val.get<bool>()) args.push_back(flag);
    } else if (val.is_array()) {
      args.push_back(flag);
      for (const auto& x : val) args.push_back(scalar_text(x));
    } else {
      args.push_back(flag);
      args.push_back(scalar_text(val));
    }
  }
  return args;
}

json option_values(const CLI::App* app) {
  json params = json::object();
  for (const CLI::Option* opt : app->get_options()) {
    const std::string name = opt->get_name(false, true);
    if (name.empty() || name == "--help" || name == "-h") continue;
    const auto& res = opt->results();
    if (!res.empty()) {
      params[name] = res.size() == 1 ? json(res[0]) : json(res);
    } else if (!opt->get_default_str().empty()) {
      params[name] = opt->get_default_str();
    }
  }
  return params;
}

// Rounds every float in j to 12 significant digits.
void round_floats(json& j) {
  if (j.is_number_float()) {
    j = std::strtod(num(j.get<double>()).c_str(), nullptr);
  } else if (j.is_structured()) {
    for (auto& v : j) round_floats(v);
  }
}

unsigned default_threads() {
  if (const char* env = std::getenv("BGT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return 1;
}

}  // namespace

int dispatch(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::string> args;
  try {
    args = apply_config(raw_args);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  CLI::App app{"Bernoulli group testing landscape toolkit", "bgt"};
  app.fallthrough();
  app.require_subcommand(1);
  Globals g;
  g.threads = default_threads();
  app.add_option("--seed", g.seed, "Seed for all randomness")->capture_default_str();
  app.add_option("--out", g.out, "Output file (manifest goes to <out>.manifest.json)");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads (default: BGT_THREADS or 1)")->capture_default_str();
  app.add_option("--caps", g.caps, "Enumeration caps, e.g. stratum=2e7,states=2e6,subsets=2e7,flat_k=20");
  app.add_option("--config", g.config, "JSON file mirroring the flags");

  GenOpts gen;
  auto* s_gen = app.add_subcommand("gen", "Sample an instance and serialize it");
  add_instance_options(s_gen, gen.inst, false);
  s_gen->add_flag("--binary", gen.binary, "Write the BGT1 binary format (requires --out)");

  McmcOpts mc;
  auto* s_mc = app.add_subcommand("mcmc", "Run a chain or an ensemble of chains");
  add_instance_options(s_mc, mc.inst, true);
  mc.beta_opt = s_mc->add_option("--beta", mc.beta, "Inverse temperature");
  mc.scale_opt = s_mc->add_option("--beta-scale", mc.beta_scale, "beta = c k log(p/k)");
  s_mc->add_option("--steps", mc.steps, "Step budget")->capture_default_str();
  s_mc->add_option("--init", mc.init, "uniform or disjoint")->capture_default_str();
  s_mc->add_option("--init-state", mc.init_state, "Explicit initial k-subset (candidate-local indices)");
  mc.stop_overlap_opt = s_mc->add_option("--stop-overlap", mc.stop_overlap, "Stop at this overlap");
  s_mc->add_flag("--stop-zero", mc.stop_zero, "Stop at zero energy");
  s_mc->add_option("--record-every", mc.record_every, "Trace stride")->capture_default_str();
  s_mc->add_option("--kernel", mc.kernel, "glauber or metropolis")->capture_default_str();
  s_mc->add_option("--chains", mc.chains, "Number of chains (seeds seed..seed+chains-1)")->capture_default_str();

  LandscapeOpts ls;
  auto* s_ls = app.add_subcommand("landscape", "Exact phi curve, Z table, b-OGP search, bottleneck ratio");
  add_instance_options(s_ls, ls.inst, true);
  s_ls->add_option("--mode", ls.mode, "phi, z, bogp or bottleneck")->capture_default_str();
  ls.zeta1_opt = s_ls->add_option("--zeta1", ls.zeta1, "b-OGP window start");
  s_ls->add_option("--zeta2", ls.zeta2, "b-OGP window end");
  s_ls->add_option("--r", ls.r, "b-OGP threshold");
  s_ls->add_option("--delta", ls.delta, "b-OGP height");
  s_ls->add_option("--beta", ls.beta, "Inverse temperature for the bottleneck ratio")->capture_default_str();
  s_ls->add_option("--eps1", ls.eps1, "Bottleneck overlap fraction")->capture_default_str();

  FmfOpts fm;
  auto* s_fm = app.add_subcommand("fmf", "Solve the first moment function on a grid");
  s_fm->add_option("--n", fm.n, "Population size for surrogate scales")->required();
  s_fm->add_option("--alpha", fm.alpha, "alpha")->required();
  s_fm->add_option("--C", fm.C, "C")->required();
  fm.a_opt = s_fm->add_option("--a", fm.a, "Conditioning constant (default a_inf + 1e-9)");
  s_fm->add_option("--c-r", fm.c_r, "Slack on the r constraint")->capture_default_str();
  s_fm->add_option("--c-s", fm.c_s, "Slack on the s constraint")->capture_default_str();
  s_fm->add_option("--c-i", fm.c_i, "Slack on the uniqueness constraint")->capture_default_str();
  fm.M_opt = s_fm->add_option("--M", fm.M, "Override M (empirical)");
  fm.p_opt = s_fm->add_option("--p", fm.p, "Override p (empirical)");
  fm.k_opt = s_fm->add_option("--k", fm.k, "Override k");
  s_fm->add_option("--grid", fm.grid, "lo:hi:step (default l/k)");
  s_fm->add_flag("--compare-unconditional", fm.compare, "Add the unconditional curve");
  s_fm->add_flag("--continuous", fm.continuous, "Log-gamma prefactor with real xk");

  RegionOpts rg;
  auto* s_rg = app.add_subcommand("region", "Scan the assumption checks over (alpha, C)");
  s_rg->add_option("--alpha-lo", rg.alpha_lo)->capture_default_str();
  s_rg->add_option("--alpha-hi", rg.alpha_hi)->capture_default_str();
  s_rg->add_option("--alpha-n", rg.alpha_n)->capture_default_str();
  s_rg->add_option("--C-lo", rg.C_lo)->capture_default_str();
  s_rg->add_option("--C-hi", rg.C_hi)->capture_default_str();
  s_rg->add_option("--C-n", rg.C_n)->capture_default_str();

  double cc_alpha = 1e-8;
  auto* s_cc = app.add_subcommand("critical-c", "Critical C for the derivative condition");
  s_cc->add_option("--alpha", cc_alpha, "alpha")->capture_default_str();

  CoverOpts cv;
  auto* s_cv = app.add_subcommand("cover", "Random MAX k-set cover: exact/greedy Phi_k and flatness");
  s_cv->add_option("--P", cv.P, "Universe size");
  s_cv->add_option("--M", cv.M, "Number of sets");
  s_cv->add_option("--k", cv.k, "Cover size");
  s_cv->add_option("--n", cv.n, "Derive (P, M, k) from a group testing model");
  s_cv->add_option("--alpha", cv.alpha, "alpha for --n");
  cv.C_opt = s_cv->add_option("--C", cv.C, "C for --n and the limiting value");
  s_cv->add_option("--trials", cv.trials, "Random-guess trials")->capture_default_str();
  cv.flat_opt = s_cv->add_option("--flat-y", cv.flat_y, "Count flat subsets at this uncovered fraction");
  s_cv->add_option("--c-dl", cv.c_dl, "Flatness radius constant")->capture_default_str();

  GfunOpts gf;
  auto* s_gf = app.add_subcommand("gfun", "Certify the G-breve properties on a grid");
  s_gf->add_option("--y", gf.ys, "y values in (0, 1/2)")->capture_default_str();
  s_gf->add_option("--points", gf.points, "Grid points")->capture_default_str();
  s_gf->add_option("--lo", gf.lo, "Grid is [lo, 1-lo]")->capture_default_str();

  std::vector<const char*> argv{"bgt"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  Output result;
  try {
    const Caps caps = parse_caps(g.caps);
    if (g.threads == 0) throw DomainError("--threads must be >= 1");
    if (sub == s_gen) {
      if (gen.binary && g.out.empty()) throw DomainError("--binary requires --out");
      result = run_gen(gen, g);
    } else if (sub == s_mc) {
      result = run_mcmc(mc, g);
    } else if (sub == s_ls) {
      result = run_landscape(ls, g, caps);
    } else if (sub == s_fm) {
      result = run_fmf(fm, g);
    } else if (sub == s_rg) {
      result = run_region(rg, g);
    } else if (sub == s_cc) {
      result = run_critical_c(cc_alpha, g);
    } else if (sub == s_cv) {
      result = run_cover(cv, g, caps);
    } else {
      result = run_gfun(gf, g);
    }
  } catch (const CapExceeded& e) {
    err << "error: " << e.what() << "\n";
    return kCap;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n(run `bgt " << sub->get_name() << " --help` for usage)\n";
    return kUsage;
  } catch (const NumericalFailure& e) {
    err << "error: " << e.what() << "\n";
    return kNumerical;
  } catch (const UndefinedEnergy& e) {
    err << "error: " << e.what() << "\n";
    return kNumerical;
  } catch (const FrozenChain& e) {
    err << "error: " << e.what() << "\n";
    return kNumerical;
  }

  if (g.format == "json" && sub != s_gen) {
    json j = json::parse(result.body);
    round_floats(j);
    result.body = j.dump(2) + "\n";
  }

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json manifest;
  manifest["command"] = sub->get_name();
  json params = option_values(&app);
  params.update(option_values(sub));
  manifest["params"] = params;
  manifest["seeds"] = {g.seed};
  manifest["tool_version"] = kToolVersion;
  manifest["fp_env"] = "IEEE-754 binary64, round-to-nearest, no FMA contraction";
  manifest["outputs"] = g.out.empty() ? json::array() : json::array({g.out});
  manifest["wall_time_s"] = wall;
  manifest["exit_code"] = result.code;

  if (g.out.empty()) {
    out << result.body;
    err << manifest.dump() << "\n";
  } else {
    std::ofstream f(g.out, std::ios::binary);
    if (!f) {
      err << "error: cannot write " << g.out << "\n";
      return kUsage;
    }
    f << result.body;
    std::ofstream m(g.out + ".manifest.json");
    m << manifest.dump(2) << "\n";
  }
  return result.code;
}

int dispatch(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace bgt::cli
