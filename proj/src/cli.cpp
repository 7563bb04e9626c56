#include "cscale/cli.hpp"

#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "cscale/bergman.hpp"
#include "cscale/error.hpp"
#include "cscale/geometry.hpp"
#include "cscale/harmonic.hpp"
#include "cscale/invmetrics.hpp"
#include "cscale/scaling.hpp"
#include "cscale/wu.hpp"

namespace cscale {

namespace {

const std::vector<std::string> kFlagKeys = {"domain", "dim", "k", "m", "point", "xi", "trunc",
                                            "tol", "grid", "seed", "out", "format"};

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size() && item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidArgument, "config key '" + key + "': cannot parse '" + text + "'");
    }
  }
  if (out.empty()) throw Error(ErrorKind::InvalidArgument, "config key '" + key + "': empty list");
  return out;
}

/// Reads typed values and records the effective value of every key read.
class Resolver {
 public:
  explicit Resolver(const KeyValueConfig& c) : c_(c) {}

  std::string str(const std::string& key, const std::string& def) {
    const std::string v = c_.get_string(key, def);
    resolved[key] = v;
    return v;
  }
  int integer(const std::string& key, int def) {
    const int v = c_.get_int(key, def);
    resolved[key] = c_.has(key) ? *c_.get(key) : std::to_string(def);
    return v;
  }
  double real(const std::string& key, double def) {
    const double v = c_.get_double(key, def);
    resolved[key] = c_.has(key) ? *c_.get(key) : format_double(def);
    return v;
  }
  bool flag(const std::string& key, bool def) {
    const bool v = c_.get_bool(key, def);
    resolved[key] = c_.has(key) ? *c_.get(key) : (def ? "true" : "false");
    return v;
  }
  CVec point(const std::string& key, const CVec& def, int dim) {
    auto p = c_.get_point(key);
    CVec v = p ? *p : def;
    if (v.size() != dim) {
      throw Error(ErrorKind::InvalidArgument, "config key '" + key + "': expected " + std::to_string(dim) +
                                                  " coordinates, got " + std::to_string(v.size()));
    }
    resolved[key] = p ? *c_.get(key) : format_point(def);
    return v;
  }
  std::vector<double> list(const std::string& key, const std::string& def) {
    const std::string text = c_.get_string(key, def);
    resolved[key] = text;
    return parse_list(key, text);
  }

  nlohmann::json resolved = nlohmann::json::object();

 private:
  const KeyValueConfig& c_;
};

CVec unit(int dim, int j) {
  CVec e = CVec::Zero(dim);
  e[j] = 1.0;
  return e;
}

struct DomainChoice {
  std::string name;
  CatalogParams params;
  DefiningFunction rho;
};

DomainChoice read_domain(Resolver& r, const std::string& def_name = "ball") {
  DomainChoice c;
  c.name = r.str("domain", def_name);
  c.params.dim = r.integer("dim", c.name == "disc" ? 1 : 2);
  c.params.k = r.integer("k", c.name == "egg" ? 2 : 1);
  c.params.m = r.integer("m", 1);
  c.params.radius = r.real("radius", 1.0);
  c.rho = make_catalog_domain(c.name, c.params);
  return c;
}

/// Default boundary point: the origin for the unbounded models, e0 otherwise.
CVec default_boundary_point(const DomainChoice& d) {
  const int n = d.rho.dim();
  if (d.rho.traits().bounded) return unit(n, 0);
  return CVec::Zero(n);
}

nlohmann::json metric_json(const MetricValue& v) {
  return {{"value", v.value}, {"lower", v.lower}, {"upper", v.upper}, {"method", to_string(v.method)}};
}

void cmd_levi(Resolver& r, RunResult& res) {
  auto d = read_domain(r);
  const CVec p = r.point("point", default_boundary_point(d), d.rho.dim());
  LeviOptions o;
  o.normalize = r.flag("normalize", false);
  res.report = to_json(levi_classify(d.rho, p, o));
}

void cmd_type(Resolver& r, RunResult& res) {
  auto d = read_domain(r);
  const CVec p = r.point("point", default_boundary_point(d), d.rho.dim());
  ContactSearch s;
  s.max_p = r.integer("max_order", s.max_p);
  s.max_q = s.max_p;
  const auto rep = order_of_contact(d.rho, p, s);
  res.report = to_json(rep);
  res.verdict = rep.finite_type ? "pass" : "na";
}

void cmd_metric(Resolver& r, RunResult& res) {
  auto d = read_domain(r);
  const int n = d.rho.dim();
  const CVec q = r.point("point", CVec::Zero(n), n);
  const CVec xi = r.point("xi", unit(n, 0), n);
  res.report = metric_json(kobayashi_metric(d.rho, q, xi));
  res.report["point"] = complex_to_json(q);
  res.report["xi"] = complex_to_json(xi);
}

void cmd_graham(Resolver& r, RunResult& res) {
  auto d = read_domain(r);
  const int n = d.rho.dim();
  const CVec p = r.point("point", default_boundary_point(d), n);
  const CVec xi = r.point("xi", unit(n, 0), n);
  const int levels = r.integer("t_levels", 10);
  const double tol = r.real("tol", 1e-3);
  const auto rep = graham_asymptotics(d.rho, p, xi, dyadic_list(1, levels), tol);
  res.report = to_json(rep);
  res.csv = rep.to_csv();
  res.verdict = rep.verdict();
}

void cmd_lee(Resolver& r, RunResult& res) {
  auto d = read_domain(r);
  const int n = d.rho.dim();
  const CVec p = r.point("point", default_boundary_point(d), n);
  const CVec xi = r.point("xi", unit(n, 0), n);
  const int levels = r.integer("t_levels", 10);
  const double tol = r.real("tol", 2e-2);
  const CVec normal = d.rho.outward_normal(p);
  std::vector<CVec> qs;
  for (double t : dyadic_list(1, levels)) qs.push_back(p - t * normal);
  const auto rep = lee_ratio(d.rho, p, xi, qs, tol);
  res.report = to_json(rep);
  res.csv = rep.to_csv();
  res.verdict = rep.verdict();
}

BergmanDomain read_bergman_domain(Resolver& r, const std::string& def_name) {
  BergmanDomain b;
  b.tag = r.str("domain", def_name);
  b.dim = r.integer("dim", b.tag == "disc" ? 1 : 2);
  b.k = r.integer("k", 2);
  b.radius = r.real("radius", 1.0);
  return b;
}

void cmd_bergman(Resolver& r, RunResult& res) {
  const auto b = read_bergman_domain(r, "disc");
  const int trunc = r.integer("trunc", 32);
  const double tol = r.real("tol", 1e-12);
  const auto kern = monomial_norms(b, trunc, tol);
  const int n = b.tag == "disc" ? 1 : b.dim;
  const CVec z = r.point("point", CVec::Zero(n), n);
  const CVec w = r.point("w", z, n);
  const auto kv = bergman_kernel_checked(kern, z, w);
  res.report = {{"kernel", {kv.value.real(), kv.value.imag()}},
                {"tail", kv.tail},
                {"metric", complex_to_json(bergman_metric(kern, z))},
                {"volume", kern.volume},
                {"basis_size", kern.size()},
                {"trunc", trunc}};
  res.csv = kern.to_csv();
}

void cmd_klembeck(Resolver& r, RunResult& res) {
  const auto b = read_bergman_domain(r, "ball");
  const int n = b.tag == "disc" ? 1 : b.dim;
  const bool egg = b.tag == "egg";
  const int trunc = r.integer("trunc", 48);
  const double tol = r.real("tol", egg ? 5e-2 : 1e-4);
  const CVec p = r.point("point", egg ? unit(n, 1) : unit(n, 0), n);
  const CVec xi = r.point("xi", egg || n == 1 ? unit(n, 0) : unit(n, 1), n);
  const auto ts = r.list("t_list", egg ? "0.5,0.4,0.3,0.2" : "0.5,0.4,0.3");
  const auto rep = klembeck_harness(b, p, ts, xi, trunc, tol);
  res.report = to_json(rep);
  res.csv = rep.to_csv();
  res.verdict = rep.verdict();
}

void cmd_wu(Resolver& r, RunResult& res) {
  auto d = read_domain(r);
  const int n = d.rho.dim();
  const CVec q = r.point("point", CVec::Zero(n), n);
  const int resolution = r.integer("grid", 32);
  const double tol = r.real("tol", 1e-8);
  const bool refine = r.flag("refine", true);
  const int max_res = r.integer("max_resolution", 256);
  res.report = to_json(wu_metric(d.rho, q, resolution, tol, refine, max_res));
}

void cmd_poisson(Resolver& r, RunResult& res) {
  const std::string name = r.str("domain", "disc");
  if (name != "disc" && name != "ball") {
    throw Error(ErrorKind::InvalidArgument, "config key 'domain': poisson supports disc and ball");
  }
  const int dim = r.integer("dim", name == "disc" ? 1 : 2);
  if (name == "disc" && dim != 1) throw Error(ErrorKind::InvalidArgument, "config key 'dim': disc has dim 1");
  const int n = r.integer("n", 2 * dim - 1);
  PoissonGrid g;
  g.levels = r.integer("levels", g.levels);
  g.radial = r.integer("radial", g.radial);
  g.angular = r.integer("angular", g.angular);
  const double tol = r.real("tol", 1e-8);
  auto scan = poisson_bound_scan(n, g);
  nlohmann::json norm = nlohmann::json::array();
  double worst = 0.0;
  for (double radius : {0.0, 0.5, 0.9, 0.99}) {
    const double err = std::abs(poisson_integral(radius, n) - 1.0);
    worst = std::max(worst, err);
    norm.push_back({{"r", radius}, {"error", err}});
  }
  res.report = to_json(scan);
  res.report["normalization"] = norm;
  res.report["normalization_tolerance"] = tol;
  res.csv = scan.to_csv();
  res.verdict = scan.pass && worst <= tol ? "pass" : "fail";
  res.report["verdict"] = res.verdict;
}

void cmd_scale(Resolver& r, const KeyValueConfig& values, RunResult& res) {
  const OrbitSpec o = OrbitSpec::from_config(values);
  auto& rv = r.resolved;
  rv["domain"] = o.domain;
  rv["dim"] = std::to_string(o.params.dim);
  rv["k"] = std::to_string(o.params.k);
  rv["m"] = std::to_string(o.params.m);
  rv["radius"] = values.has("radius") ? *values.get("radius") : format_double(o.params.radius);
  rv["family"] = o.family;
  rv["base_point"] = values.has("base_point") ? *values.get("base_point") : format_point(o.base_point);
  rv["accumulation_point"] =
      values.has("accumulation_point") ? *values.get("accumulation_point") : format_point(o.accumulation_point);
  rv["index_rule"] = o.index_rule;
  rv["anisotropy"] = o.rule.kind == Anisotropy::LeviNormalized ? "levi" : "power";
  rv["exponent"] = values.has("exponent") ? *values.get("exponent") : format_double(o.rule.exponent);
  rv["monotone_from"] = std::to_string(o.monotone_from);

  const int nu_max = r.integer("nu_max", 12);
  const bool to_siegel = o.family == "ball_mobius" && o.rule.kind == Anisotropy::LeviNormalized;
  const std::string target_name = r.str("target", to_siegel ? "siegel" : o.domain);
  const auto target = make_catalog_domain(target_name, o.params);
  const int d = o.params.dim;
  NormalConvergenceOptions opt;
  opt.seed = static_cast<unsigned>(r.integer("seed", 11));
  opt.tolerance = r.real("tol", 1e-2);
  opt.box_count = r.integer("box_count", opt.box_count);
  opt.compact = interior_samples(target, unit(d, 0), 0.9, 200, 0.05, opt.seed);
  const auto steps = pinchuk_scaling_sequence(o, nu_max);
  std::vector<AffineMap> maps;
  std::vector<int> idx;
  for (const auto& s : steps) {
    maps.push_back(s.dilatation.map);
    idx.push_back(s.index);
  }
  const auto rep = normal_convergence_check(maps, idx, o.domain_function(), target, opt);
  res.report = to_json(rep);
  res.report["target"] = target_name;
  res.csv = rep.to_csv();
  res.verdict = rep.verdict();
}

void cmd_kernel(Resolver& r, RunResult& res) {
  const std::string seq = r.str("sequence", "grow");
  const int dim = r.integer("dim", 1);
  const int horizon = r.integer("horizon", 200);
  const int window = r.integer("window", 5);
  GridSpec g;
  g.spacing = r.real("grid", dim == 1 ? 0.02 : 0.2);
  g.half_width = r.real("half_width", g.half_width);
  g.center = CVec::Zero(dim);
  const CVec p = r.point("point", CVec::Zero(dim), dim);
  DomainSequence s;
  if (seq == "grow") {
    s = ball_sequence([](int nu) { return 1.0 + 1.0 / nu; }, "B(0, 1 + 1/nu)");
  } else if (seq == "shrink") {
    s = ball_sequence([](int nu) { return 1.0 / nu; }, "B(0, 1/nu)");
  } else if (seq == "constant") {
    auto d = read_domain(r);
    s = constant_sequence(d.rho);
  } else {
    throw Error(ErrorKind::InvalidArgument, "config key 'sequence': expected grow, shrink or constant");
  }
  const auto est = caratheodory_kernel_estimate(s, p, g, horizon, window);
  res.report = to_json(est);
  res.report["sequence"] = s.description;
}

using Handler = std::function<void(Resolver&, const KeyValueConfig&, RunResult&)>;

const std::map<std::string, std::pair<std::string, Handler>>& handlers() {
  auto plain = [](void (*f)(Resolver&, RunResult&)) {
    return Handler([f](Resolver& r, const KeyValueConfig&, RunResult& res) { f(r, res); });
  };
  static const std::map<std::string, std::pair<std::string, Handler>> h = {
      {"levi", {"Levi form and pseudoconvexity class at a boundary point", plain(cmd_levi)}},
      {"type", {"Order of contact (finite type) at a boundary point", plain(cmd_type)}},
      {"scale", {"Pinchuk scaling along an automorphism orbit", cmd_scale}},
      {"kernel-convergence", {"Caratheodory kernel estimate for a ball sequence", plain(cmd_kernel)}},
      {"metric", {"Kobayashi metric value or certified bracket", plain(cmd_metric)}},
      {"graham", {"Boundary asymptotics of the Kobayashi metric", plain(cmd_graham)}},
      {"lee", {"Lee ratio along the inner normal", plain(cmd_lee)}},
      {"bergman", {"Bergman kernel and metric from monomial norms", plain(cmd_bergman)}},
      {"klembeck", {"Bergman sectional curvature toward the boundary", plain(cmd_klembeck)}},
      {"wu", {"Wu metric from the Kobayashi indicatrix", plain(cmd_wu)}},
      {"poisson", {"Poisson kernel bound scan on the ball", plain(cmd_poisson)}},
  };
  return h;
}

std::string timestamp_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string scalar_csv(const nlohmann::json& report) {
  std::ostringstream out;
  out << "key,value\n";
  for (const auto& [k, v] : report.items()) {
    if (v.is_primitive()) out << k << ',' << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
  }
  return out.str();
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [k, v] : handlers()) n.push_back(k);
    return n;
  }();
  return names;
}

const std::set<std::string>& config_key_names() {
  static const std::set<std::string> keys = [] {
    std::set<std::string> k(kFlagKeys.begin(), kFlagKeys.end());
    for (const auto& o : OrbitSpec::config_keys()) k.insert(o);
    for (const char* extra : {"radius", "no_timestamp", "normalize", "max_order", "t_levels", "t_list", "w",
                              "refine", "max_resolution", "levels", "radial", "angular", "n", "nu_max", "target",
                              "box_count", "sequence", "horizon", "window", "half_width"}) {
      k.insert(extra);
    }
    return k;
  }();
  return keys;
}

RunResult execute(const RunConfig& cfg) {
  const auto& h = handlers();
  auto it = h.find(cfg.command);
  if (it == h.end()) throw Error(ErrorKind::InvalidArgument, "unknown command '" + cfg.command + "'");
  cfg.values.reject_unknown(config_key_names());
  Resolver r(cfg.values);
  RunResult res;
  it->second.second(r, cfg.values, res);
  res.resolved = r.resolved;
  if (!res.report.contains("verdict")) res.report["verdict"] = res.verdict;
  return res;
}

nlohmann::json report_document(const RunConfig& cfg, const RunResult& result) {
  nlohmann::json config = result.resolved;
  config["command"] = cfg.command;
  config["format"] = cfg.format;
  if (!cfg.out.empty()) config["out"] = cfg.out;
  nlohmann::json doc = {{"schema", 1},
                        {"command", cfg.command},
                        {"config", config},
                        {"report", result.report},
                        {"verdict", result.verdict}};
  if (cfg.timestamp) doc["timestamp"] = timestamp_now();
  return doc;
}

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Complex scaling toolkit"};
  app.name(argv.empty() ? "cscale" : argv[0]);
  app.require_subcommand(1);

  struct Slots {
    std::map<std::string, std::string> flags;
    std::map<std::string, CLI::Option*> opts;
    std::vector<std::string> sets;
    std::string config;
    bool no_timestamp = false;
  };
  std::map<std::string, Slots> slots;
  for (const auto& [name, entry] : handlers()) {
    auto* sc = app.add_subcommand(name, entry.first);
    auto& s = slots[name];
    for (const auto& key : kFlagKeys) s.opts[key] = sc->add_option("--" + key, s.flags[key]);
    sc->add_option("--config", s.config, "key = value file; flags override it")->check(CLI::ExistingFile);
    sc->add_option("--set", s.sets, "extra key=value entries");
    sc->add_flag("--no-timestamp", s.no_timestamp, "omit the timestamp field");
  }

  std::vector<const char*> cargv;
  for (const auto& a : argv) cargv.push_back(a.c_str());
  if (cargv.empty()) cargv.push_back("cscale");
  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 1;
  }

  RunConfig cfg;
  cfg.command = app.get_subcommands().front()->get_name();
  auto& s = slots[cfg.command];
  try {
    if (!s.config.empty()) cfg.values = KeyValueConfig::load(s.config);
    for (const auto& kv : s.sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw Error(ErrorKind::InvalidArgument, "--set expects key=value, got '" + kv + "'");
      cfg.values.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    for (const auto& key : kFlagKeys) {
      if (s.opts[key]->count() > 0) cfg.values.set(key, s.flags[key]);
    }
    if (s.no_timestamp) cfg.values.set("no_timestamp", "true");
    cfg.format = cfg.values.get_string("format", "json");
    cfg.out = cfg.values.get_string("out", "");
    cfg.timestamp = !cfg.values.get_bool("no_timestamp", false);
    if (cfg.format != "json" && cfg.format != "csv") {
      throw Error(ErrorKind::InvalidArgument, "config key 'format': expected json or csv, got '" + cfg.format + "'");
    }

    const RunResult res = execute(cfg);
    std::string text;
    if (cfg.format == "json") {
      text = report_document(cfg, res).dump(2) + "\n";
    } else {
      text = res.csv.empty() ? scalar_csv(res.report) : res.csv;
    }
    if (cfg.out.empty()) {
      out << text;
    } else {
      std::ofstream f(cfg.out);
      if (!f) throw Error(ErrorKind::InvalidArgument, "config key 'out': cannot open '" + cfg.out + "'");
      f << text;
    }
    return res.verdict == "fail" ? 2 : 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace cscale
