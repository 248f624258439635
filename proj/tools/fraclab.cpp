// Command-line front end: constants, operator evaluation, scaling experiments,
// and the identity/property verification suite.
//
// Exit codes: 0 success, 1 check failure, 2 usage or config error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "fraclab/experiments.hpp"
#include "fraclab/operators.hpp"
#include "fraclab/version.hpp"

namespace {

using nlohmann::json;

struct CommonFlags {
  int n = 1;
  double p = 4.0 / 3.0;
  std::optional<double> q;  // derived from alpha when omitted
  double alpha = 0.5;
  std::string weight = "power:a=0";
  std::string family = "all-intervals";
  int grid_points = 256;
  double extent = 2.0;
  std::vector<double> radial;  // rmin,rmax,shells
  std::string config_path;
  std::string out;
  int threads = 1;
  std::uint64_t seed = 1;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--n", f.n, "dimension (1 or 2)");
  cmd->add_option("--p", f.p, "source exponent p");
  cmd->add_option("--q", f.q, "target exponent q (derived from --alpha when omitted)");
  cmd->add_option("--alpha", f.alpha, "smoothing order alpha");
  cmd->add_option("--weight", f.weight, "weight: power:a=<float> or file:<path>");
  cmd->add_option("--family", f.family, "cube family: dyadic|thirds|all-intervals");
  cmd->add_option("--grid", f.grid_points, "uniform grid cells per side");
  cmd->add_option("--extent", f.extent, "uniform grid half-extent L");
  cmd->add_option("--radial", f.radial, "log-radial mesh: rmin,rmax,shells")
      ->delimiter(',')
      ->expected(0, 3);
  cmd->add_option("--config", f.config_path, "JSON config file");
  cmd->add_option("--out", f.out, "output path");
  cmd->add_option("--threads", f.threads, "thread count (1 = reproducible)");
  cmd->add_option("--seed", f.seed, "seed for randomized suites");
}

fraclab::Mesh mesh_from_flags(const CommonFlags& f) {
  if (!f.radial.empty()) {
    if (f.radial.size() != 3) throw CLI::ValidationError("--radial needs rmin,rmax,shells");
    return fraclab::build_radial_grid(f.radial[0], f.radial[1],
                                      static_cast<int>(f.radial[2]), f.n);
  }
  return fraclab::build_grid(f.n, f.extent, f.grid_points);
}

fraclab::WeightDescriptor weight_from_flag(const std::string& spec,
                                           const fraclab::Mesh& mesh) {
  if (spec.rfind("power:a=", 0) == 0)
    return fraclab::WeightDescriptor::power(std::stod(spec.substr(8)));
  if (spec.rfind("file:", 0) == 0)
    return fraclab::WeightDescriptor::sampled(fraclab::load_grid_function(spec.substr(5)));
  (void)mesh;
  throw CLI::ValidationError("weight must be power:a=<float> or file:<path>");
}

void emit(const json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream os(out);
  if (!os) throw std::runtime_error("cannot open output file: " + out);
  os << j.dump(2) << '\n';
}

json wrap(const CommonFlags& f, json payload, const json& resolved_config) {
  json j;
  j["version"] = fraclab::kVersion;
  j["seed"] = f.seed;
  j["config"] = resolved_config;
  j["report"] = std::move(payload);
  return j;
}

int run_constants(const CommonFlags& f) {
  const fraclab::Mesh mesh = mesh_from_flags(f);
  const fraclab::WeightDescriptor w = weight_from_flag(f.weight, mesh);
  const double q = f.q ? *f.q : fraclab::ExponentTriple::from_p_alpha(f.n, f.p, f.alpha).q;
  const auto F =
      fraclab::enumerate_cubes(mesh, fraclab::family_from_name(f.family), 2'000'000);

  json resolved{{"n", f.n},       {"p", f.p},           {"q", q},
                {"alpha", f.alpha}, {"weight", f.weight}, {"family", f.family},
                {"threads", f.threads}};
  json payload;
  if (f.p > 1.0) {
    const auto e = fraclab::ExponentTriple::make(f.n, f.p, q, f.alpha);
    payload["apq"] = fraclab::apq_constant(w, e, mesh, F).to_json();
    payload["ap"] = fraclab::ap_constant(w, f.p, mesh, F).to_json();
  }
  payload["a1q"] = fraclab::a1q_constant(w, q, mesh, F).to_json();
  emit(wrap(f, std::move(payload), resolved), f.out);
  return 0;
}

int run_operator(const CommonFlags& f, const std::string& kind, const std::string& in,
                 const std::string& mode) {
  std::ifstream is(in);
  if (!is) throw std::runtime_error("cannot open input file: " + in);
  fraclab::GridFunction g = fraclab::load_grid_function(is);
  fraclab::GridFunction result = g;
  if (kind == "riesz") {
    result = fraclab::riesz_potential(g, f.alpha);
  } else if (kind == "maximal") {
    fraclab::MaximalMode m = fraclab::MaximalMode::UncenteredCube;
    if (mode == "centered-cube") m = fraclab::MaximalMode::CenteredCube;
    else if (mode == "centered-ball") m = fraclab::MaximalMode::CenteredBall;
    else if (mode == "dyadic") m = fraclab::MaximalMode::Dyadic;
    else if (mode != "uncentered-cube")
      throw CLI::ValidationError("unknown maximal mode: " + mode);
    result = fraclab::fractional_maximal(g, f.alpha, m);
  } else if (kind == "dyadic-model") {
    result = fraclab::dyadic_model_operator(g, f.alpha);
  } else {
    throw CLI::ValidationError("unknown operator kind: " + kind);
  }
  if (f.out.empty()) {
    fraclab::save_grid_function(result, std::cout);
  } else {
    fraclab::save_grid_function(result, f.out);
  }
  return 0;
}

int run_experiment_cmd(const CommonFlags& f, const std::string& experiment) {
  fraclab::ExperimentConfig cfg;
  if (!f.config_path.empty()) {
    std::ifstream is(f.config_path);
    if (!is) throw std::runtime_error("cannot open config file: " + f.config_path);
    json j;
    is >> j;
    cfg = fraclab::ExperimentConfig::from_json(j);
  } else {
    cfg.n = f.n;
    cfg.p = f.p;
    cfg.alpha = f.alpha;
    cfg.q = f.q ? *f.q : fraclab::ExponentTriple::from_p_alpha(f.n, f.p, f.alpha).q;
    cfg.family = f.family;
    cfg.seed = f.seed;
    if (!f.radial.empty()) {
      if (f.radial.size() != 3) throw CLI::ValidationError("--radial needs rmin,rmax,shells");
      cfg.grid_kind = "radial";
      cfg.r_min = f.radial[0];
      cfg.r_max = f.radial[1];
      cfg.shells = static_cast<int>(f.radial[2]);
    }
  }
  if (!experiment.empty()) cfg.experiment = experiment;
  if (!f.out.empty()) cfg.out = f.out;
  if (cfg.experiment.empty())
    throw CLI::ValidationError("experiment name required (--experiment or config)");

  const fraclab::ScalingReport rep = fraclab::run_experiment(cfg);
  json j = rep.to_json();
  j["version"] = fraclab::kVersion;
  j["seed"] = cfg.seed;
  j["config"] = cfg.to_json();
  emit(j, cfg.out);
  if (!cfg.out.empty()) {
    std::ofstream csv(cfg.out + ".csv");
    if (!csv) throw std::runtime_error("cannot open output file: " + cfg.out + ".csv");
    rep.write_csv(csv);
  }

  // Optional gate: {"fit": "<name>", "expected": s, "tol": t} in tolerances.
  if (cfg.tolerances.contains("expected") && cfg.tolerances.contains("tol")) {
    fraclab::SlopeFit fit = rep.fit;
    if (cfg.tolerances.contains("fit")) {
      const std::string name = cfg.tolerances.at("fit").get<std::string>();
      const auto it = rep.fits.find(name);
      if (it == rep.fits.end()) throw std::runtime_error("no fit named " + name);
      fit = it->second;
    }
    const double expected = cfg.tolerances.at("expected").get<double>();
    const double tol = cfg.tolerances.at("tol").get<double>();
    if (std::abs(fit.slope - expected) > tol) {
      std::cerr << "slope " << fit.slope << " outside " << expected << " +/- " << tol
                << '\n';
      return 1;
    }
  }
  return 0;
}

int run_verify(const CommonFlags& f, const std::string& suite) {
  if (suite != "identities") throw CLI::ValidationError("unknown suite: " + suite);
  const fraclab::IdentitySuiteReport rep = fraclab::run_identity_suite(f.seed);
  json resolved{{"suite", suite}, {"threads", f.threads}};
  emit(wrap(f, rep.to_json(), resolved), f.out);
  for (const auto& c : rep.checks)
    std::cerr << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
  return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fraclab: fractional operators, weight constants, sharpness experiments"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string op_kind = "riesz", op_in, op_mode = "uncentered-cube";
  std::string experiment_name, suite = "identities";

  CLI::App* constants = app.add_subcommand("constants", "weight constants on a cube family");
  add_common(constants, flags);

  CLI::App* op = app.add_subcommand("operator", "apply an operator to a grid function");
  add_common(op, flags);
  op->add_option("--kind", op_kind, "riesz|maximal|dyadic-model");
  op->add_option("--in", op_in, "input grid-function file")->required();
  op->add_option("--mode", op_mode,
                 "maximal mode: uncentered-cube|centered-cube|centered-ball|dyadic");

  CLI::App* exp = app.add_subcommand("experiment", "run a scaling experiment");
  add_common(exp, flags);
  exp->add_option("--experiment", experiment_name,
                  "buckley|maximal-sharpness|integral-sharpness|weak-sharpness|sobolev");

  CLI::App* verify = app.add_subcommand("verify", "run a verification suite");
  add_common(verify, flags);
  verify->add_option("--suite", suite, "suite name (identities)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    if (*constants) return run_constants(flags);
    if (*op) return run_operator(flags, op_kind, op_in, op_mode);
    if (*exp) return run_experiment_cmd(flags, experiment_name);
    if (*verify) return run_verify(flags, suite);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
