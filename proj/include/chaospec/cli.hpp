#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chaospec/errors.hpp"
#include "chaospec/io.hpp"
#include "chaospec/montecarlo.hpp"
#include "chaospec/schrodinger.hpp"
#include "chaospec/sensitivity.hpp"
#include "chaospec/she.hpp"
#include "chaospec/spectrum.hpp"
#include "chaospec/version.hpp"

// Command-line front end.  Every computation is a subcommand writing one
// machine-readable artifact (CSV for curves and tables, JSON for scalar
// reports, JSON lines for Monte Carlo estimates), with the full parameter
// set recorded in the file so any artifact can be reproduced from its own
// header.  Exit codes: 0 success, 2 parameter/configuration error,
// 3 numeric error.

namespace chaospec::cli {

struct RunConfig {
  std::string subcommand;
  std::string model = "she";

  // model parameters
  double beta = 1.0;
  double t = 1.0;
  int dim = 1;
  double r0 = 1.0;
  double ell = 1.0;
  double amp = 1.0;
  double width = 1.0;

  // grids
  std::vector<double> thetas{-3.0, -1.0, -0.1, 0.1, 1.0, 3.0};
  std::vector<double> s_values{0.01, 0.1, 0.5, 1.0, 2.0, 5.0};
  std::vector<double> alphas{0.5, 1.0, 2.0};
  std::vector<double> times{1e2, 1e3, 1e4};
  std::vector<double> xi;  // kinetic evaluation frequency; empty = origin

  // Monte Carlo
  double s = 0.5;
  double t_scale = 1e3;
  double dx = 0.05;
  double dt = 0.000625;
  double half_width = 5.0;
  std::int64_t n_samples = 10000;
  std::uint64_t seed = 12345;
  int workers = 1;

  // numerics
  double eps_tail = 1e-12;
  double quad_tol = 1e-10;

  // output
  std::string output;
  std::string out_dir;
  bool svg = false;
};

namespace detail {

inline void assign_doubles(std::vector<double>& target,
                           const nlohmann::json& value,
                           const std::string& key) {
  if (!value.is_array())
    throw std::invalid_argument("config key '" + key + "' must be an array");
  target.clear();
  for (const auto& v : value) target.push_back(v.get<double>());
}

inline void apply_config_json(RunConfig& cfg, const nlohmann::json& j) {
  for (const auto& [key, value] : j.items()) {
    if (key == "model")
      cfg.model = value.get<std::string>();
    else if (key == "beta")
      cfg.beta = value.get<double>();
    else if (key == "t")
      cfg.t = value.get<double>();
    else if (key == "dim")
      cfg.dim = value.get<int>();
    else if (key == "r0")
      cfg.r0 = value.get<double>();
    else if (key == "ell")
      cfg.ell = value.get<double>();
    else if (key == "amp")
      cfg.amp = value.get<double>();
    else if (key == "width")
      cfg.width = value.get<double>();
    else if (key == "thetas")
      assign_doubles(cfg.thetas, value, key);
    else if (key == "s-values")
      assign_doubles(cfg.s_values, value, key);
    else if (key == "alphas")
      assign_doubles(cfg.alphas, value, key);
    else if (key == "times")
      assign_doubles(cfg.times, value, key);
    else if (key == "xi")
      assign_doubles(cfg.xi, value, key);
    else if (key == "s")
      cfg.s = value.get<double>();
    else if (key == "t-scale")
      cfg.t_scale = value.get<double>();
    else if (key == "dx")
      cfg.dx = value.get<double>();
    else if (key == "dt")
      cfg.dt = value.get<double>();
    else if (key == "half-width")
      cfg.half_width = value.get<double>();
    else if (key == "n-samples")
      cfg.n_samples = value.get<std::int64_t>();
    else if (key == "seed")
      cfg.seed = value.get<std::uint64_t>();
    else if (key == "workers")
      cfg.workers = value.get<int>();
    else if (key == "eps-tail")
      cfg.eps_tail = value.get<double>();
    else if (key == "quad-tol")
      cfg.quad_tol = value.get<double>();
    else if (key == "output")
      cfg.output = value.get<std::string>();
    else if (key == "out-dir")
      cfg.out_dir = value.get<std::string>();
    else if (key == "svg")
      cfg.svg = value.get<bool>();
    else
      throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

inline void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("cannot read config file: " + path);
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config file " + path + ": " + e.what());
  }
  apply_config_json(cfg, parsed);
}

inline std::string resolved_output(const RunConfig& cfg,
                                   const std::string& extension) {
  if (!cfg.output.empty()) return cfg.output;
  std::string dir = cfg.out_dir;
  if (dir.empty()) {
    if (const char* env = std::getenv("CHAOSPEC_OUT_DIR")) dir = env;
  }
  if (dir.empty()) dir = ".";
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / (cfg.subcommand + extension)).string();
}

inline std::string svg_sibling(const std::string& path) {
  return (std::filesystem::path(path).replace_extension(".svg")).string();
}

inline schrodinger::CovarianceModel covariance(const RunConfig& cfg) {
  return schrodinger::CovarianceModel{cfg.dim, cfg.r0, cfg.ell};
}

inline schrodinger::InitialDataModel initial_data(const RunConfig& cfg) {
  return schrodinger::InitialDataModel{cfg.dim, cfg.amp, cfg.width};
}

inline void meta_covariance(io::MetaBlock& meta, const RunConfig& cfg) {
  meta.add("dim", cfg.dim);
  meta.add("r0", cfg.r0);
  meta.add("ell", cfg.ell);
  meta.add("amp", cfg.amp);
  meta.add("width", cfg.width);
}

inline void write_spectrum(const RunConfig& cfg, io::MetaBlock meta,
                           const SpectrumDistribution& spec) {
  meta.add("eps-tail", cfg.eps_tail);
  meta.add("tail-mass", spec.tail_mass);
  meta.add("normalizer", spec.normalizer);
  std::vector<std::vector<double>> rows;
  rows.reserve(spec.probs.size());
  for (Eigen::Index n = 0; n < spec.probs.size(); ++n)
    rows.push_back({static_cast<double>(n), spec.probs[n]});
  const std::string path = resolved_output(cfg, ".csv");
  io::write_csv(path, meta, {"n", "prob"}, rows);
  if (cfg.svg) {
    io::SvgSeries series{"prob", {}, {}};
    for (const auto& row : rows) {
      series.x.push_back(row[0]);
      series.y.push_back(row[1]);
    }
    io::write_svg(svg_sibling(path), cfg.subcommand, "chaos order n",
                  "probability", {series});
  }
  std::cout << "wrote " << path << "\n";
}

inline const sensitivity::LaplaceModel& select_model(
    const RunConfig& cfg, sensitivity::GbmModel& gbm, sensitivity::SheModel& she,
    sensitivity::SchrodingerModel& schrodinger) {
  if (cfg.model == "gbm") return gbm;
  if (cfg.model == "she") return she;
  if (cfg.model == "schrodinger") return schrodinger;
  throw std::invalid_argument("unknown model '" + cfg.model +
                              "' (expected gbm, she or schrodinger)");
}

}  // namespace detail

inline void run_spectrum_she(const RunConfig& cfg) {
  she::SheParams p{cfg.beta, cfg.t};
  const SpectrumDistribution spec = she::pgf_coefficients(p, cfg.eps_tail);
  io::MetaBlock meta;
  meta.command = cfg.subcommand;
  meta.add("beta", cfg.beta);
  meta.add("t", cfg.t);
  detail::write_spectrum(cfg, meta, spec);
}

inline void run_spectrum_schrodinger(const RunConfig& cfg) {
  const SpectrumDistribution spec = schrodinger::spectrum(
      detail::covariance(cfg), detail::initial_data(cfg), cfg.t, cfg.eps_tail);
  io::MetaBlock meta;
  meta.command = cfg.subcommand;
  detail::meta_covariance(meta, cfg);
  meta.add("t", cfg.t);
  detail::write_spectrum(cfg, meta, spec);
}

inline void run_cf(const RunConfig& cfg) {
  io::MetaBlock meta;
  meta.command = cfg.subcommand;
  meta.add("model", cfg.model);
  meta.add("t", cfg.t);
  std::vector<std::vector<double>> rows;
  if (cfg.model == "she") {
    meta.add("beta", cfg.beta);
    she::SheParams p{cfg.beta, cfg.t};
    for (double theta : cfg.thetas) {
      const auto value = she::cf_closed_form(p, theta);
      rows.push_back({theta, value.real(), value.imag()});
    }
  } else if (cfg.model == "schrodinger") {
    detail::meta_covariance(meta, cfg);
    meta.add("quad-tol", cfg.quad_tol);
    QuadratureOptions opt;
    opt.rel_tol = cfg.quad_tol;
    for (double theta : cfg.thetas) {
      const auto value =
          schrodinger::cf_closed_form(detail::covariance(cfg),
                                      detail::initial_data(cfg), cfg.t, theta,
                                      opt);
      rows.push_back({theta, value.real(), value.imag()});
    }
  } else {
    throw std::invalid_argument("cf: model must be she or schrodinger");
  }
  const std::string path = detail::resolved_output(cfg, ".csv");
  io::write_csv(path, meta, {"theta", "re", "im"}, rows);
  if (cfg.svg) {
    io::SvgSeries real_part{"re", {}, {}}, imag_part{"im", {}, {}};
    for (const auto& row : rows) {
      real_part.x.push_back(row[0]);
      real_part.y.push_back(row[1]);
      imag_part.x.push_back(row[0]);
      imag_part.y.push_back(row[2]);
    }
    io::write_svg(detail::svg_sibling(path), "characteristic function",
                  "theta", "value", {real_part, imag_part});
  }
  std::cout << "wrote " << path << "\n";
}

inline void run_clt_check(const RunConfig& cfg) {
  SpectrumDistribution spec;
  CltParams clt;
  io::MetaBlock meta;
  meta.command = cfg.subcommand;
  meta.add("model", cfg.model);
  meta.add("t", cfg.t);
  if (cfg.model == "she") {
    meta.add("beta", cfg.beta);
    she::SheParams p{cfg.beta, cfg.t};
    spec = she::pgf_coefficients(p, cfg.eps_tail);
    clt = she::clt_params(p);
  } else if (cfg.model == "schrodinger") {
    detail::meta_covariance(meta, cfg);
    spec = schrodinger::spectrum(detail::covariance(cfg),
                                 detail::initial_data(cfg), cfg.t,
                                 cfg.eps_tail);
    clt = schrodinger::clt_params(detail::covariance(cfg));
  } else {
    throw std::invalid_argument("clt-check: model must be she or schrodinger");
  }
  meta.add("eps-tail", cfg.eps_tail);
  const double center = clt.mu * cfg.t;
  const double scale = std::sqrt(clt.sigma2 * cfg.t);
  const DistanceReport report = ks_to_standard_normal(spec, center, scale);
  io::json body;
  body["model"] = cfg.model;
  body["center"] = center;
  body["scale"] = scale;
  body["ks"] = report.ks;
  body["n_max"] = spec.n_max();
  body["tail_mass"] = spec.tail_mass;
  const std::string path = detail::resolved_output(cfg, ".json");
  io::write_json(path, meta, body);
  std::cout << "wrote " << path << "\n";
}

inline void run_correlation(const RunConfig& cfg) {
  sensitivity::GbmModel gbm;
  sensitivity::SheModel she_model(cfg.beta);
  sensitivity::SchrodingerModel schrodinger_model(detail::covariance(cfg),
                                                  detail::initial_data(cfg));
  const sensitivity::LaplaceModel& model =
      detail::select_model(cfg, gbm, she_model, schrodinger_model);
  const sensitivity::CorrelationCurve curve =
      sensitivity::correlation_curve(model, cfg.t, cfg.s_values);
  io::MetaBlock meta;
  meta.command = cfg.subcommand;
  meta.add("model", cfg.model);
  meta.add("t", cfg.t);
  if (cfg.model == "she") meta.add("beta", cfg.beta);
  if (cfg.model == "schrodinger") detail::meta_covariance(meta, cfg);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < curve.s.size(); ++i)
    rows.push_back({curve.s[i], curve.cor[i]});
  const std::string path = detail::resolved_output(cfg, ".csv");
  io::write_csv(path, meta, {"s", "cor"}, rows);
  if (cfg.svg) {
    io::SvgSeries series{cfg.model, curve.s, curve.cor};
    io::write_svg(detail::svg_sibling(path), "noise decorrelation", "s",
                  "correlation", {series});
  }
  std::cout << "wrote " << path << "\n";
}

inline void run_onset_scan(const RunConfig& cfg) {
  sensitivity::GbmModel gbm;
  sensitivity::SheModel she_model(cfg.beta);
  sensitivity::SchrodingerModel schrodinger_model(detail::covariance(cfg),
                                                  detail::initial_data(cfg));
  const sensitivity::LaplaceModel& model =
      detail::select_model(cfg, gbm, she_model, schrodinger_model);
  const sensitivity::OnsetScan scan =
      sensitivity::onset_scan(model, cfg.alphas, cfg.times);
  io::MetaBlock meta;
  meta.command = cfg.subcommand;
  meta.add("model", cfg.model);
  if (cfg.model == "she") meta.add("beta", cfg.beta);
  if (cfg.model == "schrodinger") detail::meta_covariance(meta, cfg);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < scan.alphas.size(); ++i)
    for (std::size_t j = 0; j < scan.times.size(); ++j)
      rows.push_back({scan.alphas[i], scan.times[j],
                      scan.values(static_cast<Eigen::Index>(i),
                                  static_cast<Eigen::Index>(j))});
  const std::string path = detail::resolved_output(cfg, ".csv");
  io::write_csv(path, meta, {"alpha", "t", "cor"}, rows);
  if (cfg.svg) {
    std::vector<io::SvgSeries> series;
    for (std::size_t i = 0; i < scan.alphas.size(); ++i) {
      io::SvgSeries s{"alpha=" + io::format_double(scan.alphas[i]), {}, {}};
      for (std::size_t j = 0; j < scan.times.size(); ++j) {
        s.x.push_back(std::log10(scan.times[j]));
        s.y.push_back(scan.values(static_cast<Eigen::Index>(i),
                                  static_cast<Eigen::Index>(j)));
      }
      series.push_back(std::move(s));
    }
    io::write_svg(detail::svg_sibling(path), "onset of chaos at s = t^-alpha",
                  "log10 t", "correlation", series);
  }
  std::cout << "wrote " << path << "\n";
}

namespace detail {

inline io::json estimate_record(const std::string& op, io::json params,
                                const mc::SimEstimate& est) {
  io::json record;
  record["op"] = op;
  record["params"] = std::move(params);
  record["value"] = est.value;
  record["stderr"] = est.stderr;
  record["n"] = est.n_samples;
  record["seed"] = est.seed;
  return record;
}

}  // namespace detail

inline void run_mc_she(const RunConfig& cfg) {
  mc::LatticeConfig lattice{cfg.dx, cfg.dt, cfg.half_width};
  she::SheParams p{cfg.beta, cfg.t};
  const mc::PairEstimate pair = mc::simulate_she_pair(
      lattice, p, cfg.s, cfg.n_samples, cfg.seed, cfg.workers);
  io::json params;
  params["beta"] = cfg.beta;
  params["t"] = cfg.t;
  params["s"] = cfg.s;
  params["dx"] = cfg.dx;
  params["dt"] = cfg.dt;
  params["half-width"] = cfg.half_width;
  params["n-samples"] = cfg.n_samples;
  params["seed"] = cfg.seed;
  params["workers"] = cfg.workers;
  std::vector<io::json> records;
  records.push_back(detail::estimate_record("mc-she.zz", params, pair.zz));
  records.push_back(detail::estimate_record("mc-she.z2", params, pair.z2));
  try {
    records.push_back(detail::estimate_record(
        "mc-she.correlation", params, mc::implied_correlation(pair)));
  } catch (const DegenerateLawError&) {
    // no correlation record when the estimated variance vanishes
  }
  const std::string path = detail::resolved_output(cfg, ".jsonl");
  io::write_json_lines(path, records);
  std::cout << "wrote " << path << "\n";
}

inline void run_mc_gbm(const RunConfig& cfg) {
  const mc::SimEstimate est = mc::simulate_gbm_pair(
      cfg.t, cfg.s, cfg.n_samples, cfg.seed, cfg.workers);
  io::json params;
  params["t"] = cfg.t;
  params["s"] = cfg.s;
  params["n-samples"] = cfg.n_samples;
  params["seed"] = cfg.seed;
  params["workers"] = cfg.workers;
  const std::string path = detail::resolved_output(cfg, ".jsonl");
  io::write_json_lines(
      path, {detail::estimate_record("mc-gbm.correlation", params, est)});
  std::cout << "wrote " << path << "\n";
}

inline void run_kinetic_sim(const RunConfig& cfg) {
  const auto cov = detail::covariance(cfg);
  const auto init = detail::initial_data(cfg);
  Eigen::VectorXd xi = Eigen::VectorXd::Zero(cov.d);
  if (!cfg.xi.empty()) {
    if (static_cast<int>(cfg.xi.size()) != cov.d)
      throw std::invalid_argument("kinetic-sim: --xi needs one value per "
                                  "dimension");
    for (int i = 0; i < cov.d; ++i) xi[i] = cfg.xi[i];
  }
  const mc::KineticResult result = mc::simulate_kinetic(
      cov, init, cfg.t, xi, cfg.n_samples, cfg.seed, cfg.workers);

  const double lambda = cfg.r0 * cfg.t;
  SpectrumDistribution empirical;
  empirical.probs.resize(
      static_cast<Eigen::Index>(result.jump_counts.size()));
  for (std::size_t k = 0; k < result.jump_counts.size(); ++k)
    empirical.probs[static_cast<Eigen::Index>(k)] =
        static_cast<double>(result.jump_counts[k]) /
        static_cast<double>(cfg.n_samples);
  const SpectrumDistribution reference = poisson_pmf(
      lambda, static_cast<Eigen::Index>(result.jump_counts.size()) - 1,
      cfg.eps_tail);

  io::MetaBlock meta;
  meta.command = cfg.subcommand;
  detail::meta_covariance(meta, cfg);
  meta.add("t", cfg.t);
  meta.add("n-samples", cfg.n_samples);
  meta.add("seed", cfg.seed);
  meta.add("workers", cfg.workers);
  io::json body;
  body["w"] = {{"value", result.w.value},
               {"stderr", result.w.stderr},
               {"n", result.w.n_samples},
               {"seed", result.w.seed}};
  body["xi"] = cfg.xi.empty() ? std::vector<double>(cov.d, 0.0) : cfg.xi;
  body["jump_counts"] = result.jump_counts;
  body["poisson_intensity"] = lambda;
  body["tv_to_poisson"] = total_variation(empirical, reference);
  const std::string path = detail::resolved_output(cfg, ".json");
  io::write_json(path, meta, body);
  std::cout << "wrote " << path << "\n";
}

inline void run_diffusive_check(const RunConfig& cfg) {
  const DistanceReport report = mc::diffusive_scaling_check(
      detail::covariance(cfg), cfg.t_scale, cfg.n_samples, cfg.seed,
      cfg.workers);
  io::MetaBlock meta;
  meta.command = cfg.subcommand;
  meta.add("dim", cfg.dim);
  meta.add("r0", cfg.r0);
  meta.add("ell", cfg.ell);
  meta.add("t-scale", cfg.t_scale);
  meta.add("n-samples", cfg.n_samples);
  meta.add("seed", cfg.seed);
  meta.add("workers", cfg.workers);
  io::json body;
  body["ks"] = report.ks;
  const std::string path = detail::resolved_output(cfg, ".json");
  io::write_json(path, meta, body);
  std::cout << "wrote " << path << "\n";
}

inline void run(const RunConfig& cfg) {
  if (cfg.subcommand == "spectrum-she")
    run_spectrum_she(cfg);
  else if (cfg.subcommand == "spectrum-schrodinger")
    run_spectrum_schrodinger(cfg);
  else if (cfg.subcommand == "cf")
    run_cf(cfg);
  else if (cfg.subcommand == "clt-check")
    run_clt_check(cfg);
  else if (cfg.subcommand == "correlation")
    run_correlation(cfg);
  else if (cfg.subcommand == "onset-scan")
    run_onset_scan(cfg);
  else if (cfg.subcommand == "mc-she")
    run_mc_she(cfg);
  else if (cfg.subcommand == "mc-gbm")
    run_mc_gbm(cfg);
  else if (cfg.subcommand == "kinetic-sim")
    run_kinetic_sim(cfg);
  else if (cfg.subcommand == "diffusive-check")
    run_diffusive_check(cfg);
  else
    throw std::invalid_argument("unknown subcommand '" + cfg.subcommand + "'");
}

inline int main_entry(int argc, const char* const* argv) {
  RunConfig cfg;

  // The config file is applied before flag parsing so that explicit flags
  // override file values.
  try {
    for (int i = 1; i < argc; ++i) {
      const std::string arg = argv[i];
      if (arg == "--config" && i + 1 < argc)
        detail::apply_config_file(cfg, argv[i + 1]);
      else if (arg.rfind("--config=", 0) == 0)
        detail::apply_config_file(cfg, arg.substr(9));
    }
  } catch (const std::exception& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return 2;
  }

  CLI::App app{"chaos spectra of the stochastic heat and Schrodinger "
               "equations"};
  app.set_version_flag("--version", version);
  app.require_subcommand(1);
  std::string config_path;  // consumed above; declared so parsing accepts it

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file; flags override");
    sub->add_option("--eps-tail", cfg.eps_tail, "spectrum truncation tolerance");
    sub->add_option("--quad-tol", cfg.quad_tol, "quadrature relative tolerance");
    sub->add_option("--output", cfg.output, "output file path");
    sub->add_option("--out-dir", cfg.out_dir,
                    "output directory (default $CHAOSPEC_OUT_DIR or .)");
    sub->add_flag("--svg", cfg.svg, "also write an SVG chart");
    sub->callback([&cfg, sub] { cfg.subcommand = sub->get_name(); });
  };
  auto add_she_params = [&](CLI::App* sub) {
    sub->add_option("--beta", cfg.beta, "coupling constant");
    sub->add_option("--t", cfg.t, "time");
  };
  auto add_gaussian_models = [&](CLI::App* sub) {
    sub->add_option("--dim", cfg.dim, "spatial dimension (1..3)");
    sub->add_option("--r0", cfg.r0, "covariance at the origin R(0)");
    sub->add_option("--ell", cfg.ell, "covariance correlation length");
    sub->add_option("--amp", cfg.amp, "initial profile amplitude");
    sub->add_option("--width", cfg.width, "initial profile width");
  };
  auto add_mc_params = [&](CLI::App* sub) {
    sub->add_option("--n-samples", cfg.n_samples, "Monte Carlo sample count");
    sub->add_option("--seed", cfg.seed, "RNG seed");
    sub->add_option("--workers", cfg.workers, "worker threads");
  };

  {
    auto* sub = app.add_subcommand("spectrum-she",
                                   "chaos spectrum of the heat equation");
    add_she_params(sub);
    add_common(sub);
  }
  {
    auto* sub = app.add_subcommand(
        "spectrum-schrodinger", "chaos spectrum of the Schrodinger mode");
    add_gaussian_models(sub);
    sub->add_option("--t", cfg.t, "time");
    add_common(sub);
  }
  {
    auto* sub = app.add_subcommand("cf", "characteristic function values");
    sub->add_option("--model", cfg.model, "she | schrodinger");
    add_she_params(sub);
    add_gaussian_models(sub);
    sub->add_option("--thetas", cfg.thetas, "evaluation angles")
        ->delimiter(',');
    add_common(sub);
  }
  {
    auto* sub = app.add_subcommand(
        "clt-check", "KS distance of the normalized spectrum to N(0,1)");
    sub->add_option("--model", cfg.model, "she | schrodinger");
    add_she_params(sub);
    add_gaussian_models(sub);
    add_common(sub);
  }
  {
    auto* sub = app.add_subcommand("correlation",
                                   "decorrelation curve cor(s) at fixed t");
    sub->add_option("--model", cfg.model, "gbm | she | schrodinger");
    add_she_params(sub);
    add_gaussian_models(sub);
    sub->add_option("--s-values", cfg.s_values, "perturbation strengths")
        ->delimiter(',');
    add_common(sub);
  }
  {
    auto* sub = app.add_subcommand(
        "onset-scan", "correlation at s = t^-alpha over a (alpha, t) grid");
    sub->add_option("--model", cfg.model, "gbm | she | schrodinger");
    sub->add_option("--beta", cfg.beta, "coupling constant");
    add_gaussian_models(sub);
    sub->add_option("--alphas", cfg.alphas, "exponents")->delimiter(',');
    sub->add_option("--times", cfg.times, "times")->delimiter(',');
    add_common(sub);
  }
  {
    auto* sub = app.add_subcommand(
        "mc-she", "lattice Monte Carlo of the coupled heat equations");
    add_she_params(sub);
    sub->add_option("--s", cfg.s, "noise perturbation strength");
    sub->add_option("--dx", cfg.dx, "space step");
    sub->add_option("--dt", cfg.dt, "time step");
    sub->add_option("--half-width", cfg.half_width, "domain half width");
    add_mc_params(sub);
    add_common(sub);
  }
  {
    auto* sub = app.add_subcommand("mc-gbm",
                                   "exact Monte Carlo of the GBM benchmark");
    sub->add_option("--t", cfg.t, "time");
    sub->add_option("--s", cfg.s, "noise perturbation strength");
    add_mc_params(sub);
    add_common(sub);
  }
  {
    auto* sub = app.add_subcommand(
        "kinetic-sim", "compound-Poisson sampling of the kinetic solution");
    add_gaussian_models(sub);
    sub->add_option("--t", cfg.t, "time");
    sub->add_option("--xi", cfg.xi, "evaluation frequency")->delimiter(',');
    add_mc_params(sub);
    add_common(sub);
  }
  {
    auto* sub = app.add_subcommand(
        "diffusive-check",
        "KS distance of scaled jump sums to the diffusive limit");
    sub->add_option("--dim", cfg.dim, "spatial dimension (1..3)");
    sub->add_option("--r0", cfg.r0, "covariance at the origin R(0)");
    sub->add_option("--ell", cfg.ell, "covariance correlation length");
    sub->add_option("--t-scale", cfg.t_scale, "scaling time");
    add_mc_params(sub);
    add_common(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    run(cfg);
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what();
    if (e.requested != 0.0 || e.achieved != 0.0)
      std::cerr << " (requested " << e.requested << ", achieved " << e.achieved
                << ")";
    std::cerr << "\n";
    return 3;
  } catch (const std::domain_error& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

// Convenience entry point for in-process tests.
inline int run_command(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("chaospec");
  for (const auto& arg : args) argv.push_back(arg.c_str());
  return main_entry(static_cast<int>(argv.size()), argv.data());
}

}  // namespace chaospec::cli
