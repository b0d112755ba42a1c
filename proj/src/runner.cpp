#include "procalab/runner.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <thread>

#include "procalab/io.hpp"
#include "procalab/stats.hpp"

namespace procalab {

namespace {

namespace fs = std::filesystem;

std::vector<std::string> preamble(const RunConfig& cfg) {
  std::vector<std::string> lines;
  lines.push_back("procalab version " + std::string(kVersion));
  for (const auto& l : cfg.lines()) lines.push_back(l);
  return lines;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out_dir());
  return (fs::path(cfg.out_dir()) / name).string();
}

// Fan independent cells out across workers; results land in input order.
void parallel_cells(int threads, std::size_t n,
                    const std::function<void(std::size_t)>& work) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) work(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const int nt = std::min<int>(threads, static_cast<int>(n));
  for (int t = 0; t < nt; ++t)
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) break;
        work(i);
      }
    });
  for (auto& th : pool) th.join();
}

std::vector<std::string> run_sample_ymh(const RunConfig& cfg, std::ostream& log) {
  YmhParams params = ymh_from_config(cfg);
  ChainOptions opts = mcmc_from_config(cfg);
  opts.threads = cfg.threads();
  Rng rng(cfg.seed());
  GaugeConfig gauge = initial_config(params);
  const long snapshot_every = cfg.get_long("mcmc", "snapshot_every", 0);

  std::vector<std::string> files;
  std::vector<std::vector<std::string>> rows;
  long recorded = 0;
  ChainStats stats = run_chain(
      gauge, params, opts, rng, [&](const GaugeConfig& g, long sweep) {
        if (snapshot_every > 0 && (sweep + 1) % snapshot_every == 0) {
          const std::string p =
              out_path(cfg, "snapshot_" + std::to_string(sweep + 1) + ".json");
          write_text_file(p, gauge_snapshot_json(g, cfg.lines()));
          files.push_back(p);
        }
        ++recorded;
      });
  for (long i = 0; i < stats.recorded; ++i)
    rows.push_back({std::to_string(i), fmt_double(stats.action_trace[static_cast<std::size_t>(i)]),
                    fmt_double(stats.acceptance_trace[static_cast<std::size_t>(i)]),
                    fmt_double(stats.max_dev_trace[static_cast<std::size_t>(i)]),
                    std::to_string(static_cast<int>(stats.e1_trace[static_cast<std::size_t>(i)])),
                    std::to_string(static_cast<int>(stats.e2_trace[static_cast<std::size_t>(i)]))});
  auto pre = preamble(cfg);
  pre.push_back("tuned_sigma = " + fmt_double(stats.tuned_sigma));
  pre.push_back("mean_acceptance = " + fmt_double(stats.mean_acceptance));
  pre.push_back("tau_action = " + fmt_double(stats.tau_action));
  const std::string trace = out_path(cfg, "trace.csv");
  write_csv(trace, pre, {"sweep", "action", "acceptance", "max_edge_dev", "E1", "E2"},
            rows);
  files.push_back(trace);
  const std::string snap = out_path(cfg, "final_config.json");
  write_text_file(snap, gauge_snapshot_json(gauge, cfg.lines()));
  files.push_back(snap);
  const auto [f1, f2] = event_frequencies(stats);
  log << "sample-ymh: recorded " << stats.recorded << " sweeps, acceptance "
      << stats.mean_acceptance << ", tau " << stats.tau_action << ", freq(E1) " << f1
      << ", freq(E2) " << f2 << "\n";
  return files;
}

std::vector<std::string> run_sample_proca(const RunConfig& cfg, std::ostream& log) {
  GroupSpec group = group_from_config(cfg);
  auto lat = lattice_from_config(cfg);
  const double beta = cfg.get_double("proca", "beta", 1.0);
  const double mass = cfg.get_double("proca", "mass", 1.0);
  const long n_samples = cfg.get_long("proca", "samples", 100);
  const bool conditioned = cfg.get_bool("proca", "conditioned", false);
  if (conditioned && lat->is_torus())
    throw ConfigError("proca.conditioned", "conditioning requires box topology");

  Rng rng(cfg.seed());
  PrecisionSolver solver(assemble_precision(lat, beta, mass));
  std::vector<std::string> files;

  if (cfg.get_bool("proca", "export_precision", false)) {
    const std::string p = out_path(cfg, "precision.txt");
    std::ofstream os(p);
    export_precision_triplets(solver.op(), os);
    files.push_back(p);
  }

  std::unique_ptr<BoundaryConditioner> cond;
  ProcaBoundary eta = ProcaBoundary::zero(*lat, group);
  if (conditioned) {
    cond = std::make_unique<BoundaryConditioner>(solver);
    const double nrm = cfg.get_double("proca", "eta_component_norm", 0.0);
    if (nrm != 0.0)
      eta = ProcaBoundary::constant(*lat, nrm * group.basis[0]);
  }

  std::vector<std::vector<std::string>> rows;
  AlgebraEdgeField last = AlgebraEdgeField::zero(lat, group);
  for (long s = 0; s < n_samples; ++s) {
    last = conditioned ? cond->sample(group, eta, rng) : sample_free(solver, group, rng);
    double norm2 = 0;
    for (const auto& x : last.X) norm2 += x.squaredNorm();
    rows.push_back({std::to_string(s), fmt_double(std::sqrt(norm2)),
                    fmt_double(last.max_norm())});
  }
  const std::string csvp = out_path(cfg, "proca_samples.csv");
  write_csv(csvp, preamble(cfg), {"sample", "field_norm", "max_edge_norm"}, rows);
  files.push_back(csvp);
  const std::string snap = out_path(cfg, "final_field.json");
  write_text_file(snap, algebra_snapshot_json(last, cfg.lines()));
  files.push_back(snap);
  log << "sample-proca: " << n_samples << " samples on " << lat->describe() << "\n";
  return files;
}

std::vector<std::string> run_lift(const RunConfig& cfg, std::ostream& log) {
  const std::string snap = cfg.require_string("lift", "snapshot");
  const bool scaled = cfg.get_bool("lift", "scaled", false);
  const double beta = cfg.get_double("lift", "beta", 1.0);
  GaugeConfig gauge = load_gauge_snapshot(read_text_file(snap));
  AlgebraEdgeField f = lift(gauge, gauge.group.chart_radius, scaled, beta);
  const std::string out = out_path(cfg, "lifted_field.json");
  write_text_file(out, algebra_snapshot_json(f, cfg.lines()));
  log << "lift: " << snap << " -> " << out << (scaled ? " (scaled)" : "") << "\n";
  return {out};
}

std::vector<std::string> run_pair(const RunConfig& cfg, std::ostream& log) {
  const std::string snap = cfg.require_string("pair", "snapshot");
  const double eps = cfg.get_double("pair", "epsilon", 0.25);
  const double beta = cfg.get_double("pair", "beta", 1.0);
  AlgebraEdgeField f = load_algebra_snapshot(read_text_file(snap));
  TestForm form = form_from_config(cfg);
  const double z = pair_field(f, form, eps, beta);
  const std::string out = out_path(cfg, "pairing.csv");
  write_csv(out, preamble(cfg), {"epsilon", "beta", "value"},
            {{fmt_double(eps), fmt_double(beta), fmt_double(z)}});
  log << "pair: Z = " << z << "\n";
  return {out};
}

std::vector<std::string> run_compare(const RunConfig& cfg, std::ostream& log);

std::vector<std::string> run_decay(const RunConfig& cfg, std::ostream& log) {
  auto lat = lattice_from_config(cfg);
  const double beta = cfg.get_double("decay", "beta", 1.0);
  const std::vector<double> masses = cfg.get_double_list("decay", "mass_list", {1.0});
  const int fit_min = static_cast<int>(cfg.get_long("decay", "fit_min", 2));
  const int fit_max = static_cast<int>(cfg.get_long("decay", "fit_max", -1));

  std::vector<std::vector<std::vector<std::string>>> cell_rows(masses.size());
  std::vector<std::string> fits(masses.size());
  parallel_cells(cfg.threads(), masses.size(), [&](std::size_t i) {
    PrecisionSolver solver(assemble_precision(lat, beta, masses[i]));
    const int center = lat->interior_edges()[lat->interior_edges().size() / 2];
    DecayProfile prof = covariance_decay_profile(solver, center, fit_min, fit_max);
    for (std::size_t k = 0; k < prof.distance.size(); ++k)
      cell_rows[i].push_back({fmt_double(masses[i]), fmt_double(prof.distance[k]),
                              fmt_double(prof.mean_cov[k])});
    fits[i] = "mass " + fmt_double(masses[i]) + ": rate " +
              fmt_double(-prof.fit.slope) + " R2 " + fmt_double(prof.fit.r_squared);
  });
  std::vector<std::vector<std::string>> rows;
  for (const auto& cr : cell_rows) rows.insert(rows.end(), cr.begin(), cr.end());
  auto pre = preamble(cfg);
  for (const auto& f : fits) pre.push_back(f);
  const std::string out = out_path(cfg, "decay.csv");
  write_csv(out, pre, {"mass", "distance", "mean_abs_cov"}, rows);
  for (const auto& f : fits) log << "decay: " << f << "\n";
  return {out};
}

std::vector<std::string> run_scaling(const RunConfig& cfg, std::ostream& log) {
  TestForm form = form_from_config(cfg);
  const double mass = cfg.get_double("scaling", "mass", 1.0);
  const std::vector<double> eps_list =
      cfg.get_double_list("scaling", "epsilon_list", {0.25, 0.125});
  LatticeVarianceOptions opts;
  opts.delta = cfg.get_double("scaling", "delta", 0.5);
  const double rate_c =
      cfg.get_double("scaling", "rate_constant",
                     100.0 * form.dim * 1.0);  // C_{d,n}; variance is beta-free

  std::vector<ScalingRow> rows(eps_list.size());
  const double cont = continuum_variance(form, mass);
  parallel_cells(cfg.threads(), eps_list.size(), [&](std::size_t i) {
    const LatticeVarianceResult r = lattice_variance(form, eps_list[i], mass, opts);
    rows[i] = ScalingRow{eps_list[i], r.variance, cont,
                         std::abs(r.variance - cont) / std::abs(cont), r.side};
  });
  std::vector<std::vector<std::string>> csv;
  for (const auto& r : rows)
    csv.push_back({fmt_double(r.eps), std::to_string(r.side), fmt_double(r.lattice_var),
                   fmt_double(r.continuum_var), fmt_double(r.rel_gap),
                   fmt_double(std::pow(r.eps, -rate_c))});
  auto pre = preamble(cfg);
  pre.push_back("note: pairing variance is beta-free; min_beta column reports the");
  pre.push_back("rate bound beta >= eps^-rate_constant for reference only");
  const std::string out = out_path(cfg, "scaling.csv");
  write_csv(out, pre,
            {"epsilon", "side", "lattice_variance", "continuum_variance", "rel_gap",
             "min_beta"},
            csv);
  std::vector<std::string> files{out};

  if (cfg.get_bool("scaling", "error_terms", false)) {
    ErrorTermOptions eopts;
    eopts.pad = cfg.get_double("scaling", "pad", 12.0);
    std::vector<ErrorTerms> ets(eps_list.size());
    parallel_cells(cfg.threads(), eps_list.size(), [&](std::size_t i) {
      ets[i] = error_terms_AB(form, eps_list[i], mass, eopts);
    });
    std::vector<std::vector<std::string>> erows;
    for (const auto& e : ets)
      erows.push_back({fmt_double(e.eps), std::to_string(e.side), fmt_double(e.norm_u),
                       fmt_double(e.norm_w), fmt_double(e.norm_u_minus_w),
                       fmt_double(e.norm_r_tilde), fmt_double(e.norm_w_minus_rinv_x),
                       fmt_double(e.quad_diff)});
    const std::string eout = out_path(cfg, "error_terms.csv");
    write_csv(eout, preamble(cfg),
              {"epsilon", "side", "norm_u", "norm_w", "norm_u_minus_w", "norm_r_tilde",
               "norm_w_minus_rinv_x", "quad_diff"},
              erows);
    files.push_back(eout);
  }
  for (const auto& r : rows)
    log << "scaling: eps " << r.eps << " lattice " << r.lattice_var << " continuum "
        << r.continuum_var << " gap " << r.rel_gap << "\n";
  return files;
}

std::vector<std::string> run_spectrum(const RunConfig& cfg, std::ostream& log) {
  auto lat = lattice_from_config(cfg);
  const double beta = cfg.get_double("spectrum", "beta", 1.0);
  const double mass = cfg.get_double("spectrum", "mass", 1.0);
  const auto [lmin, lmax] = spectrum_bounds(assemble_precision(lat, beta, mass));
  const double bound = mass + 8.0 * (lat->dim() - 1);
  const std::string out = out_path(cfg, "spectrum.csv");
  write_csv(out, preamble(cfg),
            {"lambda_min", "lambda_max", "mass", "upper_bound"},
            {{fmt_double(lmin), fmt_double(lmax), fmt_double(mass), fmt_double(bound)}});
  log << "spectrum: [" << lmin << ", " << lmax << "] within [" << mass << ", "
      << bound << "]\n";
  return {out};
}

std::vector<std::string> run_compare(const RunConfig& cfg, std::ostream& log) {
  const std::string method = cfg.get_string("compare", "method", "tv");
  const std::vector<double> betas =
      cfg.get_double_list("compare", "beta_list", {100.0, 1000.0, 10000.0});
  std::vector<std::string> files;

  if (method == "tv") {
    const int K = static_cast<int>(cfg.get_long("compare", "quadrature_points", 48));
    std::vector<double> tvs(betas.size());
    std::vector<double> widths(betas.size());
    parallel_cells(cfg.threads(), betas.size(), [&](std::size_t i) {
      YmhParams params = ymh_from_config(cfg);
      params.beta = betas[i];
      const TvResult r = exact_tv_u1(params, {}, K);
      tvs[i] = r.tv;
      widths[i] = r.region_halfwidth;
    });
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < betas.size(); ++i)
      rows.push_back({fmt_double(betas[i]), fmt_double(tvs[i]), fmt_double(widths[i])});
    const std::string out = out_path(cfg, "tv.csv");
    write_csv(out, preamble(cfg), {"beta", "tv", "region_halfwidth"}, rows);
    files.push_back(out);
    for (std::size_t i = 0; i < betas.size(); ++i)
      log << "compare tv: beta " << betas[i] << " -> " << tvs[i] << "\n";
  } else if (method == "moments") {
    const long samples = cfg.get_long("compare", "samples", 2000);
    const double eps = cfg.get_double("compare", "epsilon", 1.0 / 3.0);
    TestForm form = form_from_config(cfg);
    std::ostringstream report;
    report << "{\n  \"comparison_id\": \"moments\",\n  \"cells\": [\n";
    for (std::size_t i = 0; i < betas.size(); ++i) {
      YmhParams params = ymh_from_config(cfg);
      params.beta = betas[i];
      params.validate();
      Rng rng_a(cfg.seed() * 2 + 1), rng_b(cfg.seed() * 2 + 2);

      ChainOptions mc = mcmc_from_config(cfg);
      GaugeConfig gauge = initial_config(params);
      ChainOptions burn = mc;
      burn.sweeps = 0;
      run_chain(gauge, params, burn, rng_a);
      auto draw_ymh = [&]() {
        for (long t = 0; t < mc.thin; ++t)
          metropolis_sweep(gauge, params, mc.proposal_scale, rng_a);
        return lift(gauge, params.group.chart_radius, true, params.beta);
      };
      PrecisionSolver solver(assemble_precision(params.lattice, params.beta, params.mass));
      std::unique_ptr<BoundaryConditioner> cond;
      ProcaBoundary eta = ProcaBoundary::zero(*params.lattice, params.group);
      const bool box = !params.lattice->is_torus();
      if (box) cond = std::make_unique<BoundaryConditioner>(solver, 0);
      auto draw_proca = [&]() {
        AlgebraEdgeField f = box ? cond->sample(params.group, eta, rng_b)
                                 : sample_free(solver, params.group, rng_b);
        for (auto& x : f.X) x *= std::sqrt(params.beta);
        return f;
      };
      const PairingCoefficients pc = build_pairing(params.lattice, form, eps, 1.0);
      MomentReport rep =
          moment_comparison(draw_ymh, draw_proca, {pc}, samples, samples);
      report << "    {\"beta\": " << fmt_double(betas[i]) << ", \"ks\": "
             << fmt_double(rep.ks_stats[0]) << ", \"entries\": [";
      for (std::size_t k = 0; k < rep.entries.size(); ++k) {
        const auto& e = rep.entries[k];
        report << (k ? ", " : "") << "{\"name\": \"" << e.name
               << "\", \"z\": " << fmt_double(e.zscore) << "}";
      }
      report << "]}" << (i + 1 < betas.size() ? "," : "") << "\n";
      log << "compare moments: beta " << betas[i] << " KS " << rep.ks_stats[0] << "\n";
    }
    report << "  ]\n}\n";
    const std::string out = out_path(cfg, "moments.json");
    write_text_file(out, report.str());
    files.push_back(out);
  } else {
    throw ConfigError("compare.method", "must be 'tv' or 'moments'");
  }
  return files;
}

}  // namespace

GroupSpec group_from_config(const RunConfig& cfg) {
  const std::string fam = cfg.get_string("group", "family", "U1");
  const int N = static_cast<int>(cfg.get_long("group", "matrix_size", 1));
  const double r0 = cfg.get_double("group", "chart_radius", kDefaultChartRadius);
  try {
    return GroupSpec::make(family_from_name(fam), N, r0);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("group", e.what());
  }
}

std::shared_ptr<const LatticeComplex> lattice_from_config(const RunConfig& cfg) {
  const std::string topo = cfg.get_string("lattice", "topology", "torus");
  LatticeSpec spec;
  spec.dimension = static_cast<int>(cfg.get_long("lattice", "dimension", 2));
  spec.side = static_cast<int>(cfg.get_long("lattice", "side", 3));
  if (topo == "torus")
    spec.topology = Topology::Torus;
  else if (topo == "box")
    spec.topology = Topology::Box;
  else if (topo == "single_plaquette")
    return std::make_shared<LatticeComplex>(LatticeComplex::make_single_plaquette());
  else
    throw ConfigError("lattice.topology", "must be torus, box or single_plaquette");
  const std::string rule = cfg.get_string("lattice", "plaquette_rule", "coupled");
  if (rule == "coupled")
    spec.plaquette_rule = BoxPlaquetteRule::Coupled;
  else if (rule == "interior_only")
    spec.plaquette_rule = BoxPlaquetteRule::InteriorOnly;
  else
    throw ConfigError("lattice.plaquette_rule", "must be coupled or interior_only");
  try {
    return std::make_shared<LatticeComplex>(LatticeComplex::make(spec));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("lattice", e.what());
  }
}

YmhParams ymh_from_config(const RunConfig& cfg) {
  YmhParams p;
  p.beta = cfg.get_double("ymh", "beta", 1.0);
  p.mass = cfg.get_double("ymh", "mass", 1.0);
  p.kappa = cfg.get_double("ymh", "kappa", 0.1);
  p.group = group_from_config(cfg);
  p.lattice = lattice_from_config(cfg);
  const std::string bc = cfg.get_string("ymh", "boundary", "periodic");
  if (bc == "periodic")
    p.boundary = BoundaryCondition::Periodic;
  else if (bc == "fixed_identity")
    p.boundary = BoundaryCondition::Fixed;
  else
    throw ConfigError("ymh.boundary", "must be periodic or fixed_identity");
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("ymh", e.what());
  }
  return p;
}

ChainOptions mcmc_from_config(const RunConfig& cfg) {
  ChainOptions o;
  o.sweeps = cfg.get_long("mcmc", "sweeps", 1000);
  o.burn_in = cfg.get_long("mcmc", "burn_in", 1000);
  o.thin = cfg.get_long("mcmc", "thin", 10);
  o.proposal_scale = cfg.get_double("mcmc", "proposal_scale", 0.5);
  o.tune_proposal = cfg.get_bool("mcmc", "tune", true);
  o.checkerboard = cfg.get_bool("mcmc", "checkerboard", false);
  if (o.sweeps < 0) throw ConfigError("mcmc.sweeps", "must be >= 0");
  if (o.burn_in < 0) throw ConfigError("mcmc.burn_in", "must be >= 0");
  if (o.thin < 1) throw ConfigError("mcmc.thin", "must be >= 1");
  if (!(o.proposal_scale > 0)) throw ConfigError("mcmc.proposal_scale", "must be > 0");
  return o;
}

TestForm form_from_config(const RunConfig& cfg) {
  const std::string family = cfg.get_string("form", "family", "bump");
  const double radius = cfg.get_double("form", "radius", 0.5);
  const int dim = static_cast<int>(cfg.get_long("lattice", "dimension", 2));
  if (!(radius > 0)) throw ConfigError("form.radius", "must be > 0");
  std::vector<double> center = cfg.get_double_list("form", "center", {});
  if (!center.empty() && static_cast<int>(center.size()) != dim)
    throw ConfigError("form.center", "needs one entry per dimension");
  if (family == "bump") {
    const int slices = static_cast<int>(cfg.get_long("form", "slices", 1));
    const int slice = static_cast<int>(cfg.get_long("form", "slice", 0));
    const int dir = static_cast<int>(cfg.get_long("form", "direction", 1)) - 1;
    if (slice < 0 || slice >= slices) throw ConfigError("form.slice", "out of range");
    if (dir < 0 || dir >= dim) throw ConfigError("form.direction", "out of range");
    return TestForm::bump(dim, slices, slice, dir, radius, center);
  }
  if (family == "gradient") return TestForm::gradient(dim, radius, center);
  if (family == "curl") {
    if (dim != 2) throw ConfigError("form.family", "curl form requires dimension 2");
    return TestForm::curl2d(radius, center);
  }
  throw ConfigError("form.family", "must be bump, gradient or curl");
}

std::vector<std::string> run_experiment(const RunConfig& cfg, std::ostream& log) {
  const std::string exp = cfg.experiment();
  if (exp == "sample-ymh") return run_sample_ymh(cfg, log);
  if (exp == "sample-proca") return run_sample_proca(cfg, log);
  if (exp == "lift") return run_lift(cfg, log);
  if (exp == "pair") return run_pair(cfg, log);
  if (exp == "compare") return run_compare(cfg, log);
  if (exp == "decay") return run_decay(cfg, log);
  if (exp == "scaling") return run_scaling(cfg, log);
  if (exp == "spectrum") return run_spectrum(cfg, log);
  throw ConfigError("run.experiment",
                    "unknown experiment '" + exp +
                        "' (expected sample-ymh, sample-proca, lift, pair, compare, "
                        "decay, scaling, spectrum)");
}

}  // namespace procalab
