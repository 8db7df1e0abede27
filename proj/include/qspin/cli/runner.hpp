#pragma once

// Executes a RunSpec and produces the result document plus CSV tables.

#include <atomic>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "qspin/cli/run_spec.hpp"
#include "qspin/qspin.hpp"

namespace qspin::cli {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kSchema = "qspin-result/1";

struct RunOptions {
  int workers = 1;
  DimensionCaps caps{};
  std::ostream* progress = &std::cerr;
};

struct RunOutput {
  nlohmann::json result;
  std::map<std::string, std::string> tables;  // file name -> CSV text
};

/// Maps library errors to process exit codes.
inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const DomainError*>(&e) ||
      dynamic_cast<const UnsupportedError*>(&e) || dynamic_cast<const DimensionError*>(&e)) {
    return 2;
  }
  if (dynamic_cast<const ResourceError*>(&e)) return 3;
  if (dynamic_cast<const SolverError*>(&e) || dynamic_cast<const RangeError*>(&e) ||
      dynamic_cast<const DegenerateInputError*>(&e)) {
    return 4;
  }
  return 1;
}

inline nlohmann::json error_object(const std::exception& e) {
  nlohmann::json err;
  const auto* qe = dynamic_cast<const Error*>(&e);
  err["error"]["kind"] = qe ? qe->kind() : "internal";
  err["error"]["message"] = e.what();
  err["error"]["exit_code"] = exit_code_for(e);
  if (const auto* se = dynamic_cast<const SolverError*>(&e)) err["error"]["residual"] = se->residual();
  if (const auto* pe = dynamic_cast<const ParseError*>(&e); pe && pe->line() > 0) err["error"]["line"] = pe->line();
  return err;
}

namespace detail {

inline nlohmann::json to_json(const RealVector& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Index k = 0; k < v.size(); ++k) a.push_back(v(k));
  return a;
}

inline nlohmann::json spec_json(const RunSpec& s) {
  nlohmann::json j;
  j["model"] = {{"name", s.model.name}, {"J", s.model.j}, {"h", s.model.h}, {"q", s.model.q},
                {"two_S", s.model.two_s}};
  j["volume"] = {{"dims", s.volume.dims}, {"boundary", to_string(s.volume.boundary)}};
  const TaskSpec& t = s.task;
  nlohmann::json task{{"kind", to_string(t.kind)}};
  switch (t.kind) {
    case TaskKind::spectrum: task["levels"] = t.levels; task["correlations"] = t.correlations; break;
    case TaskKind::thermal: task["beta"] = t.betas; break;
    case TaskKind::dynamics:
      task["times"] = t.times;
      task["distances"] = t.distances;
      task["observable_a"] = t.observable_a;
      task["observable_b"] = t.observable_b;
      break;
    case TaskKind::verify: task["seed"] = t.seed.value_or(0); task["beta"] = t.betas; task["trials"] = t.trials; break;
    case TaskKind::scan:
      task["variable"] = t.variable;
      task["start"] = t.start;
      task["stop"] = t.stop;
      task["points"] = t.points;
      break;
  }
  j["task"] = task;
  j["output"] = {{"csv", s.output.csv}};
  return j;
}

/// Throws SolverError if any number in the document is NaN or infinite.
inline void require_finite(const nlohmann::json& j, const std::string& path = "payload") {
  if (j.is_number_float() && !std::isfinite(j.get<double>())) {
    throw SolverError("non-finite value at " + path);
  }
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) require_finite(it.value(), path + "." + it.key());
  } else if (j.is_array()) {
    for (std::size_t k = 0; k < j.size(); ++k) require_finite(j[k], path + "[" + std::to_string(k) + "]");
  }
}

class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header) {
    for (std::size_t k = 0; k < header.size(); ++k) out_ << (k ? "," : "") << header[k];
    out_ << "\n";
  }
  void row(const std::vector<double>& values) {
    for (std::size_t k = 0; k < values.size(); ++k) {
      if (!std::isfinite(values[k])) throw SolverError("non-finite value in CSV table");
      out_ << (k ? "," : "") << format_double(values[k]);
    }
    out_ << "\n";
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

struct Problem {
  Volume volume;
  Interaction interaction;
  Operator hamiltonian;
};

inline Problem build_problem(const ModelSpec& model, const VolumeSpec& vs, const DimensionCaps& caps) {
  Volume v = build_volume(vs.dims, vs.boundary, model_local_dim(model), caps.sparse);
  Interaction phi = make_interaction(model, v);
  Operator h = assemble_hamiltonian(phi, v, AssemblyOptions{std::nullopt, caps});
  return Problem{std::move(v), std::move(phi), std::move(h)};
}

inline void progress(const RunOptions& opt, std::mutex& mu, TaskKind kind, int k, int total) {
  if (!opt.progress) return;
  std::lock_guard<std::mutex> lock(mu);
  *opt.progress << "task=" << to_string(kind) << " point=" << k << "/" << total << "\n" << std::flush;
}

inline SpectrumOptions spectrum_options(const Operator& h, const DimensionCaps& caps) {
  SpectrumOptions o;
  o.mode = h.dim() <= caps.dense ? SolverMode::dense : SolverMode::sparse;
  return o;
}

inline nlohmann::json run_spectrum(const RunSpec& spec, const RunOptions& opt, RunOutput& out, std::mutex& mu) {
  const Problem p = build_problem(spec.model, spec.volume, opt.caps);
  nlohmann::json j;
  const bool dense = p.hamiltonian.dim() <= opt.caps.dense;
  j["mode"] = dense ? "dense" : "sparse";
  j["hilbert_dim"] = p.hamiltonian.dim();
  GroundSpace g;
  if (dense) {
    const EigenSolution sol = full_spectrum(p.hamiltonian);
    j["eigenvalues"] = to_json(sol.eigenvalues);
    j["max_residual"] = sol.residuals.maxCoeff();
    g = ground_space(p.hamiltonian, spectrum_options(p.hamiltonian, opt.caps));
  } else {
    SpectrumOptions so = spectrum_options(p.hamiltonian, opt.caps);
    const KrylovResult r = lowest_eigenpairs(p.hamiltonian, spec.task.levels, so.krylov);
    j["eigenvalues"] = to_json(r.values);
    j["max_residual"] = r.residuals.maxCoeff();
    g = ground_space(p.hamiltonian, so);
  }
  j["ground_energy"] = g.energy;
  j["ground_energy_per_site"] = g.energy / static_cast<double>(p.volume.size());
  j["degeneracy"] = g.degeneracy;
  j["gap"] = spectral_gap(g);
  if (spec.task.correlations) {
    Csv csv({"distance", "sdots", "s3s3"});
    nlohmann::json corr = nlohmann::json::array();
    const int max_d = p.volume.is_chain() ? static_cast<int>(p.volume.size()) - 1 : 0;
    for (int d = 0; d <= max_d; ++d) {
      const double sd = two_point(g, 0, static_cast<std::size_t>(d), p.volume, CorrelationKind::spin_dot);
      const double zz = two_point(g, 0, static_cast<std::size_t>(d), p.volume, CorrelationKind::s3s3);
      corr.push_back({{"distance", d}, {"sdots", sd}, {"s3s3", zz}});
      csv.row({static_cast<double>(d), sd, zz});
    }
    j["correlations"] = corr;
    j["structure_factor_pi"] =
        structure_factor(g, p.volume, std::vector<double>(p.volume.dimension(), std::numbers::pi));
    if (spec.output.csv) out.tables["correlations.csv"] = csv.str();
  }
  progress(opt, mu, TaskKind::spectrum, 1, 1);
  return j;
}

inline nlohmann::json run_thermal(const RunSpec& spec, const RunOptions& opt, RunOutput& out, std::mutex& mu) {
  const Problem p = build_problem(spec.model, spec.volume, opt.caps);
  if (p.hamiltonian.dim() > opt.caps.dense) throw ResourceError("thermal: needs dense mode");
  const DenseMatrix h = p.hamiltonian.to_dense();
  const DenseMatrix h2 = h * h;
  Csv csv({"beta", "energy", "log_Z", "entropy", "specific_heat"});
  nlohmann::json rows = nlohmann::json::array();
  int k = 0;
  for (double beta : spec.task.betas) {
    const GibbsState gs = gibbs(p.hamiltonian, beta);
    const double e = expectation(gs.rho, p.hamiltonian).real();
    const double e2 = expectation(gs.rho, Operator(h2)).real();
    const double entropy = beta * e + gs.log_partition_function;
    const double heat = beta * beta * (e2 - e * e);
    rows.push_back({{"beta", beta},
                    {"energy", e},
                    {"log_Z", gs.log_partition_function},
                    {"entropy", entropy},
                    {"specific_heat", heat}});
    csv.row({beta, e, gs.log_partition_function, entropy, heat});
    progress(opt, mu, TaskKind::thermal, ++k, static_cast<int>(spec.task.betas.size()));
  }
  if (spec.output.csv) out.tables["thermal.csv"] = csv.str();
  return nlohmann::json{{"mode", "dense"}, {"points", rows}};
}

inline DenseMatrix named_observable(const std::string& name, Index local_dim) {
  const SpinOperators ops = spin_matrices(SpinQuantumNumber::from_local_dim(local_dim));
  if (name == "S1") return ops.s1;
  if (name == "S2") return ops.s2;
  return ops.s3;
}

inline nlohmann::json run_dynamics(const RunSpec& spec, const RunOptions& opt, RunOutput& out, std::mutex& mu) {
  Volume v = build_volume(spec.volume.dims, spec.volume.boundary, model_local_dim(spec.model), opt.caps.sparse);
  const Interaction phi = make_interaction(spec.model, v);
  LRScan scan = lr_scan(phi, v, named_observable(spec.task.observable_a, v.local_dim()),
                              named_observable(spec.task.observable_b, v.local_dim()), spec.task.times,
                              spec.task.distances);
  scan.model = spec.model.name;
  scan.a_label = spec.task.observable_a;
  scan.b_label = spec.task.observable_b;
  Csv csv({"t", "x", "norm"});
  nlohmann::json norms = nlohmann::json::array();
  for (std::size_t ti = 0; ti < scan.times.size(); ++ti) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t xi = 0; xi < scan.distances.size(); ++xi) {
      const double n = scan.norms(static_cast<Index>(ti), static_cast<Index>(xi));
      row.push_back(n);
      csv.row({scan.times[ti], static_cast<double>(scan.distances[xi]), n});
    }
    norms.push_back(row);
  }
  progress(opt, mu, TaskKind::dynamics, 1, 1);
  const LRFit fit = lr_fit(scan);
  if (spec.output.csv) out.tables["lr_scan.csv"] = csv.str();
  return nlohmann::json{{"mode", "dense"},
                        {"model", scan.model},
                        {"volume", scan.volume},
                        {"observable_a", scan.a_label},
                        {"observable_b", scan.b_label},
                        {"times", scan.times},
                        {"distances", scan.distances},
                        {"norms", norms},
                        {"norm_a", scan.a_norm},
                        {"norm_b", scan.b_norm},
                        {"fit",
                         {{"c", fit.c},
                          {"v", fit.v},
                          {"max_violation", fit.max_violation},
                          {"points_used", fit.points_used},
                          {"method", fit.method}}}};
}

/// Symmetry generators certified for each model.
inline std::vector<GeneratorSet> model_symmetries(const ModelSpec& m, const Volume& v) {
  std::vector<GeneratorSet> out;
  if (m.name == "xxz_suq2") {
    out.push_back(suq2_generators(static_cast<int>(v.size()), m.q));
  } else if ((m.name == "heisenberg" && m.h == 0.0) || m.name == "aklt") {
    out.push_back(total_spin(v));
  } else {
    // Rotations about the field axis survive in every remaining model.
    GeneratorSet s3 = total_spin(v);
    s3.name = "total_s3";
    s3.operators = {s3.operators[2]};
    out.push_back(std::move(s3));
  }
  return out;
}

inline nlohmann::json run_verify(const RunSpec& spec, const RunOptions& opt, RunOutput&, std::mutex& mu) {
  const Problem p = build_problem(spec.model, spec.volume, opt.caps);
  if (p.hamiltonian.dim() > opt.caps.dense) throw ResourceError("verify: needs dense mode");
  const TaskSpec& t = spec.task;
  std::mt19937_64 rng(*t.seed);
  nlohmann::json j;
  j["mode"] = "dense";
  j["hermiticity_defect"] = p.hamiltonian.hermiticity_defect();

  nlohmann::json sym = nlohmann::json::array();
  double sym_max = 0.0;
  for (const GeneratorSet& g : model_symmetries(spec.model, p.volume)) {
    const double r = invariance_residual(p.hamiltonian, g);
    sym_max = std::max(sym_max, r);
    sym.push_back({{"generators", g.name}, {"residual", r}});
  }
  j["symmetry"] = {{"checks", sym}, {"max_residual", sym_max}, {"passed", sym_max <= tol::kSolver}};

  const GroundSpace g = ground_space(p.hamiltonian, spectrum_options(p.hamiltonian, opt.caps));
  j["ground"] = {{"energy", g.energy}, {"degeneracy", g.degeneracy}, {"gap", spectral_gap(g)}};

  nlohmann::json kms = nlohmann::json::array();
  nlohmann::json eeb = nlohmann::json::array();
  double kms_max = 0.0;
  double eeb_min = std::numeric_limits<double>::infinity();
  const int total = static_cast<int>(t.betas.size()) + 1;
  int step = 0;
  for (double beta : t.betas) {
    const GibbsState gs = gibbs(p.hamiltonian, beta);
    double worst_kms = 0.0;
    double worst_eeb = std::numeric_limits<double>::infinity();
    for (int k = 0; k < t.trials; ++k) {
      const Operator a = random_local_operator(p.volume, rng);
      const Operator b = random_local_operator(p.volume, rng);
      worst_kms = std::max(worst_kms, kms_residual(p.hamiltonian, beta, a, b));
      const Operator x = random_local_operator(p.volume, rng);
      worst_eeb = std::min(worst_eeb, eeb_deficit(p.hamiltonian, beta, x, gs.rho));
    }
    kms_max = std::max(kms_max, worst_kms);
    eeb_min = std::min(eeb_min, worst_eeb);
    kms.push_back({{"beta", beta}, {"max_residual", worst_kms}});
    eeb.push_back({{"beta", beta}, {"min_deficit", worst_eeb}});
    progress(opt, mu, TaskKind::verify, ++step, total);
  }
  j["kms"] = {{"points", kms}, {"max_residual", kms_max}, {"passed", kms_max <= tol::kSolver}};
  j["eeb"] = {{"points", eeb}, {"min_deficit", eeb.empty() ? 0.0 : eeb_min}, {"passed", eeb.empty() || eeb_min >= -tol::kSolver}};

  double stab_min = std::numeric_limits<double>::infinity();
  const StateVector psi(Vector(g.basis.col(0)));
  for (int k = 0; k < t.trials; ++k) {
    stab_min = std::min(stab_min, stability_value(p.hamiltonian, psi, random_local_operator(p.volume, rng)));
  }
  j["stability"] = {{"min_value", stab_min}, {"passed", stab_min >= -tol::kExact}};
  progress(opt, mu, TaskKind::verify, ++step, total);
  return j;
}

inline ModelSpec with_scan_value(ModelSpec m, const std::string& variable, double value) {
  if (variable == "J") m.j = value;
  else if (variable == "h") m.h = value;
  else if (variable == "q") m.q = value;
  else if (variable == "delta") m.q = xxz_q_from_delta(value);
  return m;
}

inline nlohmann::json run_scan(const RunSpec& spec, const RunOptions& opt, RunOutput& out, std::mutex& mu) {
  const TaskSpec& t = spec.task;
  std::vector<double> values(static_cast<std::size_t>(t.points));
  for (int k = 0; k < t.points; ++k)
    values[k] = t.points == 1 ? t.start : t.start + (t.stop - t.start) * k / (t.points - 1);
  for (double v : values) (void)with_scan_value(spec.model, t.variable, v);  // validates the range up front

  struct Point {
    double e0 = 0.0, gap = 0.0;
    int degeneracy = 0;
  };
  std::vector<Point> results(values.size());
  std::vector<std::exception_ptr> errors(values.size());
  std::atomic<std::size_t> next{0};
  std::atomic<int> done{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < values.size(); k = next++) {
      try {
        const Problem p = build_problem(with_scan_value(spec.model, t.variable, values[k]), spec.volume, opt.caps);
        const GroundSpace g = ground_space(p.hamiltonian, spectrum_options(p.hamiltonian, opt.caps));
        results[k] = Point{g.energy, spectral_gap(g), g.degeneracy};
      } catch (...) {
        errors[k] = std::current_exception();
      }
      progress(opt, mu, TaskKind::scan, ++done, static_cast<int>(values.size()));
    }
  };
  const int workers = std::max(1, std::min<int>(opt.workers, static_cast<int>(values.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  Csv csv({t.variable, "E0", "gap", "degeneracy"});
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t k = 0; k < values.size(); ++k) {
    rows.push_back({{t.variable, values[k]},
                    {"E0", results[k].e0},
                    {"gap", results[k].gap},
                    {"degeneracy", results[k].degeneracy}});
    csv.row({values[k], results[k].e0, results[k].gap, static_cast<double>(results[k].degeneracy)});
  }
  if (spec.output.csv) out.tables["scan.csv"] = csv.str();
  return nlohmann::json{{"variable", t.variable}, {"points", rows}};
}

}  // namespace detail

/// Runs a spec; throws library errors (see exit_code_for).
inline RunOutput run(const RunSpec& spec, const RunOptions& opt = {}) {
  RunOutput out;
  std::mutex mu;
  nlohmann::json payload;
  switch (spec.task.kind) {
    case TaskKind::spectrum: payload = detail::run_spectrum(spec, opt, out, mu); break;
    case TaskKind::thermal: payload = detail::run_thermal(spec, opt, out, mu); break;
    case TaskKind::dynamics: payload = detail::run_dynamics(spec, opt, out, mu); break;
    case TaskKind::verify: payload = detail::run_verify(spec, opt, out, mu); break;
    case TaskKind::scan: payload = detail::run_scan(spec, opt, out, mu); break;
  }
  detail::require_finite(payload);
  nlohmann::json& r = out.result;
  r["schema"] = kSchema;
  r["spec"] = detail::spec_json(spec);
  r["spec_text"] = to_text(spec);
  r["provenance"] = {{"version", kVersion},
                     {"seed", spec.task.seed ? nlohmann::json(*spec.task.seed) : nlohmann::json(nullptr)},
                     {"tolerances",
                      {{"exact", tol::kExact},
                       {"solver", tol::kSolver},
                       {"degeneracy", SpectrumOptions{}.degeneracy_tol},
                       {"lr_noise_floor", kLRNoiseFloor}}},
                     {"caps", {{"dense", opt.caps.dense}, {"sparse", opt.caps.sparse}}}};
  r["payload"] = std::move(payload);
  return out;
}

}  // namespace qspin::cli
