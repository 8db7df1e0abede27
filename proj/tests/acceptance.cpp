// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (capped at 1 for the test driver).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "qspin/qspin.hpp"

using namespace qspin;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit;  // seconds; 0 means none
  std::function<Outcome()> check;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

double max_entry(const DenseMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

Operator chain(const Interaction& phi, int length, Boundary b, Index n,
               std::optional<Storage> storage = std::nullopt) {
  return assemble_hamiltonian(phi, build_volume({length}, b, n), {storage, default_caps()});
}

struct Model {
  std::string name;
  Volume volume;
  Operator h;
};

/// Every built-in model on a chain of the given length.
std::vector<Model> built_in_models(int length) {
  std::vector<Model> out;
  const Volume ring2 = build_volume({length}, Boundary::periodic, 2);
  const Volume open2 = build_volume({length}, Boundary::open, 2);
  const Volume ring3 = build_volume({length}, Boundary::periodic, 3);
  out.push_back({"heisenberg", ring2, assemble_hamiltonian(heisenberg(-1.0, kSpinHalf), ring2)});
  out.push_back({"heisenberg+field", ring2,
                 assemble_hamiltonian(heisenberg(1.0, kSpinHalf) + zeeman(0.7, kSpinHalf), ring2)});
  out.push_back({"xxz_suq2", open2, xxz_suq2_chain(length, 0.5)});
  out.push_back({"xy_field", ring2, assemble_hamiltonian(xy_field(0.5), ring2)});
  out.push_back({"ising", ring2, assemble_hamiltonian(ising(1.0, 0.3), ring2)});
  out.push_back({"aklt", ring3, assemble_hamiltonian(aklt(), ring3)});
  return out;
}

Outcome algebra() {
  double worst = 0.0;
  for (int two_s = 1; two_s <= 5; ++two_s) {
    const SpinQuantumNumber s(two_s);
    const SpinOperators o = spin_matrices(s);
    worst = std::max({worst, max_entry(commutator(o.sp, o.sm) - 2.0 * o.s3), max_entry(commutator(o.s3, o.sp) - o.sp),
                      max_entry(commutator(o.s3, o.sm) + o.sm),
                      max_entry(o.s1 * o.s1 + o.s2 * o.s2 + o.s3 * o.s3 - s.casimir() * o.identity)});
  }
  DenseMatrix sigma[3] = {DenseMatrix::Zero(2, 2), DenseMatrix::Zero(2, 2), DenseMatrix::Zero(2, 2)};
  sigma[0] << 0, 1, 1, 0;
  sigma[1] << 0, Complex(0, -1), Complex(0, 1), 0;
  sigma[2] << 1, 0, 0, -1;
  const SpinOperators half = spin_matrices(kSpinHalf);
  bool pauli_exact = true;
  for (int j = 0; j < 3; ++j) pauli_exact = pauli_exact && DenseMatrix(2.0 * half.component(j + 1)) == sigma[j];
  return {worst <= 1e-12 && pauli_exact,
          "max relation/Casimir defect " + fmt("%.3g", worst) + ", Pauli exact " + (pauli_exact ? "yes" : "no")};
}

Outcome hamiltonian_oracle() {
  const Eigen::VectorXd two = full_spectrum(chain(heisenberg(1.0, kSpinHalf), 2, Boundary::open, 2)).eigenvalues;
  const double expected[] = {-0.25, -0.25, -0.25, 0.75};
  double worst = 0.0;
  for (int k = 0; k < 4; ++k) worst = std::max(worst, std::abs(two(k) - expected[k]));
  const double e0 = ground_space(chain(heisenberg(-1.0, kSpinHalf), 4, Boundary::periodic, 2)).energy;
  return {worst <= 1e-12 && std::abs(e0 + 2.0) <= 1e-10,
          "two-site defect " + fmt("%.3g", worst) + ", ring-4 E0 = " + fmt("%.15g", e0)};
}

Outcome su2_invariance() {
  double worst = 0.0;
  for (int length = 2; length <= 8; ++length)
    for (Boundary b : {Boundary::open, Boundary::periodic})
      for (double j : {1.0, -1.0}) {
        const Volume v = build_volume({length}, b, 2);
        worst = std::max(worst, invariance_residual(assemble_hamiltonian(heisenberg(j, kSpinHalf), v), total_spin(v)));
      }
  return {worst <= 1e-10, "max ||[H, S^i]|| = " + fmt("%.3g", worst)};
}

Outcome suq2_invariance() {
  double worst_comm = 0.0, min_eig = 0.0;
  std::string kernel_mismatch;
  for (int length = 2; length <= 6; ++length)
    for (double q : {0.3, 0.5, 0.9, 1.0}) {
      const Operator h = xxz_suq2_chain(length, q);
      worst_comm = std::max(worst_comm, invariance_residual(h, suq2_generators(length, q)));
      const RealVector ev = full_spectrum(h).eigenvalues;
      min_eig = std::min(min_eig, ev(0));
      int kernel = 0;
      for (Index k = 0; k < ev.size(); ++k) kernel += std::abs(ev(k)) <= 1e-8;
      if (kernel != length + 1)
        kernel_mismatch += " L=" + std::to_string(length) + ",q=" + fmt("%g", q) + ":" + std::to_string(kernel);
    }
  return {worst_comm <= 1e-10 && min_eig >= -1e-10 && kernel_mismatch.empty(),
          "max residual " + fmt("%.3g", worst_comm) + ", min eigenvalue " + fmt("%.3g", min_eig) +
              (kernel_mismatch.empty() ? ", kernel dim L+1 everywhere" : ", kernel mismatch" + kernel_mismatch)};
}

Outcome kms_certification() {
  std::mt19937_64 rng(20240501);
  double worst = 0.0;
  long trials = 0;
  for (const Model& m : built_in_models(4))
    for (double beta : {0.1, 1.0, 10.0})
      for (int k = 0; k < 50; ++k) {
        const Operator a = random_local_operator(m.volume, rng), b = random_local_operator(m.volume, rng);
        worst = std::max(worst, kms_residual(m.h, beta, a, b));
        ++trials;
      }
  return {worst <= 1e-10, std::to_string(trials) + " trials, max residual " + fmt("%.3g", worst)};
}

Outcome eeb_certification() {
  std::mt19937_64 rng(20240502);
  double worst = std::numeric_limits<double>::infinity();
  double tracial = 0.0;
  long trials = 0;
  for (const Model& m : built_in_models(4)) {
    for (double beta : {0.1, 1.0, 10.0}) {
      const GibbsState g = gibbs(m.h, beta);
      for (int k = 0; k < 100; ++k) {
        worst = std::min(worst, eeb_deficit(m.h, beta, random_local_operator(m.volume, rng), g.rho));
        ++trials;
      }
    }
    const GibbsState g0 = gibbs(m.h, 0.0);
    for (int k = 0; k < 10; ++k)
      tracial = std::max(tracial, std::abs(eeb_deficit(m.h, 0.0, random_local_operator(m.volume, rng), g0.rho)));
  }
  return {worst >= -1e-10 && tracial <= 1e-12, std::to_string(trials) + " trials, min deficit " + fmt("%.3g", worst) +
                                                   ", beta=0 max |deficit| " + fmt("%.3g", tracial)};
}

Outcome ground_stability() {
  std::mt19937_64 rng(20240503);
  double worst = std::numeric_limits<double>::infinity();
  for (const Model& m : built_in_models(6)) {
    const GroundSpace g = ground_space(m.h);
    const StateVector psi(Vector(g.basis.col(0)));
    for (int k = 0; k < 100; ++k) worst = std::min(worst, stability_value(m.h, psi, random_local_operator(m.volume, rng)));
  }
  // Highest state of the two-site ferromagnet, lowered onto the ground space.
  const Operator h = chain(heisenberg(1.0, kSpinHalf), 2, Boundary::open, 2);
  const EigenSolution sol = full_spectrum(h);
  const StateVector top(Vector(sol.eigenvectors.col(3)));
  const Operator lower(DenseMatrix(sol.eigenvectors.col(0) * sol.eigenvectors.col(3).adjoint()));
  const double counter = stability_value(h, top, lower);
  return {worst >= -1e-12 && counter < -0.01,
          "min over ground states " + fmt("%.3g", worst) + ", counterexample " + fmt("%.6g", counter)};
}

Outcome lieb_robinson() {
  const Volume v = build_volume({10}, Boundary::open, 2);
  const DenseMatrix s3 = spin_matrices(kSpinHalf).s3;
  const LRScan scan = lr_scan(heisenberg(-1.0, kSpinHalf), v, s3, s3, {0.0, 0.25, 0.5, 1.0}, {1, 2, 3, 4, 5, 6, 7, 8, 9});
  const double t0 = scan.norms.row(0).maxCoeff();
  const double bound = 2.0 * scan.a_norm * scan.b_norm;
  const double largest = scan.norms.maxCoeff();
  const LRFit fit = lr_fit(scan);
  return {t0 == 0.0 && largest <= bound && fit.v > 0.0 && fit.c > 0.0 && fit.max_violation <= 1e-8,
          "t=0 max " + fmt("%g", t0) + ", max norm " + fmt("%.4g", largest) + " <= " + fmt("%g", bound) + ", c = " +
              fmt("%.4g", fit.c) + ", v = " + fmt("%.4g", fit.v) + ", max violation " + fmt("%.3g", fit.max_violation)};
}

Outcome afm_energy() {
  SpectrumOptions opt;
  opt.mode = SolverMode::sparse;
  std::vector<double> x, y;
  std::string per_site;
  for (int length : {8, 10, 12}) {
    const Operator h = chain(heisenberg(-1.0, kSpinHalf), length, Boundary::periodic, 2, Storage::sparse);
    const double e = ground_space(h, opt).energy / length;
    x.push_back(1.0 / (length * length));
    y.push_back(e);
    per_site += " L=" + std::to_string(length) + ":" + fmt("%.6f", e);
  }
  // Least squares e(L) = e_inf + a / L^2.
  const double n = 3.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int k = 0; k < 3; ++k) {
    sx += x[k];
    sy += y[k];
    sxx += x[k] * x[k];
    sxy += x[k] * y[k];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double e_inf = (sy - slope * sx) / n;
  const double exact = 0.25 - std::log(2.0);
  return {std::abs(e_inf - exact) <= 0.01,
          "E/L" + per_site + ", extrapolated " + fmt("%.5f", e_inf) + " vs " + fmt("%.5f", exact)};
}

Outcome aklt_properties() {
  SpectrumOptions opt;
  opt.mode = SolverMode::sparse;
  bool ok = true;
  std::string detail;
  for (int length : {6, 8}) {
    const Volume v = build_volume({length}, Boundary::periodic, 3);
    const GroundSpace g = ground_space(assemble_hamiltonian(aklt(), v, {Storage::sparse, default_caps()}), opt);
    const double gap = spectral_gap(g);
    double c[4];
    for (std::size_t r = 1; r <= 3; ++r) c[r] = two_point(g, 0, r, v, CorrelationKind::spin_dot);
    const double ratio1 = c[2] / c[1], ratio2 = c[3] / c[2];
    const bool pass = std::abs(g.energy) <= 1e-10 && g.degeneracy == 1 && gap > 0.3 &&
                      std::abs(ratio1 + 1.0 / 3.0) <= 0.05 && std::abs(ratio2 + 1.0 / 3.0) <= 0.05;
    ok = ok && pass;
    detail += (detail.empty() ? "" : "; ") + std::string("L=") + std::to_string(length) + " E0 " +
              fmt("%.2g", g.energy) + " deg " + std::to_string(g.degeneracy) + " gap " + fmt("%.4f", gap) +
              " ratios " + fmt("%.4f", ratio1) + ", " + fmt("%.4f", ratio2) + (pass ? "" : " [out of tolerance]");
  }
  return {ok, detail};
}

Outcome dynamics_laws() {
  const Volume v = build_volume({4}, Boundary::open, 2);
  const Operator h = assemble_hamiltonian(heisenberg(-1.0, kSpinHalf), v);
  std::mt19937_64 rng(20240504);
  std::uniform_real_distribution<double> time(-5.0, 5.0);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Operator a = random_local_operator(v, rng), b = random_local_operator(v, rng);
    const double s = time(rng), t = time(rng);
    worst = std::max(worst, evolve(h, evolve(h, a, s), t).max_abs_difference(evolve(h, a, s + t)));
    worst = std::max(worst, evolve(h, a * b, t).max_abs_difference(evolve(h, a, t) * evolve(h, b, t)));
    worst = std::max(worst, evolve(h, a.adjoint(), t).max_abs_difference(evolve(h, a, t).adjoint()));
  }
  return {worst <= 1e-10, "max defect " + fmt("%.3g", worst)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome reproducibility() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("qspin_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  const std::string spec = std::string(QSPIN_SOURCE_DIR) + "/specs/verify.spec";
  int codes[2];
  for (int k = 0; k < 2; ++k) {
    const std::string cmd = std::string(QSPIN_CLI_PATH) + " run " + spec + " --out " + (dir / std::to_string(k)).string() +
                            " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    codes[k] = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  const std::string a = slurp(dir / "0" / "result.json"), b = slurp(dir / "1" / "result.json");
  fs::remove_all(dir);
  const bool same = !a.empty() && a == b;
  return {codes[0] == 0 && codes[1] == 0 && same,
          "exit codes " + std::to_string(codes[0]) + "/" + std::to_string(codes[1]) + ", " +
              std::to_string(a.size()) + " bytes, " + (same ? "identical" : "different")};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "spin algebra", 1.0, algebra},
      {2, "Hamiltonian oracle", 1.0, hamiltonian_oracle},
      {3, "SU(2) invariance", 10.0, su2_invariance},
      {4, "SU_q(2) invariance", 30.0, suq2_invariance},
      {5, "KMS certification", 60.0, kms_certification},
      {6, "energy-entropy balance", 60.0, eeb_certification},
      {7, "ground-state stability", 30.0, ground_stability},
      {8, "Lieb-Robinson scan", 120.0, lieb_robinson},
      {9, "antiferromagnetic chain energy", 300.0, afm_energy},
      {10, "AKLT properties", 300.0, aklt_properties},
      {11, "dynamics group law and automorphism", 30.0, dynamics_laws},
      {12, "bit-reproducible results", 0.0, reproducibility},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit > 0.0 && seconds > c.time_limit) {
      o.passed = false;
      o.detail += "; exceeded the " + fmt("%g", c.time_limit) + " s budget";
    }
    failed += !o.passed;
    std::printf("[%s] criterion %2d %s: %s (%.2f s)\n", o.passed ? "PASS" : "FAIL", c.id, c.name.c_str(),
                o.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
