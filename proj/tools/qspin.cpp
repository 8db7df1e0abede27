// qspin: run a declarative spec file and write result.json plus CSV tables.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "qspin/cli/runner.hpp"

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw qspin::ResourceError("cannot write " + path.string());
  out << text;
}

int fail(const std::exception& e, const fs::path& out_dir) {
  const nlohmann::json err = qspin::cli::error_object(e);
  std::cout << err.dump(2) << "\n";
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (!ec) {
    std::ofstream f(out_dir / "error.json", std::ios::binary);
    if (f) f << err.dump(2) << "\n";
  }
  return qspin::cli::exit_code_for(e);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact-diagonalization toolkit for quantum spin systems"};
  app.require_subcommand(1);
  app.set_version_flag("--version", qspin::cli::kVersion);

  std::string spec_file;
  std::string out_dir = ".";
  int workers = 1;
  long long cap_dense = 4096;
  long long cap_sparse = 65536;
  CLI::App* run = app.add_subcommand("run", "Execute a run specification");
  run->add_option("spec-file", spec_file, "Path to the spec document")->required();
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();
  run->add_option("--workers", workers, "Worker threads for scans")->check(CLI::PositiveNumber)->capture_default_str();
  run->add_option("--cap-dense", cap_dense, "Largest dimension handled densely")->check(CLI::PositiveNumber)->capture_default_str();
  run->add_option("--cap-sparse", cap_sparse, "Largest dimension handled at all")->check(CLI::PositiveNumber)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const fs::path out = out_dir;
  try {
    const qspin::cli::RunSpec spec = qspin::cli::load_run_spec(spec_file);
    qspin::cli::RunOptions opt;
    opt.workers = workers;
    opt.caps = qspin::DimensionCaps{cap_dense, cap_sparse};
    qspin::default_caps() = opt.caps;

    const auto start = std::chrono::steady_clock::now();
    const qspin::cli::RunOutput result = qspin::cli::run(spec, opt);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    fs::create_directories(out);
    write_file(out / "result.json", result.result.dump(2) + "\n");
    for (const auto& [name, text] : result.tables) write_file(out / name, text);
    write_file(out / "timing.json", nlohmann::json{{"wall_time_seconds", seconds}}.dump(2) + "\n");
    std::cout << (out / "result.json").string() << "\n";
    return 0;
  } catch (const std::exception& e) {
    return fail(e, out);
  }
}
