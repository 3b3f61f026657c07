#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "nevlab/runner.hpp"

using namespace nevlab;

namespace {

void print_manifest(const char* title, const std::vector<GalleryEntry>& entries) {
  std::printf("%s\n", title);
  for (const auto& e : entries) {
    std::string params;
    for (const auto& p : e.params) params += (params.empty() ? "" : ",") + p;
    std::printf("  %-16s R=%-4s %-18s %-22s %s\n", e.name.c_str(), e.domain.c_str(), e.geometry.c_str(),
                params.empty() ? "-" : params.c_str(), e.description.c_str());
  }
}

int run(const std::string& config, const std::string& out, int threads, bool svg, bool assert_mode) {
  std::filesystem::path dir(out);
  try {
    precision_mode_from_env();
    set_worker_threads(threads);
    ExperimentConfig cfg = load_config(config);
    ExperimentResult res = run_experiment(cfg, dir, svg);
    std::printf("%s: %zu rows written to %s\n", cfg.name.c_str(), res.table.rows.size(), dir.string().c_str());
    if (!assert_mode) return 0;
    bool all = true;
    for (const auto& o : check_assertions(cfg, res)) {
      const auto& a = o.assertion;
      if (a.op == "in")
        std::printf("%s %s = %.10Lg (in [%.10Lg, %.10Lg])\n", o.ok ? "PASS" : "FAIL", a.key.c_str(), o.value, a.lo, a.hi);
      else
        std::printf("%s %s = %.10Lg (%s %.10Lg)\n", o.ok ? "PASS" : "FAIL", a.key.c_str(), o.value, a.op.c_str(), a.lo);
      all = all && o.ok;
    }
    return all ? 0 : 4;
  } catch (const Error& e) {
    std::fprintf(stderr, "error (%s): %s\n", error_kind_name(e.kind()), e.what());
    try {
      write_error_record(dir, e.kind(), e.what());
    } catch (const std::exception&) {
    }
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nevlab: numerical value distribution experiments"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "print the gallery manifest");

  std::string config, out;
  int threads = 1;
  bool svg = false, assert_mode = false;
  auto* runc = app.add_subcommand("run", "run one experiment config");
  runc->add_option("--config", config, "experiment config file")->required();
  runc->add_option("--out", out, "output directory")->required();
  runc->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  runc->add_flag("--svg", svg, "also write plot.svg");
  runc->add_flag("--assert", assert_mode, "check the [assert] section; exit 4 on failure");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (*list) {
    print_manifest("maps:", map_gallery_manifest());
    print_manifest("curves:", curve_gallery_manifest());
    return 0;
  }
  return run(config, out, threads, svg, assert_mode);
}
