// section_lab: IUR section sampling, section-size density estimation and
// particle size unfolding from the command line.

#include <CLI11.hpp>

#include <iostream>
#include <map>

#include "section_lab/cli.hpp"
#include "section_lab/sampler.hpp"

using section_lab::cli::Command;
using section_lab::cli::RunConfig;

namespace {

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--shape", cfg.shape,
                  "square, cube, dodecahedron, ball, disk, polygon<k>, or a body JSON file");
  sub->add_option("--n", cfg.n, "number of accepted sections")->check(CLI::PositiveNumber);
  sub->add_option("--seed", cfg.seed, "random seed");
  sub->add_option("-o,--output", cfg.output, "output file");
  sub->add_option("--workers", cfg.workers, "worker threads (default $SECTION_LAB_WORKERS or 1)")
      ->check(CLI::PositiveNumber);
  sub->add_flag("--normalize-volume", cfg.normalize_volume, "rescale the body to unit volume");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random hyperplane sections of convex bodies"};
  app.require_subcommand(1);

  RunConfig cfg;
  cfg.workers = section_lab::default_workers();

  const std::map<std::string, section_lab::cli::Scale> scales{
      {"root", section_lab::cli::Scale::root},
      {"volume", section_lab::cli::Scale::volume},
      {"both", section_lab::cli::Scale::both}};
  const std::map<std::string, section_lab::cli::Observed> observed{
      {"areas", section_lab::cli::Observed::areas},
      {"roots", section_lab::cli::Observed::roots}};

  auto* sample = app.add_subcommand("sample", "draw IUR section volumes");
  add_common(sample, cfg);

  auto* density = app.add_subcommand("density", "reflection KDE of the section size density");
  add_common(density, cfg);
  density->add_option("--grid-points", cfg.grid_points, "evaluation grid size")->check(CLI::Range(16, 1 << 24));
  density->add_option("--bandwidth", cfg.bandwidth, "fixed bandwidth instead of Sheather-Jones");
  std::string scale_name = "root";
  std::string observed_name = "areas";
  density->add_option("--scale", scale_name, "root, volume or both")
      ->check(CLI::IsMember(scales, CLI::ignore_case));

  auto* ecdf = app.add_subcommand("ecdf", "empirical CDF of section sizes");
  add_common(ecdf, cfg);
  ecdf->add_option("--scale", scale_name, "root or volume")
      ->check(CLI::IsMember(scales, CLI::ignore_case));

  auto* unfold = app.add_subcommand("unfold", "NPMLE of the length-biased size distribution");
  add_common(unfold, cfg);
  unfold->add_option("--observations", cfg.observations, "observed profile sizes (CSV or JSON)")->required();
  unfold->add_option("--observed", observed_name, "areas (default) or roots")
      ->check(CLI::IsMember(observed, CLI::ignore_case));
  unfold->add_option("--reference-n", cfg.reference_n, "reference sample size for the kernel density");
  unfold->add_option("--tol", cfg.tol, "EM log-likelihood gain tolerance");
  unfold->add_option("--max-iter", cfg.max_iter, "EM iteration cap");
  unfold->add_flag("--unbias", cfg.unbias, "also write the de-biased size distribution");

  auto* validate = app.add_subcommand("validate", "oracle and invariance checks");
  add_common(validate, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : section_lab::cli::kExitInputError;
  }

  cfg.scale = scales.at(CLI::detail::to_lower(scale_name));
  cfg.observed = observed.at(CLI::detail::to_lower(observed_name));

  if (sample->parsed()) cfg.command = Command::sample;
  if (density->parsed()) cfg.command = Command::density;
  if (ecdf->parsed()) cfg.command = Command::ecdf;
  if (unfold->parsed()) cfg.command = Command::unfold;
  if (validate->parsed()) cfg.command = Command::validate;

  return section_lab::cli::run(cfg, std::cout, std::cerr);
}
