#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace section_lab::cli {

enum class Command { sample, density, ecdf, unfold, validate };
enum class Scale { root, volume, both };
enum class Observed { areas, roots };

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidationFailed = 2;
inline constexpr int kExitInputError = 3;

struct RunConfig {
  Command command = Command::sample;
  std::string shape = "cube";
  std::uint64_t n = 1000000;
  std::uint64_t seed = 1;
  std::string output;
  std::size_t grid_points = 512;
  std::optional<double> bandwidth;
  Scale scale = Scale::root;
  int workers = 1;
  bool normalize_volume = false;

  // unfold
  std::string observations;
  Observed observed = Observed::areas;
  std::uint64_t reference_n = 1000000;
  double tol = 1e-8;
  std::size_t max_iter = 5000;
  bool unbias = false;
};

std::string_view to_string(Command c);
std::string_view to_string(Scale s);

/// Rejects configs that break the RunConfig invariants (n >= 1,
/// grid_points >= 16, positive bandwidth override, ...). Throws InputError.
void validate_config(const RunConfig& config);

nlohmann::json to_json(const RunConfig& config);

/// Output path used when none is given: "<command>.csv".
std::string default_output(Command c);

/// Executes one command. Human-readable progress and results go to `out`;
/// errors are written to `err` as {"error": <kind>, "message": ...}.
/// Returns the process exit status.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace section_lab::cli
