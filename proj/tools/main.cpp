#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cli.hpp"
#include "tvopt/io.hpp"

int main(int argc, char** argv) {
  namespace cli = tvopt::cli;

  CLI::App app{"Prediction-update tracking for time-varying convex costs"};
  std::string mode;
  std::string config_path;
  std::string out_dir;
  std::string preset;
  app.add_option("mode", mode, "run | compare | sweep | bench-scaling | check-bounds | mpc")->required();
  app.add_option("--config", config_path, "JSON experiment config");
  app.add_option("--out", out_dir, "output directory")->required();
  app.add_option("--preset", preset, "paper-6.1 | paper-6.2")
      ->check(CLI::IsMember({"paper-6.1", "paper-6.2"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::config_error;
  }

  try {
    if (config_path.empty() && preset.empty()) throw tvopt::ConfigError("need --config or --preset");
    const nlohmann::json config =
        config_path.empty() ? nlohmann::json::object() : tvopt::read_json_file(config_path);
    const auto spec = cli::resolve_spec(cli::parse_mode(mode), config,
                                        preset.empty() ? std::nullopt : std::optional<std::string>(preset), out_dir);
    return cli::dispatch(spec);
  } catch (const tvopt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return cli::config_error;
  } catch (const tvopt::CapabilityError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return cli::config_error;
  } catch (const tvopt::NumericError& e) {
    std::cerr << "numeric abort: " << e.what() << '\n';
    return cli::numeric_abort;
  } catch (const tvopt::NotSpdError& e) {
    std::cerr << "numeric abort: " << e.what() << '\n';
    return cli::numeric_abort;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
