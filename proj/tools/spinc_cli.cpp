#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "spinc/cli_run.hpp"

namespace {

using nlohmann::json;

struct FlagSpec {
  const char* name;
  const char* help;
};

const std::map<std::string, std::vector<FlagSpec>>& flag_table() {
  static const std::map<std::string, std::vector<FlagSpec>> table = {
      {"verify-algebra",
       {{"n", "complex dimension of the boundary plus one"}, {"cutoff", "oscillator degree cutoff"},
        {"guard", "guard band below the cutoff"}}},
      {"verify-symbols", {{"n", "dimension"}, {"samples", "random covectors"}, {"contour-samples", "contour instances"}}},
      {"model-invert",
       {{"n", "dimension"}, {"alpha", "Heisenberg scale"}, {"beta", "Heisenberg shift (defaults to n-1)"},
        {"cutoff", "oscillator degree cutoff"}, {"guard", "guard band"}, {"theta", "vacuum deformation parameter"},
        {"tol", "residual tolerance"}, {"samples", "random right-hand sides"}, {"chirality", "even, odd or both"},
        {"target", "deformation target levels as a JSON array"}}},
      {"relindex",
       {{"pairs", "random projector pairs"}, {"max-dim", "largest dimension"}, {"triples", "triples for the chain rule"},
        {"p", "projector P as JSON"}, {"r", "projector R as JSON"}}},
      {"toeplitz", {{"window", "Fourier window"}, {"k", "winding number"}, {"ks", "JSON array of winding numbers"}}},
      {"topo",
       {{"x0", "descriptor of X0 as JSON"}, {"x1", "descriptor of X1 as JSON"}, {"spinc", "characteristic numbers as JSON"},
        {"ind_glued", "index on the glued manifold"}, {"cdeg", "correction term"}}},
  };
  return table;
}

// Flag values are JSON literals when they parse as such, plain strings otherwise.
json flag_value(const std::string& text) {
  json v = json::parse(text, nullptr, false);
  return v.is_discarded() ? json(text) : v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spinc: Fock-space model operators, symbol calculus and relative indices"};
  app.require_subcommand(1);
  std::uint64_t seed = 0;
  std::string format = "json";
  bool timing = false;
  app.add_option("--seed", seed, "64-bit seed")->capture_default_str();
  app.add_option("--format", format, "json or text")->check(CLI::IsMember({"json", "text"}))->capture_default_str();
  app.add_flag("--timing", timing, "include wall-clock time in the report");

  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, std::string> inputs;
  for (const auto& name : spinc::subcommands()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--input", inputs[name], "JSON file with the parameters");
    for (const auto& flag : flag_table().at(name))
      sub->add_option(std::string("--") + flag.name, values[name][flag.name], flag.help);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : spinc::kExitUsage;
  }

  spinc::RunRequest request;
  request.subcommand = app.get_subcommands().front()->get_name();
  request.seed = seed;
  request.format = format;
  request.timing = timing;
  request.params = json::object();

  const std::string& input = inputs[request.subcommand];
  if (!input.empty()) {
    std::ifstream in(input);
    if (!in) {
      std::cerr << "cannot open " << input << "\n";
      return spinc::kExitUsage;
    }
    request.params = json::parse(in, nullptr, false);
    if (request.params.is_discarded()) {
      std::cerr << "malformed JSON in " << input << "\n";
      return spinc::kExitUsage;
    }
  }
  CLI::App* sub = app.get_subcommand(request.subcommand);
  for (const auto& [key, text] : values[request.subcommand])
    if (sub->count(std::string("--") + key) > 0) request.params[key] = flag_value(text);

  const spinc::Report report = spinc::run(request);
  std::cout << spinc::render(report);
  if (!report.error.empty() && report.exit_code == spinc::kExitUsage) std::cerr << report.error << "\n";
  return report.exit_code;
}
