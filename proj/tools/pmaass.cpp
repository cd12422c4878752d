// Command-line front end: group tables, coefficient runs, meromorphy
// certificates, and the built-in verification suites.

#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "pmaass/arith.hpp"
#include "pmaass/errors.hpp"

namespace {

int cmd_group(long level, bool as_json) {
  pmaass::GroupData G = pmaass::group_data(level);
  if (as_json) {
    std::printf("{\"N\": %ld, \"index\": %ld, \"genus\": %ld,\n", G.level,
                G.index, G.genus);
    std::printf(" \"c_constant\": %.17g, \"nu2\": %ld, \"nu3\": %ld,\n",
                G.c_constant.value(), G.nu2, G.nu3);
    std::printf(" \"dim_weight2_cusp\": %ld,\n", G.dim_weight2_cusp);
    std::printf(" \"cusps\": [");
    for (size_t i = 0; i < G.cusps.size(); ++i) {
      const pmaass::Cusp& c = G.cusps[i];
      std::printf("%s{\"label\": \"%s\", \"width\": %ld}", i ? ", " : "",
                  c.label().c_str(), c.width);
    }
    std::printf("]}\n");
    return 0;
  }
  std::printf("Gamma0(%ld): index %ld, genus %ld, nu2 %ld, nu3 %ld\n", G.level,
              G.index, G.genus, G.nu2, G.nu3);
  std::printf("c_N = %ld/%ld, dim S_2 = %ld\n", G.c_constant.num, G.c_constant.den,
              G.dim_weight2_cusp);
  std::printf("%-10s %-8s %s\n", "cusp", "width", "scaling");
  for (const pmaass::Cusp& c : G.cusps)
    std::printf("%-10s %-8ld [[%ld, %ld], [%ld, %ld]]\n", c.label().c_str(),
                c.width, c.scaling[0], c.scaling[1], c.scaling[2],
                c.scaling[3]);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polar harmonic Maass forms on Gamma0(N)"};
  app.require_subcommand(1);

  long level = 1;
  bool as_json = false;
  CLI::App* group = app.add_subcommand("group", "Describe Gamma0(N)");
  group->add_option("--N,--level", level, "Level N")->required();
  group->add_flag("--json", as_json, "Emit JSON instead of a table");

  CLI::App* coeffs =
      app.add_subcommand("coeffs", "Fourier coefficients of a form");
  CLI::App* certify =
      app.add_subcommand("certify", "Meromorphy certificate for a spec");
  CLI::App* verify = app.add_subcommand("verify", "Run an invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (group->parsed()) return cmd_group(level, as_json);
    if (coeffs->parsed() || certify->parsed() || verify->parsed()) {
      std::fprintf(stderr, "subcommand not wired up yet\n");
      return 2;
    }
  } catch (const pmaass::invalid_input& e) {
    std::fprintf(stderr, "error (%s): %s\n", e.kind().c_str(), e.what());
    return 2;
  } catch (const pmaass::numeric_guard& e) {
    std::fprintf(stderr, "numeric guard (%s): %s\n", e.kind().c_str(), e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
