#include <doctest.h>

#include "abw/config.hpp"
#include "abw/report.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

using namespace abw;

TEST_CASE("a minimal config parses with defaults") {
  const auto cfg = parse_config_text(
      R"({"system": {"kind": "A", "rank": 1, "q": [2.0]},
          "walk": {"steps": [{"mu": [1], "a": 1.0}]}})");
  CHECK(cfg.kind == "A");
  CHECK(cfg.rank == 1);
  CHECK(cfg.flavor == Flavor::building);
  CHECK(cfg.grid_n == 128);
  CHECK(cfg.n_list == std::vector<int64_t>{40, 80, 160});
  CHECK(cfg.epsilon == 0.05);
  CHECK(cfg.K == 1.0);
}

TEST_CASE("emit and parse round-trip exactly") {
  RunConfig building;
  building.kind = "A";
  building.rank = 2;
  building.q = {2.0, 2.0};
  building.flavor = Flavor::building;
  building.steps = {{{1, 0}, 0.5}, {{0, 1}, 0.5}};
  building.grid_n = 64;
  building.n_list = {3, 4};
  building.epsilon = 0.1;
  building.K = 2.0;
  CHECK(parse_config_text(emit_config(building)) == building);

  RunConfig lattice;
  lattice.kind = "Z";
  lattice.rank = 2;
  lattice.flavor = Flavor::lattice;
  lattice.steps = {{{1, 0}, 0.25}, {{-1, 0}, 0.25}, {{0, 1}, 0.25},
                   {{0, -1}, 0.25}};
  CHECK(parse_config_text(emit_config(lattice)) == lattice);
}

TEST_CASE("schema violations name the offending field") {
  CHECK_THROWS_WITH_AS(
      parse_config_text(
          R"({"system": {"kind": "Z", "rank": 1},
              "walk": {"steps": [{"mu": [1], "a": 0.5}, {"mu": [-1], "a": 0.4}]}})"),
      doctest::Contains("walk.steps probabilities must sum to 1"),
      std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      parse_config_text(
          R"({"system": {"kind": "Z", "rank": 2},
              "walk": {"steps": [{"mu": [1], "a": 1.0}]}})"),
      doctest::Contains("mu needs system.rank coordinates"),
      std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      parse_config_text(
          R"({"system": {"kind": "Z", "rank": 1}, "typo": 1,
              "walk": {"steps": [{"mu": [1], "a": 1.0}]}})"),
      doctest::Contains("unknown key \"typo\""), std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      parse_config_text(
          R"({"system": {"kind": "Z", "rank": 1},
              "walk": {"steps": [{"mu": [1], "a": 1.0, "w": 2}]}})"),
      doctest::Contains("unknown key \"w\""), std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      parse_config_text(
          R"({"system": {"kind": "Z", "rank": 1, "q": [2.0]},
              "walk": {"steps": [{"mu": [1], "a": 1.0}]}})"),
      doctest::Contains("system.q must be empty"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      parse_config_text(
          R"({"system": {"kind": "Z", "rank": 1}, "flavor": "building",
              "walk": {"steps": [{"mu": [1], "a": 1.0}]}})"),
      doctest::Contains("flavor does not match system.kind"),
      std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      parse_config_text(
          R"({"system": {"kind": "A", "rank": 1, "q": [2.0]},
              "walk": {"steps": [{"mu": [-1], "a": 1.0}]}})"),
      doctest::Contains("dominant"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      parse_config_text(
          R"({"system": {"kind": "A", "rank": 1, "q": [2.0]},
              "walk": {"steps": [{"mu": [1], "a": 1.0}]},
              "sweep": {"epsilon": 1.5}})"),
      doctest::Contains("sweep.epsilon"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config_text("{"), doctest::Contains("parse"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      parse_config_text(
          R"({"system": {"kind": "Q", "rank": 1, "q": [2.0]},
              "walk": {"steps": [{"mu": [1], "a": 1.0}]}})"),
      doctest::Contains("system.kind"), std::invalid_argument);
}

TEST_CASE("configured kernels build and expose the right spectra") {
  const auto tree = parse_config_text(
      R"({"system": {"kind": "A", "rank": 1, "q": [2.0]},
          "walk": {"steps": [{"mu": [1], "a": 1.0}]}})");
  const Kernel kt = kernel_from_config(tree);
  CHECK(kt.flavor == Flavor::building);
  CHECK(kt.rho ==
        doctest::Approx(2.0 * std::sqrt(2.0) / 3.0).epsilon(1e-12));

  const auto lazy = parse_config_text(
      R"({"system": {"kind": "Z", "rank": 1},
          "walk": {"steps": [{"mu": [0], "a": 0.5},
                             {"mu": [1], "a": 0.25},
                             {"mu": [-1], "a": 0.25}]}})");
  const Kernel kl = kernel_from_config(lazy);
  CHECK(kl.flavor == Flavor::lattice);
  CHECK(kl.rho == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(kl.support.size() == 3);
}

TEST_CASE("csv tables are deterministic with the pinned headers") {
  ReportRow row;
  row.step_n = 100;
  row.omega = {3, -4};
  row.exact = 1.0 / 3.0;
  row.estimate = 0.25;
  row.ratio = row.exact / row.estimate;
  row.regime = "llt";
  // dist_boundary, det_nb, phi stay NaN on purpose

  std::ostringstream a, b;
  write_comparison_csv(a, {row});
  write_comparison_csv(b, {row});
  CHECK(a.str() == b.str());
  CHECK(a.str().substr(0, a.str().find('\n')) ==
        "step_n,omega_coords,exact,estimate,ratio,regime,dist_boundary,"
        "det_nB,phi");
  CHECK(a.str().find("3;-4") != std::string::npos);
  CHECK(a.str().find("nan") != std::string::npos);

  // 17 significant digits round-trip the double exactly
  CHECK(std::strtod(format_g17(1.0 / 3.0).c_str(), nullptr) == 1.0 / 3.0);
  CHECK(format_g17(std::nan("")) == "nan");

  std::ostringstream g;
  write_green_csv(g, {GreenRow{{5}, 0.5, 1.25, 1.0, 1.25, "subcritical", 17,
                               1e-12, true}});
  CHECK(g.str().substr(0, g.str().find('\n')) ==
        "omega_coords,zeta,series,estimate,ratio,regime,terms,tail_bound,"
        "certified");
  CHECK(g.str().find(",subcritical,17,") != std::string::npos);

  std::ostringstream r;
  write_rate_csv(r, {RateRow{{0.25, 0.5}, 0.125, {0.1, 0.2}, 2.0, 0.05}});
  CHECK(r.str().substr(0, r.str().find('\n')) ==
        "delta_coords,phi,s_coords,det_B,dist_boundary");
  CHECK(r.str().find("0.25;0.5") != std::string::npos);
}
