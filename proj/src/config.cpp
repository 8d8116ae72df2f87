#include "abw/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace abw {

namespace {

using nlohmann::json;

void require_keys(const json& j, const std::string& where,
                  std::initializer_list<const char*> allowed) {
  if (!j.is_object())
    throw std::invalid_argument("config: " + where + " must be an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || item.key() == a;
    if (!known)
      throw std::invalid_argument("config: unknown key \"" + item.key() +
                                  "\" in " + where);
  }
}

template <class T>
T field_as(const json& j, const std::string& name) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument("config: " + name + " has the wrong type");
  }
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: JSON parse error: ") +
                                e.what());
  }
  require_keys(j, "the top level",
               {"system", "flavor", "walk", "grid", "sweep"});
  if (!j.contains("system") || !j.contains("walk"))
    throw std::invalid_argument(
        "config: the top level needs \"system\" and \"walk\"");

  RunConfig cfg;

  const json& sys = j.at("system");
  require_keys(sys, "system", {"kind", "rank", "q"});
  if (!sys.contains("kind") || !sys.contains("rank"))
    throw std::invalid_argument("config: system needs \"kind\" and \"rank\"");
  cfg.kind = field_as<std::string>(sys.at("kind"), "system.kind");
  const bool lattice = cfg.kind == "Z";
  if (!lattice) {
    try {
      root_kind_from_string(cfg.kind);
    } catch (const std::exception&) {
      throw std::invalid_argument(
          "config: system.kind must be a root-system letter or \"Z\"");
    }
  }
  cfg.rank = field_as<int>(sys.at("rank"), "system.rank");
  if (cfg.rank < 1 || cfg.rank > kMaxRank)
    throw std::invalid_argument("config: system.rank must be between 1 and " +
                                std::to_string(kMaxRank));
  if (sys.contains("q"))
    cfg.q = field_as<std::vector<double>>(sys.at("q"), "system.q");
  if (lattice) {
    if (!cfg.q.empty())
      throw std::invalid_argument(
          "config: system.q must be empty for the integer lattice");
  } else {
    if (int(cfg.q.size()) != cfg.rank)
      throw std::invalid_argument(
          "config: system.q needs one entry per simple root");
    for (double qv : cfg.q)
      if (!(qv > 0))
        throw std::invalid_argument(
            "config: system.q entries must be positive");
  }

  cfg.flavor = lattice ? Flavor::lattice : Flavor::building;
  if (j.contains("flavor")) {
    const std::string fl = field_as<std::string>(j.at("flavor"), "flavor");
    if (fl != "building" && fl != "lattice")
      throw std::invalid_argument(
          "config: flavor must be \"building\" or \"lattice\"");
    if ((fl == "lattice") != lattice)
      throw std::invalid_argument(
          "config: flavor does not match system.kind (\"Z\" is lattice-only "
          "and root-system kinds are building-only)");
  }

  const json& walk = j.at("walk");
  require_keys(walk, "walk", {"steps"});
  if (!walk.contains("steps") || !walk.at("steps").is_array() ||
      walk.at("steps").empty())
    throw std::invalid_argument(
        "config: walk.steps must be a nonempty array");
  double mass = 0;
  for (size_t i = 0; i < walk.at("steps").size(); ++i) {
    const json& st = walk.at("steps")[i];
    const std::string where = "walk.steps[" + std::to_string(i) + "]";
    require_keys(st, where, {"mu", "a"});
    if (!st.contains("mu") || !st.contains("a"))
      throw std::invalid_argument("config: " + where +
                                  " needs \"mu\" and \"a\"");
    ConfigStep step;
    step.mu = field_as<std::vector<int>>(st.at("mu"), where + ".mu");
    if (int(step.mu.size()) != cfg.rank)
      throw std::invalid_argument("config: " + where +
                                  ".mu needs system.rank coordinates");
    if (!lattice)
      for (int v : step.mu)
        if (v < 0)
          throw std::invalid_argument(
              "config: " + where +
              ".mu must be a dominant key (nonnegative coordinates)");
    step.a = field_as<double>(st.at("a"), where + ".a");
    if (!(step.a > 0))
      throw std::invalid_argument("config: " + where + ".a must be positive");
    mass += step.a;
    cfg.steps.push_back(std::move(step));
  }
  if (std::abs(mass - 1.0) > 1e-12) {
    std::ostringstream os;
    os << "config: walk.steps probabilities must sum to 1 (got " << mass
       << ")";
    throw std::invalid_argument(os.str());
  }

  if (j.contains("grid")) {
    const json& grid = j.at("grid");
    require_keys(grid, "grid", {"N"});
    if (grid.contains("N"))
      cfg.grid_n = field_as<int>(grid.at("N"), "grid.N");
    if (cfg.grid_n < 2)
      throw std::invalid_argument("config: grid.N must be at least 2");
  }

  if (j.contains("sweep")) {
    const json& sw = j.at("sweep");
    require_keys(sw, "sweep", {"n_list", "epsilon", "K"});
    if (sw.contains("n_list")) {
      cfg.n_list =
          field_as<std::vector<int64_t>>(sw.at("n_list"), "sweep.n_list");
      if (cfg.n_list.empty())
        throw std::invalid_argument("config: sweep.n_list must be nonempty");
      for (int64_t n : cfg.n_list)
        if (n < 1)
          throw std::invalid_argument(
              "config: sweep.n_list entries must be positive");
    }
    if (sw.contains("epsilon")) {
      cfg.epsilon = field_as<double>(sw.at("epsilon"), "sweep.epsilon");
      if (!(cfg.epsilon > 0) || !(cfg.epsilon < 1))
        throw std::invalid_argument(
            "config: sweep.epsilon must lie strictly between 0 and 1");
    }
    if (sw.contains("K")) {
      cfg.K = field_as<double>(sw.at("K"), "sweep.K");
      if (!(cfg.K > 0))
        throw std::invalid_argument("config: sweep.K must be positive");
    }
  }

  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config_text(buf.str());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

std::string emit_config(const RunConfig& cfg) {
  json steps = json::array();
  for (const ConfigStep& st : cfg.steps)
    steps.push_back({{"mu", st.mu}, {"a", st.a}});
  const json j = {
      {"system", {{"kind", cfg.kind}, {"rank", cfg.rank}, {"q", cfg.q}}},
      {"flavor", cfg.flavor == Flavor::building ? "building" : "lattice"},
      {"walk", {{"steps", steps}}},
      {"grid", {{"N", cfg.grid_n}}},
      {"sweep",
       {{"n_list", cfg.n_list},
        {"epsilon", cfg.epsilon},
        {"K", cfg.K}}},
  };
  return j.dump(2) + "\n";
}

Kernel kernel_from_config(const RunConfig& cfg) {
  WalkSpec spec;
  spec.flavor = cfg.flavor;
  if (cfg.flavor == Flavor::building) {
    auto ctx = make_spherical_context(root_kind_from_string(cfg.kind),
                                      cfg.rank, cfg.q);
    spec.ctx = ctx;
    for (const ConfigStep& st : cfg.steps) {
      Vec mu = Vec::Zero(cfg.rank);
      for (int i = 0; i < cfg.rank; ++i)
        mu += double(st.mu[i]) * ctx->rs.fund_coweight.col(i);
      spec.steps.push_back({mu, st.a});
    }
  } else {
    spec.rank = cfg.rank;
    for (const ConfigStep& st : cfg.steps) {
      Vec mu(cfg.rank);
      for (int i = 0; i < cfg.rank; ++i) mu[i] = double(st.mu[i]);
      spec.steps.push_back({mu, st.a});
    }
  }
  return build_kernel(spec);
}

}  // namespace abw
