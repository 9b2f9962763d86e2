#include "rodeo/config.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "rodeo/errors.hpp"

namespace rodeo {

namespace {

using nlohmann::json;

constexpr double kPi = 3.14159265358979323846;

// Accumulates schema problems so one parse reports everything at once.
struct Issues {
  std::vector<std::string> list;
  void add(const std::string& where, const std::string& what) {
    list.push_back(where + ": " + what);
  }
  bool any() const { return !list.empty(); }
};

void check_keys(const json& obj, const std::string& where,
                const std::set<std::string>& allowed, Issues& issues) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) issues.add(where, "unknown key \"" + it.key() + "\"");
}

double get_number(const json& obj, const std::string& where, const std::string& key,
                  double fallback, Issues& issues) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) {
    issues.add(where + "." + key, "expected a number");
    return fallback;
  }
  return v.get<double>();
}

long get_integer(const json& obj, const std::string& where, const std::string& key,
                 long fallback, Issues& issues) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) {
    issues.add(where + "." + key, "expected an integer");
    return fallback;
  }
  return v.get<long>();
}

std::string get_string(const json& obj, const std::string& where, const std::string& key,
                       const std::string& fallback, Issues& issues) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) {
    issues.add(where + "." + key, "expected a string");
    return fallback;
  }
  return v.get<std::string>();
}

// [re, im] pair.
std::optional<cplx> parse_complex(const json& v, const std::string& where, Issues& issues) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    issues.add(where, "expected [re, im]");
    return std::nullopt;
  }
  return cplx(v[0].get<double>(), v[1].get<double>());
}

CoefficientFn parse_coefficient(const json& v, const std::string& where, Issues& issues) {
  if (v.is_number()) return CoefficientFn::constant(v.get<double>());
  if (!v.is_object()) {
    issues.add(where, "expected a number or an object with \"type\"");
    return CoefficientFn::constant(0.0);
  }
  std::string type = get_string(v, where, "type", "", issues);
  if (type == "constant") {
    check_keys(v, where, {"type", "value"}, issues);
    return CoefficientFn::constant(get_number(v, where, "value", 0.0, issues));
  }
  if (type == "sinusoid") {
    check_keys(v, where, {"type", "amplitude", "omega", "phase", "offset"}, issues);
    return CoefficientFn::sinusoid(get_number(v, where, "amplitude", 1.0, issues),
                                   get_number(v, where, "omega", 1.0, issues),
                                   get_number(v, where, "phase", 0.0, issues),
                                   get_number(v, where, "offset", 0.0, issues));
  }
  if (type == "tanh_ramp") {
    check_keys(v, where, {"type", "amplitude", "slope"}, issues);
    return CoefficientFn::tanh_ramp(get_number(v, where, "amplitude", 1.0, issues),
                                    get_number(v, where, "slope", 1.0, issues));
  }
  if (type == "polynomial") {
    check_keys(v, where, {"type", "coeffs"}, issues);
    std::vector<double> coeffs;
    if (!v.contains("coeffs") || !v.at("coeffs").is_array()) {
      issues.add(where + ".coeffs", "expected an array of numbers");
    } else {
      for (const auto& c : v.at("coeffs")) {
        if (!c.is_number()) {
          issues.add(where + ".coeffs", "expected an array of numbers");
          break;
        }
        coeffs.push_back(c.get<double>());
      }
    }
    if (coeffs.empty()) coeffs.push_back(0.0);
    return CoefficientFn::polynomial(std::move(coeffs));
  }
  if (type == "piecewise_linear") {
    check_keys(v, where, {"type", "points"}, issues);
    std::vector<std::pair<double, double>> pts;
    if (!v.contains("points") || !v.at("points").is_array()) {
      issues.add(where + ".points", "expected an array of [t, value] pairs");
    } else {
      for (const auto& p : v.at("points")) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
          issues.add(where + ".points", "expected an array of [t, value] pairs");
          break;
        }
        pts.emplace_back(p[0].get<double>(), p[1].get<double>());
      }
    }
    if (pts.empty()) pts.emplace_back(0.0, 0.0);
    try {
      return CoefficientFn::piecewise_linear(std::move(pts));
    } catch (const std::exception& e) {
      issues.add(where + ".points", e.what());
      return CoefficientFn::constant(0.0);
    }
  }
  issues.add(where + ".type",
             "expected constant, sinusoid, tanh_ramp, polynomial or piecewise_linear");
  return CoefficientFn::constant(0.0);
}

std::optional<CMatrix> parse_matrix(const json& v, const std::string& where, int dim,
                                    Issues& issues) {
  if (v.is_string()) {
    const std::string name = v.get<std::string>();
    if (name == "sigma_x") return sigma_x();
    if (name == "sigma_y") return sigma_y();
    if (name == "sigma_z") return sigma_z();
    if (name == "sigma_plus") return sigma_plus();
    if (name == "sigma_minus") return sigma_minus();
    issues.add(where, "unknown operator \"" + name + "\"");
    return std::nullopt;
  }
  if (!v.is_array() || v.empty()) {
    issues.add(where, "expected an operator name or a matrix of [re, im] entries");
    return std::nullopt;
  }
  const int n = static_cast<int>(v.size());
  CMatrix m;
  m.resize(n);
  for (int r = 0; r < n; ++r) {
    const json& row = v[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      issues.add(where, "matrix must be square");
      return std::nullopt;
    }
    for (int c = 0; c < n; ++c) {
      auto e = parse_complex(row[static_cast<std::size_t>(c)],
                             where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]",
                             issues);
      if (!e) return std::nullopt;
      m(r, c) = *e;
    }
  }
  if (dim > 0 && n != dim) {
    issues.add(where, "matrix is " + std::to_string(n) + "x" + std::to_string(n) +
                          " but the model dimension is " + std::to_string(dim));
    return std::nullopt;
  }
  return m;
}

std::optional<CVector> parse_state(const json& v, const std::string& where, int dim,
                                   Issues& issues) {
  if (v.is_string()) {
    const std::string name = v.get<std::string>();
    try {
      CVector s = named_state(name);
      if (dim > 0 && static_cast<int>(s.size()) != dim) {
        issues.add(where, "named states are two-dimensional");
        return std::nullopt;
      }
      return s;
    } catch (const std::exception& e) {
      issues.add(where, e.what());
      return std::nullopt;
    }
  }
  if (!v.is_array() || v.empty()) {
    issues.add(where, "expected a state name or an array of [re, im] amplitudes");
    return std::nullopt;
  }
  CVector s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    auto e = parse_complex(v[i], where + "[" + std::to_string(i) + "]", issues);
    if (!e) return std::nullopt;
    s.push_back(*e);
  }
  if (dim > 0 && static_cast<int>(s.size()) != dim) {
    issues.add(where, "state has " + std::to_string(s.size()) +
                          " amplitudes but the model dimension is " + std::to_string(dim));
    return std::nullopt;
  }
  double n = vec_norm(s);
  if (std::abs(n - 1.0) > 1e-6) {
    issues.add(where, "state norm " + std::to_string(n) + " is not 1");
    return std::nullopt;
  }
  for (auto& a : s) a /= n;
  return s;
}

std::optional<MasterEquation> parse_model(const json& v, const std::string& where,
                                          std::string& preset_name, Issues& issues) {
  if (!v.is_object()) {
    issues.add(where, "expected an object");
    return std::nullopt;
  }
  if (v.contains("preset")) {
    check_keys(v, where, {"preset"}, issues);
    std::string name = get_string(v, where, "preset", "", issues);
    try {
      MasterEquation me = make_preset(name);
      preset_name = name;
      return me;
    } catch (const std::exception& e) {
      issues.add(where + ".preset", e.what());
      return std::nullopt;
    }
  }
  check_keys(v, where, {"dim", "hamiltonian", "channels"}, issues);
  long dim = get_integer(v, where, "dim", 2, issues);
  if (dim < 2) {
    issues.add(where + ".dim", "must be at least 2");
    return std::nullopt;
  }
  std::vector<HamiltonianTerm> terms;
  if (v.contains("hamiltonian")) {
    const json& h = v.at("hamiltonian");
    if (!h.is_array()) {
      issues.add(where + ".hamiltonian", "expected an array of terms");
    } else {
      for (std::size_t i = 0; i < h.size(); ++i) {
        const std::string tw = where + ".hamiltonian[" + std::to_string(i) + "]";
        if (!h[i].is_object()) {
          issues.add(tw, "expected {coefficient, operator}");
          continue;
        }
        check_keys(h[i], tw, {"coefficient", "operator"}, issues);
        CoefficientFn c = h[i].contains("coefficient")
                              ? parse_coefficient(h[i].at("coefficient"), tw + ".coefficient",
                                                  issues)
                              : CoefficientFn::constant(1.0);
        if (!h[i].contains("operator")) {
          issues.add(tw, "missing \"operator\"");
          continue;
        }
        auto m = parse_matrix(h[i].at("operator"), tw + ".operator",
                              static_cast<int>(dim), issues);
        if (m) terms.push_back({std::move(c), std::move(*m)});
      }
    }
  }
  std::vector<std::pair<CoefficientFn, CMatrix>> channels;
  if (v.contains("channels")) {
    const json& ch = v.at("channels");
    if (!ch.is_array()) {
      issues.add(where + ".channels", "expected an array of channels");
    } else {
      for (std::size_t i = 0; i < ch.size(); ++i) {
        const std::string cw = where + ".channels[" + std::to_string(i) + "]";
        if (!ch[i].is_object()) {
          issues.add(cw, "expected {rate, operator}");
          continue;
        }
        check_keys(ch[i], cw, {"rate", "operator"}, issues);
        CoefficientFn r = ch[i].contains("rate")
                              ? parse_coefficient(ch[i].at("rate"), cw + ".rate", issues)
                              : CoefficientFn::constant(1.0);
        if (!ch[i].contains("operator")) {
          issues.add(cw, "missing \"operator\"");
          continue;
        }
        auto m = parse_matrix(ch[i].at("operator"), cw + ".operator",
                              static_cast<int>(dim), issues);
        if (m) channels.emplace_back(std::move(r), std::move(*m));
      }
    }
  }
  if (issues.any()) return std::nullopt;
  try {
    return MasterEquation(static_cast<int>(dim), std::move(terms), std::move(channels));
  } catch (const std::exception& e) {
    issues.add(where, e.what());
    return std::nullopt;
  }
}

std::optional<TransformationStrategy> parse_strategy(const json& v, const std::string& where,
                                                     int dim, std::string& name,
                                                     Issues& issues) {
  if (!v.is_object()) {
    issues.add(where, "expected an object with \"type\"");
    return std::nullopt;
  }
  std::string type = get_string(v, where, "type", "", issues);
  name = type;
  if (type == "zero") {
    check_keys(v, where, {"type"}, issues);
    return TransformationStrategy::zero();
  }
  if (type == "state_scaled") {
    check_keys(v, where, {"type", "scale"}, issues);
    cplx scale(1.0, 0.0);
    if (v.contains("scale")) {
      auto s = parse_complex(v.at("scale"), where + ".scale", issues);
      if (s) scale = *s;
    }
    return TransformationStrategy::state_scaled(scale);
  }
  if (type == "target_basis") {
    check_keys(v, where, {"type", "e0", "e1"}, issues);
    if (dim != 2) {
      issues.add(where, "target_basis requires a two-dimensional model");
      return std::nullopt;
    }
    CVector e0 = {cplx(1.0), cplx(0.0)};
    CVector e1 = {cplx(0.0), cplx(1.0)};
    if (v.contains("e0")) {
      auto s = parse_state(v.at("e0"), where + ".e0", dim, issues);
      if (s) e0 = *s;
    }
    if (v.contains("e1")) {
      auto s = parse_state(v.at("e1"), where + ".e1", dim, issues);
      if (s) e1 = *s;
    }
    try {
      return TransformationStrategy::target_basis(std::move(e0), std::move(e1));
    } catch (const std::exception& e) {
      issues.add(where, e.what());
      return std::nullopt;
    }
  }
  issues.add(where + ".type", "expected zero, state_scaled or target_basis");
  return std::nullopt;
}

}  // namespace

MasterEquation make_preset(const std::string& name) {
  auto pauli = [](CoefficientFn gx, CoefficientFn gy, CoefficientFn gz,
                  std::vector<HamiltonianTerm> h) {
    std::vector<std::pair<CoefficientFn, CMatrix>> ch;
    ch.emplace_back(std::move(gx), sigma_x());
    ch.emplace_back(std::move(gy), sigma_y());
    ch.emplace_back(std::move(gz), sigma_z());
    return MasterEquation(2, std::move(h), std::move(ch));
  };
  if (name == "pauli_isotropic") {
    std::vector<HamiltonianTerm> h;
    h.push_back({CoefficientFn::constant(1.0), sigma_z()});
    return pauli(CoefficientFn::constant(1.0), CoefficientFn::constant(1.0),
                 CoefficientFn::constant(1.0), std::move(h));
  }
  if (name == "dephasing") {
    std::vector<std::pair<CoefficientFn, CMatrix>> ch;
    ch.emplace_back(CoefficientFn::constant(1.0), sigma_z());
    return MasterEquation(2, {}, std::move(ch));
  }
  if (name == "pauli_nonPdiv_demo") {
    std::vector<HamiltonianTerm> h;
    h.push_back({CoefficientFn::sinusoid(0.5, 1.0, 0.0, 1.0), sigma_z()});
    return pauli(CoefficientFn::constant(0.1), CoefficientFn::constant(0.1),
                 CoefficientFn::sinusoid(0.5, 2.0, kPi / 2.0, 0.0), std::move(h));
  }
  if (name == "unphysical_dephasing") {
    std::vector<std::pair<CoefficientFn, CMatrix>> ch;
    ch.emplace_back(CoefficientFn::constant(-0.5), sigma_z());
    return MasterEquation(2, {}, std::move(ch));
  }
  throw Error("unknown preset \"" + name +
              "\"; available: pauli_isotropic, dephasing, pauli_nonPdiv_demo, "
              "unphysical_dephasing");
}

CVector named_state(const std::string& name) {
  const double s = 1.0 / std::sqrt(2.0);
  if (name == "plus") return {cplx(s), cplx(s)};
  if (name == "minus") return {cplx(s), cplx(-s)};
  if (name == "zero") return {cplx(1.0), cplx(0.0)};
  if (name == "one") return {cplx(0.0), cplx(1.0)};
  if (name == "plus_i") return {cplx(s), cplx(0.0, s)};
  if (name == "minus_i") return {cplx(s), cplx(0.0, -s)};
  throw Error("unknown state \"" + name +
              "\"; available: plus, minus, zero, one, plus_i, minus_i");
}

RunConfig parse_config(const nlohmann::json& j) {
  Issues issues;
  if (!j.is_object()) throw SchemaError({"config: expected a JSON object"});
  check_keys(j, "config",
             {"mode", "model", "initial_state", "strategy", "dt", "t_max", "n_traj",
              "seed", "max_event_prob", "threads", "out_dir", "compare"},
             issues);

  std::string mode = get_string(j, "config", "mode", "", issues);
  if (mode != "exact" && mode != "jump" && mode != "nmqj" && mode != "witness" &&
      mode != "compare")
    issues.add("config.mode", "expected exact, jump, nmqj, witness or compare");

  std::string preset_name;
  std::optional<MasterEquation> model;
  if (!j.contains("model"))
    issues.add("config", "missing \"model\"");
  else
    model = parse_model(j.at("model"), "config.model", preset_name, issues);
  const int dim = model ? model->dim() : 0;

  std::optional<CVector> psi0;
  if (j.contains("initial_state"))
    psi0 = parse_state(j.at("initial_state"), "config.initial_state", dim, issues);
  else if (dim == 2)
    psi0 = named_state("plus");
  else if (dim > 2)
    issues.add("config", "missing \"initial_state\" (required when dim > 2)");

  std::optional<TransformationStrategy> strategy;
  std::string strategy_name = "zero";
  if (j.contains("strategy"))
    strategy = parse_strategy(j.at("strategy"), "config.strategy", dim, strategy_name, issues);
  else
    strategy = TransformationStrategy::zero();

  double dt = get_number(j, "config", "dt", 1e-3, issues);
  if (!(dt > 0.0)) issues.add("config.dt", "must be positive");
  double t_max = get_number(j, "config", "t_max", 1.0, issues);
  if (!(t_max > 0.0)) issues.add("config.t_max", "must be positive");
  long n_traj = get_integer(j, "config", "n_traj", 1000, issues);
  if (n_traj < 2) issues.add("config.n_traj", "must be at least 2");
  long seed = get_integer(j, "config", "seed", 0, issues);
  if (seed < 0) issues.add("config.seed", "must be non-negative");
  double mep = get_number(j, "config", "max_event_prob", 0.1, issues);
  if (!(mep > 0.0) || mep >= 1.0) issues.add("config.max_event_prob", "must be in (0, 1)");
  long threads = get_integer(j, "config", "threads", 1, issues);
  if (threads < 1) issues.add("config.threads", "must be at least 1");
  std::string out_dir = get_string(j, "config", "out_dir", "out", issues);

  std::string compare_engine = "jump";
  double z_tol = 5.0, abs_floor = 0.02;
  if (j.contains("compare")) {
    const json& c = j.at("compare");
    if (!c.is_object()) {
      issues.add("config.compare", "expected an object");
    } else {
      check_keys(c, "config.compare", {"engine", "z_tol", "abs_floor"}, issues);
      compare_engine = get_string(c, "config.compare", "engine", "jump", issues);
      if (compare_engine != "jump" && compare_engine != "nmqj")
        issues.add("config.compare.engine", "expected jump or nmqj");
      z_tol = get_number(c, "config.compare", "z_tol", 5.0, issues);
      if (!(z_tol > 0.0)) issues.add("config.compare.z_tol", "must be positive");
      abs_floor = get_number(c, "config.compare", "abs_floor", 0.02, issues);
      if (abs_floor < 0.0) issues.add("config.compare.abs_floor", "must be non-negative");
    }
  }

  if (issues.any() || !model || !psi0 || !strategy) {
    if (!issues.any()) issues.add("config", "invalid configuration");
    throw SchemaError(std::move(issues.list));
  }

  RunConfig cfg{std::move(mode),
                std::move(*model),
                std::move(preset_name),
                std::move(*psi0),
                std::move(*strategy),
                std::move(strategy_name),
                dt,
                t_max,
                n_traj,
                static_cast<std::uint64_t>(seed),
                mep,
                static_cast<int>(threads),
                std::move(out_dir),
                std::move(compare_engine),
                z_tol,
                abs_floor};
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError({"cannot open config file \"" + path + "\""});
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw SchemaError({std::string("config file is not valid JSON: ") + e.what()});
  }
  return parse_config(j);
}

}  // namespace rodeo
