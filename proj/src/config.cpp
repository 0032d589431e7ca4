#include "ehrelay/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace ehrelay {

namespace {

template <class T>
T required(const Json& j, const char* key) {
  if (!j.contains(key)) throw InvalidParams(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw InvalidParams(std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace

SystemParams params_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidParams("config must be a JSON object");
  SystemParams p;
  p.p_det_s = required<double>(j, "p_det_s");
  p.p_det_r = required<double>(j, "p_det_r");
  p.k_cost = required<int>(j, "k_cost");
  p.n_cap = required<int>(j, "n_cap");
  const Json& e = j.contains("energy") ? j.at("energy") : throw InvalidParams("missing field 'energy'");
  if (e.contains("uniform")) {
    p.energy = EnergyDistribution::uniform(required<int>(e, "uniform"));
  } else if (e.contains("probs")) {
    p.energy = EnergyDistribution(required<std::vector<double>>(e, "probs"));
  } else {
    throw InvalidParams("energy needs 'uniform' or 'probs'");
  }
  validate(p);
  return p;
}

Policy policy_from_json(const Json& j, const SystemParams& params) {
  Policy policy;
  if (j.contains("static")) {
    policy = Policy::static_alpha(required<double>(j, "static"));
  } else if (j.contains("threshold")) {
    const Json& t = j.at("threshold");
    policy = Policy::threshold(required<int>(t, "e_th"), required<double>(t, "beta"));
  } else if (j.contains("tabular")) {
    const Json& entries = j.at("tabular");
    if (!entries.is_array()) throw InvalidParams("tabular policy must be a list of {q_d, q_e, alpha}");
    TabularPolicy tab;
    for (const Json& e : entries) tab.max_qd = std::max(tab.max_qd, required<int>(e, "q_d"));
    tab.alpha.assign(static_cast<std::size_t>(tab.max_qd) + 1,
                     std::vector<double>(static_cast<std::size_t>(params.phases()), 0.0));
    for (const Json& e : entries) {
      const int qd = required<int>(e, "q_d");
      const int qe = required<int>(e, "q_e");
      if (qd < 0 || qe < 0 || qe > params.n_cap) throw InvalidParams("tabular state out of range");
      tab.alpha[static_cast<std::size_t>(qd)][static_cast<std::size_t>(qe)] = required<double>(e, "alpha");
    }
    policy = Policy(std::move(tab));
  } else {
    throw InvalidParams("policy needs 'static', 'threshold' or 'tabular'");
  }
  validate(policy, params);
  return policy;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  auto number = [&](const std::string& s) {
    std::istringstream in(s);
    in.imbue(std::locale::classic());
    double v = 0.0;
    if (!(in >> v) || !(in >> std::ws).eof()) throw InvalidParams("bad grid value '" + s + "'");
    return v;
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.size() != 3) throw InvalidParams("grid range must be start:step:stop");
    const double start = number(parts[0]), step = number(parts[1]), stop = number(parts[2]);
    if (!(step > 0.0) || stop < start) throw InvalidParams("grid range needs step > 0 and stop >= start");
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long i = 0; i <= count; ++i) out.push_back(start + static_cast<double>(i) * step);
  } else {
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ',');) out.push_back(number(part));
  }
  if (out.empty()) throw InvalidParams("grid is empty");
  return out;
}

ExperimentConfig config_from_json(const Json& j) {
  ExperimentConfig c;
  c.params = params_from_json(j);
  if (j.contains("policy")) c.policy = policy_from_json(j.at("policy"), c.params);
  if (j.contains("alpha_grid")) {
    const Json& g = j.at("alpha_grid");
    c.alpha_grid = g.is_string() ? parse_grid(g.get<std::string>()) : required<std::vector<double>>(j, "alpha_grid");
    if (c.alpha_grid.empty()) throw InvalidParams("alpha_grid is empty");
  }
  if (j.contains("sim")) {
    const Json& s = j.at("sim");
    c.sim.slots = s.value("slots", c.sim.slots);
    c.sim.warmup = s.value("warmup", c.sim.warmup);
    c.sim.seed = s.value("seed", c.sim.seed);
    c.sim.replications = s.value("replications", c.sim.replications);
    c.sim.batches = s.value("batches", c.sim.batches);
    validate(c.sim);
  }
  c.eps = j.value("eps", c.eps);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParams("cannot open config '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw InvalidParams("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

Json to_json(const SystemParams& params) {
  return Json{{"p_det_s", params.p_det_s},
              {"p_det_r", params.p_det_r},
              {"k_cost", params.k_cost},
              {"n_cap", params.n_cap},
              {"energy", {{"probs", params.energy.probs()}}}};
}

Json to_json(const Policy& policy) {
  if (policy.is_static()) return Json{{"static", policy.as_static().alpha}};
  if (policy.is_threshold()) {
    const auto& t = policy.as_threshold();
    return Json{{"threshold", {{"e_th", t.e_th}, {"beta", t.beta}}}};
  }
  Json entries = Json::array();
  const auto& tab = policy.as_tabular();
  for (std::size_t qd = 0; qd < tab.alpha.size(); ++qd) {
    for (std::size_t qe = 0; qe < tab.alpha[qd].size(); ++qe) {
      if (tab.alpha[qd][qe] != 0.0) entries.push_back({{"q_d", qd}, {"q_e", qe}, {"alpha", tab.alpha[qd][qe]}});
    }
  }
  return Json{{"tabular", entries}};
}

Json to_json(const OptimizationResult& result, bool include_trace) {
  Json j{{"policy", to_json(result.best_policy)},
         {"objective", result.objective},
         {"cooperation", result.cooperation},
         {"evaluations", result.evaluations}};
  Json trace = Json::array();
  if (include_trace) {
    for (const auto& t : result.search_trace) {
      trace.push_back({{"candidate", to_json(t.candidate)},
                       {"objective", std::isfinite(t.objective) ? Json(t.objective) : Json(nullptr)}});
    }
  }
  j["trace"] = trace;
  return j;
}

Json to_json(const SimStats& s) {
  return Json{{"throughput", s.throughput},
              {"throughput_se", s.throughput_se},
              {"mean_delay", s.mean_delay},
              {"mean_delay_se", s.mean_delay_se},
              {"mean_delay_half_slot", s.mean_delay_half_slot},
              {"mean_delay_half_slot_se", s.mean_delay_half_slot_se},
              {"p_active", s.p_active},
              {"p_block", s.p_block},
              {"mean_qd", s.mean_qd},
              {"mean_qd_se", s.mean_qd_se},
              {"alpha_bar_emp", s.alpha_bar_emp},
              {"delivered", s.delivered}};
}

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return fmt::format("{:.12g}", value);
}

}  // namespace ehrelay
