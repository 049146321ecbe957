// exclab: command-line front end for the exclusion-game laboratory.
//
// Exit status: 0 success, 1 invariant violation, 2 usage or resource error.

#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "exclab/exclab.hpp"
#include "exclab/io.hpp"

using namespace exclab;
using io::Json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;
constexpr std::uint64_t kDefaultSeed = 42;

/// Default seed, overridden by EXCLAB_SEED.
std::uint64_t default_seed() {
  const char* env = std::getenv("EXCLAB_SEED");
  if (env == nullptr || *env == '\0') return kDefaultSeed;
  char* end = nullptr;
  errno = 0;
  const auto value = std::strtoull(env, &end, 0);
  if (errno != 0 || *end != '\0' || *env == '-')
    throw UsageError(std::string("EXCLAB_SEED is not an unsigned 64-bit integer: '") + env + "'");
  return value;
}

/// Writes to the named file, or stdout when the name is empty or "-".
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_.open(path, std::ios::binary);
    detail::require_resource(file_.good(), "cannot open '" + path + "' for writing");
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

void emit(const Json& doc, const std::string& path) {
  Sink sink(path);
  sink.stream() << doc.dump(2) << '\n';
}

std::string scalar_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_float()) return io::format12(v.get<double>());
  if (v.is_number()) return v.dump();
  throw UsageError("spec field values must be scalars or arrays of scalars");
}

/// Fills options of `sub` that were not given on the command line from a JSON
/// ExperimentSpec. Keys are option names; unknown keys are rejected.
void apply_spec(CLI::App& sub, const std::string& path) {
  std::ifstream in(path);
  detail::require_resource(in.good(), "cannot read spec file '" + path + "'");
  Json spec;
  try {
    spec = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw UsageError("spec file '" + path + "' is not valid JSON: " + e.what());
  }
  detail::require(spec.is_object(), "spec file must hold a JSON object");
  for (const auto& [key, value] : spec.items()) {
    if (key == "schema_version") {
      detail::require(value == io::kSchemaVersion, "spec schema_version must be " + std::to_string(io::kSchemaVersion));
      continue;
    }
    if (key == "command") {
      detail::require(value == sub.get_name(), "spec command '" + scalar_text(value) + "' does not match '" +
                                                   sub.get_name() + "'");
      continue;
    }
    std::string flag = key;
    for (auto& c : flag)
      if (c == '_') c = '-';
    CLI::Option* opt = sub.get_option_no_throw("--" + flag);
    if (opt == nullptr) opt = sub.get_option_no_throw(flag);
    if (opt == nullptr || flag == "spec") throw UsageError("unknown spec field '" + key + "' for " + sub.get_name());
    if (opt->count() > 0) continue;  // the command line wins
    if (value.is_array()) {
      for (const auto& item : value) opt->add_result(scalar_text(item));
    } else {
      opt->add_result(scalar_text(value));
    }
    opt->run_callback();
  }
}

// ---------------------------------------------------------------------------

struct VerifyPbrArgs {
  int m_max = 10;
  std::string output;
};

int cmd_verify_pbr(const VerifyPbrArgs& a) {
  detail::require(a.m_max >= 1, "verify-pbr: --m-max must be at least 1");
  detail::require(a.m_max <= kMaxMaterializedQubits, "verify-pbr: --m-max above cap of 10");
  Json doc = io::document("verify_pbr");
  doc["m_max"] = a.m_max;
  Json rows = Json::array();
  bool all = true;
  for (int m = 1; m <= a.m_max; ++m) {
    const double t = pbr::theta(m);
    const auto& meas = pbr::exclusion_measurement(m);
    double overlap = 0.0;
    double orthogonality = 0.0;
    for (std::size_t w = 0; w < meas.size(); ++w) {
      overlap = std::max(overlap, std::abs(inner_product(meas.outcome(w), pbr::psi_product(meas.label(w), t))));
      for (std::size_t v = w + 1; v < meas.size(); ++v)
        orthogonality = std::max(orthogonality, std::abs(inner_product(meas.outcome(w), meas.outcome(v))));
    }
    const double residual = meas.completeness_residual();
    const double sub = m >= 2 ? pbr::max_self_overlap(m, 0.9 * t) : 0.0;
    const bool ok = overlap < kVectorTolerance && orthogonality < kVectorTolerance && residual < kMatrixTolerance &&
                    (m < 2 || sub > 1e-6);
    all = all && ok;
    rows.push_back({{"m", m},
                    {"theta", io::round12(t)},
                    {"max_overlap", io::round12(overlap)},
                    {"max_orthogonality_residual", io::round12(orthogonality)},
                    {"completeness_residual", io::round12(residual)},
                    {"subcritical_max_overlap", m >= 2 ? Json(io::round12(sub)) : Json(nullptr)},
                    {"pass", ok}});
  }
  doc["results"] = std::move(rows);
  doc["pass"] = all;
  emit(doc, a.output);
  return all ? kExitOk : kExitViolation;
}

struct BoundsArgs {
  std::vector<long long> n;
  std::string rule = "power";
  std::optional<double> exponent;
  std::optional<double> alpha;
  std::optional<long long> m;
  std::string format = "csv";
  std::string output;
};

int cmd_bounds(const BoundsArgs& a) {
  bounds::MRule rule;
  if (a.rule == "power") {
    detail::require(!a.alpha && !a.m, "bounds: the power rule takes --exponent only");
    rule = bounds::MRule::power(a.exponent.value_or(0.75));
  } else if (a.rule == "linear") {
    detail::require(!a.exponent && !a.m, "bounds: the linear rule takes --alpha only");
    detail::require(a.alpha.has_value(), "bounds: the linear rule needs --alpha");
    rule = bounds::MRule::linear(*a.alpha);
  } else if (a.rule == "fixed") {
    detail::require(!a.exponent && !a.alpha, "bounds: the fixed rule takes --m only");
    detail::require(a.m.has_value(), "bounds: the fixed rule needs --m");
    rule = bounds::MRule::fixed(*a.m);
  } else {
    bounds::MRule::parse(a.rule, 0.0);  // throws with the list of rules
  }
  const auto rows = bounds::separation_table(a.n, rule);
  bool ok = true;
  for (const auto& r : rows)
    ok = ok && std::abs(r.classical_ic_lower - std::max(0.0, r.n - r.gamma_log2)) <= 1e-9 * std::max(1.0, r.gamma_log2) &&
         r.quantum_ic_upper == 2 * r.quantum_entropy_upper;
  if (a.format == "json") {
    emit(io::bounds_json(rows, rule), a.output);
  } else {
    Sink sink(a.output);
    io::write_bounds_csv(sink.stream(), rows);
  }
  return ok ? kExitOk : kExitViolation;
}

struct SimulateArgs {
  std::string strategy = "quantum";
  int n = 0;
  std::optional<int> m;
  std::optional<double> alpha;
  std::uint64_t trials = 1000;
  std::optional<std::uint64_t> seed;
  std::optional<double> delta;
  std::optional<long long> k;
  std::string transcripts;
  std::string output;
};

int cmd_simulate(const SimulateArgs& a, unsigned threads) {
  game::GameConfig c;
  c.strategy = game::parse_strategy(a.strategy);
  detail::require(a.n >= 1, "simulate: --n is required and must be at least 1");
  c.n = a.n;
  detail::require(a.m.has_value() != a.alpha.has_value(), "simulate: give exactly one of --m and --alpha");
  if (a.m) {
    c.m = *a.m;
  } else {
    const auto p = bounds::GameParameters::from_alpha(a.n, *a.alpha);
    c.m = p.m;
  }
  c.trials = a.trials;
  c.seed = a.seed ? *a.seed : default_seed();
  c.delta = a.delta;
  c.k = a.k;
  c.validate();

  const bool keep = !a.transcripts.empty();
  const auto result = game::monte_carlo(c, threads, keep);
  if (keep) {
    Sink sink(a.transcripts);
    io::write_transcripts(sink.stream(), result.transcripts);
  }
  emit(io::to_json(result.stats), a.output);
  return result.stats.zero_error() ? kExitOk : kExitViolation;
}

struct OracleArgs {
  std::optional<int> n;
  std::optional<int> m;
  std::string output;
};

int cmd_oracle(const OracleArgs& a, unsigned threads) {
  detail::require(a.n && a.m, "oracle: N and M are required");
  const int n = *a.n;
  const int m = *a.m;
  detail::require(n >= 1 && m >= 1 && m <= n, "oracle: need 1 <= M <= N");
  detail::require(n <= bounds::kExactGammaMaxN, "oracle: N above cap");
  const auto r = classical::brute_force_min_exclusion(n, m, threads);
  const auto expected = (std::uint64_t{1} << n) - bounds::gamma(n, m);
  const auto generator = classical::consistent_generator(r.witness);
  const bool pass = r.min_count == expected && classical::excluded_count(r.witness) == r.min_count;
  Json doc = io::document("oracle");
  doc["n"] = n;
  doc["m"] = m;
  doc["min_count"] = r.min_count;
  doc["expected"] = expected;
  doc["verdict"] = pass ? "PASS" : "FAIL";
  doc["enumeration_size"] = r.enumeration_size;
  doc["leaves_visited"] = r.leaves_visited;
  doc["subtrees_pruned"] = r.subtrees_pruned;
  doc["witness_consistent"] = generator.has_value();
  doc["witness_generator"] = generator ? Json(generator->str()) : Json(nullptr);
  doc["witness"] = io::to_json(r.witness);
  emit(doc, a.output);
  return pass ? kExitOk : kExitViolation;
}

struct SteeringArgs {
  int m_max = 32;
  std::optional<long long> n;
  std::optional<double> alpha;
  std::optional<double> delta;
  std::string output;
};

int cmd_steering(const SteeringArgs& a) {
  detail::require(a.m_max >= 1 && a.m_max <= 64, "steering: --m-max must lie in [1, 64]");
  Json doc = io::document("steering");
  doc["m_max"] = a.m_max;
  Json rows = Json::array();
  bool all = true;
  for (int m = 1; m <= a.m_max; ++m) {
    const auto kit = steering::build_kit(m);
    const double s = std::sin(kit.theta);
    double prob_residual = 0.0;
    double fid_residual = 0.0;
    for (int bit = 0; bit < 2; ++bit) {
      const auto br = steering::steering_branches(kit.phi_ab, kit.measurement_for(bit));
      prob_residual = std::max({prob_residual, std::abs(br.probability[0] - 1 / (1 + s)),
                                std::abs(br.probability[1] - s / (1 + s))});
      for (int outcome = 0; outcome < 2; ++outcome) {
        const auto& st = br.bob_state[static_cast<std::size_t>(outcome)];
        fid_residual = std::max(fid_residual, st ? std::abs(1 - fidelity(*st, kit.target(bit, outcome))) : 1.0);
      }
    }
    const bool ok = prob_residual < kVectorTolerance && fid_residual < kVectorTolerance;
    all = all && ok;
    rows.push_back({{"m", m},
                    {"theta", io::round12(kit.theta)},
                    {"p_steer", io::round12(steering::p_steer(m))},
                    {"probability_residual", io::round12(prob_residual)},
                    {"fidelity_residual", io::round12(fid_residual)},
                    {"pass", ok}});
  }
  doc["results"] = std::move(rows);

  if (a.n || a.alpha || a.delta) {
    detail::require(a.n && a.alpha, "steering: --n and --alpha go together");
    const auto p = bounds::GameParameters::from_alpha(static_cast<int>(*a.n), *a.alpha, a.delta);
    Json proto;
    proto["n"] = p.n;
    proto["m"] = p.m;
    proto["alpha"] = io::round12(*a.alpha);
    proto["p_global_steer"] = io::round12(steering::p_global_steer(p.n, p.m));
    proto["global_steer_bound"] = io::round12(std::pow(4.0, -1.0 / *a.alpha));
    proto["effective_bound"] = io::round12(std::pow(4.0, -static_cast<double>(p.n) / p.m));
    if (a.delta) {
      const auto k = steering::choose_k(*a.alpha, *a.delta);
      const double abort = steering::p_abort(p.n, p.m, k);
      proto["delta"] = io::round12(*a.delta);
      proto["k"] = k;
      proto["p_abort"] = io::round12(abort);
      proto["message_bits"] = io::round12(steering::message_bits(k));
      proto["message_bits_integral"] = steering::message_bits_integral(k);
      proto["message_bits_with_abort"] = steering::message_bits_with_abort(k);
    }
    doc["protocol"] = std::move(proto);
  }
  doc["pass"] = all;
  emit(doc, a.output);
  return all ? kExitOk : kExitViolation;
}

struct ChooseKArgs {
  std::optional<double> alpha;
  std::optional<double> delta;
};

int cmd_choose_k(const ChooseKArgs& a) {
  detail::require(a.alpha && a.delta, "choose-k: ALPHA and DELTA are required");
  std::cout << steering::choose_k(*a.alpha, *a.delta) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exclab: exclusion-game laboratory"};
  app.require_subcommand(1);
  app.fallthrough();
  unsigned threads = std::max(1U, std::thread::hardware_concurrency());
  app.add_option("--threads", threads, "worker threads (default: available cores)")->check(CLI::PositiveNumber);

  std::map<CLI::App*, std::string> spec_paths;
  auto with_spec = [&](CLI::App* sub) {
    sub->add_option("--spec", spec_paths[sub], "JSON ExperimentSpec supplying option values");
    return sub;
  };

  VerifyPbrArgs vp;
  auto* verify = with_spec(app.add_subcommand("verify-pbr", "check PBR zero-error exclusion for m in [1, m_max]"));
  verify->add_option("--m-max", vp.m_max, "largest m to check (1..10)");
  verify->add_option("--output", vp.output, "report file (default stdout)");

  BoundsArgs bd;
  auto* bnd = with_spec(app.add_subcommand("bounds", "tabulate classical and quantum information-cost bounds"));
  bnd->add_option("--n", bd.n, "string lengths (repeat or comma-separate)")->delimiter(',');
  bnd->add_option("--rule", bd.rule, "m rule: power, linear or fixed");
  bnd->add_option("--exponent", bd.exponent, "power rule: m = floor(n^exponent), default 0.75");
  bnd->add_option("--alpha", bd.alpha, "linear rule: m = floor(alpha n)");
  bnd->add_option("--m", bd.m, "fixed rule: constant m");
  bnd->add_option("--format", bd.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  bnd->add_option("--output", bd.output, "table file (default stdout)");

  SimulateArgs sim;
  auto* simulate = with_spec(app.add_subcommand("simulate", "Monte-Carlo games for one strategy"));
  simulate->add_option("--strategy", sim.strategy, "quantum, classical_cover or entanglement_assisted");
  simulate->add_option("--n", sim.n, "string length");
  simulate->add_option("--m", sim.m, "subset size");
  simulate->add_option("--alpha", sim.alpha, "subset fraction, m = floor(alpha n)");
  simulate->add_option("--trials", sim.trials, "number of games");
  simulate->add_option("--seed", sim.seed, "seed (default EXCLAB_SEED or 42)");
  simulate->add_option("--delta", sim.delta, "abort budget (entanglement_assisted)");
  simulate->add_option("--k", sim.k, "number of shared sets (entanglement_assisted)");
  simulate->add_option("--transcripts", sim.transcripts, "newline-delimited JSON transcript file");
  simulate->add_option("--output", sim.output, "statistics file (default stdout)");

  OracleArgs orc;
  auto* oracle = with_spec(app.add_subcommand("oracle", "exhaustive minimal-exclusion search"));
  oracle->add_option("n", orc.n, "string length N");
  oracle->add_option("m", orc.m, "subset size M");
  oracle->add_option("--output", orc.output, "report file (default stdout)");

  SteeringArgs st;
  auto* steer = with_spec(app.add_subcommand("steering", "steering exactness and abort analysis"));
  steer->add_option("--m-max", st.m_max, "largest m to check (default 32)");
  steer->add_option("--n", st.n, "protocol string length");
  steer->add_option("--alpha", st.alpha, "protocol subset fraction");
  steer->add_option("--delta", st.delta, "protocol abort budget");
  steer->add_option("--output", st.output, "report file (default stdout)");

  ChooseKArgs ck;
  auto* choose = with_spec(app.add_subcommand("choose-k", "smallest k meeting the abort budget"));
  choose->add_option("alpha", ck.alpha, "ALPHA in (0, 1]");
  choose->add_option("delta", ck.delta, "DELTA in (0, 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    for (auto* sub : app.get_subcommands()) {
      if (!spec_paths[sub].empty()) apply_spec(*sub, spec_paths[sub]);
      if (sub == verify) return cmd_verify_pbr(vp);
      if (sub == bnd) return cmd_bounds(bd);
      if (sub == simulate) return cmd_simulate(sim, threads);
      if (sub == oracle) return cmd_oracle(orc, threads);
      if (sub == steer) return cmd_steering(st);
      if (sub == choose) return cmd_choose_k(ck);
    }
  } catch (const CLI::Error& e) {
    std::cerr << "exclab: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "exclab: usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ResourceError& e) {
    std::cerr << "exclab: resource error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "exclab: error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
