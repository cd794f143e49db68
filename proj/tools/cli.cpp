#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "fiwalk/errors.hpp"
#include "fiwalk/family.hpp"
#include "fiwalk/quotient.hpp"
#include "fiwalk/stabilization.hpp"

namespace fiwalk::cli {

namespace {

namespace fs = std::filesystem;

struct RunOptions {
  std::string family;
  std::string spec_file;
  std::vector<long> params;
  std::string n_range;
  int n = -1;
  std::vector<std::string> eps{"1/4", "1/100"};
  std::vector<std::string> alpha{"1/8"};
  std::string laziness = "0";
  std::string out = "out";
  std::uint64_t seed = 0;
  std::size_t cap_states = kDefaultFullGraphCap;
  std::size_t cap_hitting = kDefaultHittingCap;
  int max_fit_degree = -1;  // 2k
};

struct ResolvedFamily {
  FamilySpec spec;
  double product_floor = kDefaultProductFloor;
};

ResolvedFamily resolve_family(const RunOptions& o) {
  if (o.family.empty() == o.spec_file.empty())
    throw SpecError("give exactly one of --family and --spec-file");
  if (!o.spec_file.empty()) {
    std::ifstream in(o.spec_file);
    if (!in) throw SpecError("cannot read spec file '" + o.spec_file + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return {parse_family_spec(buffer.str()), kDefaultProductFloor};
  }
  ResolvedFamily r{builtin_family(o.family, o.params), kDefaultProductFloor};
  for (const auto& b : builtin_catalog())
    if (b.name == o.family) r.product_floor = b.product_floor;
  return r;
}

std::vector<Rational> parse_list(const std::vector<std::string>& items, const std::string& flag) {
  std::vector<Rational> out;
  for (const auto& s : items) {
    try {
      out.push_back(parse_rational(s));
    } catch (const std::invalid_argument& e) {
      throw SpecError(flag + ": " + e.what());
    }
  }
  if (out.empty()) throw SpecError(flag + " must not be empty");
  return out;
}

std::pair<int, int> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  try {
    if (colon == std::string::npos) throw std::invalid_argument("");
    std::size_t used_lo = 0, used_hi = 0;
    const std::string a = text.substr(0, colon), b = text.substr(colon + 1);
    const int lo = std::stoi(a, &used_lo), hi = std::stoi(b, &used_hi);
    if (used_lo != a.size() || used_hi != b.size()) throw std::invalid_argument("");
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw SpecError("--n-range must look like LO:HI, got '" + text + "'");
  }
}

SweepConfig make_config(const RunOptions& o) {
  SweepConfig c;
  std::tie(c.n_lo, c.n_hi) = parse_range(o.n_range);
  if (c.n_hi < c.n_lo) throw SpecError("--n-range is empty");
  c.epsilons = parse_list(o.eps, "--eps");
  c.alphas = parse_list(o.alpha, "--alpha");
  for (const auto& e : c.epsilons)
    if (e <= 0 || e >= 1) throw SpecError("--eps values must lie in (0, 1)");
  for (const auto& a : c.alphas)
    if (a <= 0 || a >= Rational(1, 2)) throw SpecError("--alpha values must lie in (0, 1/2)");
  try {
    c.laziness = parse_rational(o.laziness);
  } catch (const std::invalid_argument& e) {
    throw SpecError(std::string("--laziness: ") + e.what());
  }
  if (c.laziness < 0 || c.laziness >= 1) throw SpecError("--laziness must lie in [0, 1)");
  if (o.cap_states == 0 || o.cap_hitting == 0) throw SpecError("caps must be positive");
  c.cap_states = o.cap_states;
  c.cap_hitting = o.cap_hitting;
  return c;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw SpecError("cannot write '" + path.string() + "'");
  f << text;
}

nlohmann::ordered_json rational_list(const std::vector<Rational>& v) {
  auto j = nlohmann::ordered_json::array();
  for (const auto& q : v) j.push_back(to_string(q));
  return j;
}

int cmd_families(std::ostream& out) {
  out << std::left << std::setw(28) << "family" << std::setw(10) << "defaults" << std::setw(8)
      << "n_min"
      << "description\n";
  for (const auto& b : builtin_catalog()) {
    const std::string name = b.params.empty() ? b.name : b.name + " " + b.params;
    const std::string defaults =
        b.defaults.empty() ? "-" : b.params + "=" + std::to_string(b.defaults[0]);
    out << std::setw(28) << name << std::setw(10) << defaults << std::setw(8) << b.n_min
        << b.description << '\n';
  }
  return kExitPass;
}

int cmd_analyze(const RunOptions& o, std::ostream& out, std::ostream& err) {
  const ResolvedFamily fam = resolve_family(o);
  const FamilySpec& spec = fam.spec;
  SweepConfig config = make_config(o);
  if (config.n_lo < spec.n_min())
    throw DomainError("--n-range starts below n_min = " + std::to_string(spec.n_min()) + " for " +
                      spec.name());
  const int max_fit = o.max_fit_degree >= 0 ? o.max_fit_degree : 2 * spec.k();

  const int probe = std::max(config.n_lo, spec.k());
  const EquivarianceReport eq = check_equivariance(spec, probe, probe + spec.k() + 3, 200, o.seed);

  const std::vector<SweepRecord> records = sweep(spec, config);
  const Verdict verdict = build_verdict(spec.name(), records, config, fam.product_floor, max_fit);

  nlohmann::ordered_json extra;
  extra["seed"] = o.seed;
  extra["epsilons"] = rational_list(config.epsilons);
  extra["alphas"] = rational_list(config.alphas);
  extra["laziness"] = to_string(config.laziness);
  extra["product_floor"] = fam.product_floor;
  extra["max_fit_degree"] = max_fit;
  extra["equivariance"] = {{"trials", eq.trials}, {"failures", eq.failures}};
  auto checked = nlohmann::ordered_json::array();
  for (const auto& r : records)
    if (r.full_graph_checked) checked.push_back(r.n);
  extra["full_graph_checked_n"] = checked;

  const fs::path dir(o.out);
  fs::create_directories(dir);
  write_file(dir / "sweep.csv", sweep_to_csv(records, config));
  write_file(dir / "verdict.json", verdict_to_json(verdict, extra.dump()));
  for (const auto& r : records) {
    const QuotientChain q = build_orbit_walk(spec, r.n, config.laziness);
    write_file(dir / ("quotient_" + std::to_string(r.n) + ".json"), quotient_to_json(q, spec.name()));
  }

  out << spec.name() << " n = " << config.n_lo << ".." << config.n_hi << ": "
      << records.front().quotient_states << " orbit states";
  if (verdict.stabilization.stable)
    out << ", " << verdict.stabilization.stable_count << " distinct eigenvalues on the tail";
  out << "\nproduct_condition_failed = " << std::boolalpha
      << verdict.product.product_condition_failed << ", cutoff_flag = " << verdict.cutoff_flag
      << ", eventually_constant_mixing = " << verdict.eventually_constant << '\n';
  out << "wrote " << (dir / "sweep.csv").string() << ", " << (dir / "verdict.json").string()
      << " and " << records.size() << " quotient exports\n";

  std::vector<std::string> failures = verdict.failures();
  if (!eq.ok()) failures.push_back("equivariance: " + eq.first_failure);
  if (failures.empty()) return kExitPass;
  err << "assertion failures:\n";
  for (const auto& f : failures) err << "  " << f << '\n';
  return kExitAssertion;
}

int cmd_quotient(const RunOptions& o, std::ostream& out) {
  const ResolvedFamily fam = resolve_family(o);
  Rational laziness;
  try {
    laziness = parse_rational(o.laziness);
  } catch (const std::invalid_argument& e) {
    throw SpecError(std::string("--laziness: ") + e.what());
  }
  if (laziness < 0 || laziness >= 1) throw SpecError("--laziness must lie in [0, 1)");
  const QuotientChain q = build_orbit_walk(fam.spec, o.n, laziness);

  out << fam.spec.name() << " at n = " << o.n << ": " << q.num_vertices.get_str()
      << " vertices, " << q.states.size() << " orbit states\n";
  out << std::left << std::setw(6) << "state" << std::setw(24) << "pattern" << std::setw(16)
      << "class_size" << std::setw(20) << "representative"
      << "stationary\n";
  for (std::size_t i = 0; i < q.states.size(); ++i) {
    const auto& s = q.states[i];
    out << std::setw(6) << i << std::setw(24) << s.pattern.to_string() << std::setw(16)
        << s.class_size.get_str() << std::setw(20) << tuple_to_string(s.representative)
        << to_string(q.base.stationary()[i]) << '\n';
  }
  const fs::path dir(o.out);
  fs::create_directories(dir);
  const fs::path file = dir / ("quotient_" + std::to_string(o.n) + ".json");
  write_file(file, quotient_to_json(q, fam.spec.name()));
  out << "wrote " << file.string() << '\n';
  return kExitPass;
}

void add_family_options(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("--family", o.family, "built-in family name (see 'families')");
  cmd->add_option("--spec-file", o.spec_file, "JSON family description");
  cmd->add_option("--params", o.params, "family parameters, comma separated")->delimiter(',');
  cmd->add_option("--laziness", o.laziness, "holding probability, a rational in [0, 1)");
  cmd->add_option("--out", o.out, "output directory");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact mixing statistics for random walks on FI-graph families"};
  app.name("fiwalk");
  app.require_subcommand(1);
  RunOptions o;

  CLI::App* families = app.add_subcommand("families", "List the built-in families");
  CLI::App* analyze =
      app.add_subcommand("analyze", "Sweep n; write sweep.csv, verdict.json and quotient_<n>.json");
  add_family_options(analyze, o);
  analyze->add_option("--n-range", o.n_range, "sweep range LO:HI")->required();
  analyze->add_option("--eps", o.eps, "mixing thresholds, comma separated")->delimiter(',');
  analyze->add_option("--alpha", o.alpha, "hitting-set masses, comma separated")->delimiter(',');
  analyze->add_option("--seed", o.seed, "seed for the randomized equivariance check");
  analyze->add_option("--cap-states", o.cap_states,
                      "largest |V_n| cross-checked against the full chain");
  analyze->add_option("--cap-hitting", o.cap_hitting, "largest orbit walk searched for t_hit");
  analyze->add_option("--max-fit-degree", o.max_fit_degree,
                      "degree bound for rational fits (default 2k)");
  CLI::App* quotient = app.add_subcommand("quotient", "Export the orbit walk at one n");
  add_family_options(quotient, o);
  quotient->add_option("--n", o.n, "instance size")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*families) return cmd_families(out);
    if (*analyze) return cmd_analyze(o, out, err);
    return cmd_quotient(o, out);
  } catch (const InvariantViolation& e) {
    err << "assertion failure: " << e.what() << '\n';
    return kExitAssertion;
  } catch (const SpecError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "assertion failure: " << e.what() << '\n';
    return kExitAssertion;
  }
}

}  // namespace fiwalk::cli
