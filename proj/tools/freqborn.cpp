// freqborn: command-line front end for the fixed-frequency decomposition
// library. Every subcommand writes one deterministic CSV or JSON report.
//
// Exit codes: 0 success, 2 usage or input error, 3 capacity/range error,
// 4 numerical-contract violation.

#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "CLI11.hpp"
#include "freqborn/freqborn.hpp"
#include "report.hpp"

namespace {

using namespace freqborn;
using cli::Cell;
using cli::Report;
using cli::Table;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitCapacity = 3;
constexpr int kExitContract = 4;

constexpr double kMassContract = 1e-10;
constexpr double kOracleTolerance = 1e-12;

struct StateSpec {
  std::optional<double> a2;
  std::string amps;
  std::string amps_m3;
  std::string probs;
};

struct Common {
  std::string format = "csv";
  std::string out;
  bool renormalize = false;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_real(std::string_view s, std::string_view what) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
    throw domain_error("cannot parse " + std::string(what) + " '" + std::string(s) + "'");
  return v;
}

// Accepts "re", "imi", "re+imi", "re-imi" (also "i", "-i", "0.5+i").
std::complex<double> parse_complex(std::string_view text) {
  std::string_view s = trim(text);
  if (s.empty()) throw domain_error("empty amplitude");
  if (s.back() != 'i') return {parse_real(s, "amplitude"), 0.0};
  s.remove_suffix(1);
  std::size_t split = std::string_view::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  auto imag = [](std::string_view part) {
    if (part.empty() || part == "+") return 1.0;
    if (part == "-") return -1.0;
    return parse_real(part, "imaginary part");
  };
  if (split == std::string_view::npos) return {0.0, imag(s)};
  return {parse_real(s.substr(0, split), "real part"), imag(s.substr(split))};
}

std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = s.find(',');
    out.push_back(trim(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

std::vector<std::uint64_t> parse_n_list(std::string_view s) {
  std::vector<std::uint64_t> out;
  for (auto item : split_commas(s)) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size())
      throw domain_error("cannot parse N value '" + std::string(item) + "'");
    out.push_back(v);
  }
  return out;
}

SingleCopyState build_state(const StateSpec& spec, bool renormalize) {
  const int given = static_cast<int>(spec.a2.has_value()) + !spec.amps.empty() +
                    !spec.amps_m3.empty() + !spec.probs.empty();
  if (given != 1)
    throw domain_error("give exactly one of --a2, --amps, --amps-m3, --probs");
  if (spec.a2) return SingleCopyState::two_level(*spec.a2);
  if (!spec.probs.empty()) {
    std::vector<double> probs;
    for (auto item : split_commas(spec.probs)) probs.push_back(parse_real(item, "probability"));
    return SingleCopyState::from_probabilities(probs, renormalize);
  }
  const std::string& text = spec.amps.empty() ? spec.amps_m3 : spec.amps;
  std::vector<std::complex<double>> amps;
  for (auto item : split_commas(text)) amps.push_back(parse_complex(item));
  if (!spec.amps_m3.empty() && amps.size() != 3)
    throw domain_error("--amps-m3 needs exactly three amplitudes");
  return SingleCopyState(std::move(amps), renormalize);
}

Limits limits_from_env() {
  const char* env = std::getenv("FREQBORN_MAX_N");
  if (env == nullptr || *env == '\0') return {};
  std::string_view s(env);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || v == 0)
    throw domain_error("FREQBORN_MAX_N must be a positive integer");
  return Limits::uniform(v);
}

void add_state_options(CLI::App* cmd, StateSpec& spec) {
  cmd->add_option("--a2", spec.a2, "two-level state with |a|^2 = A2 (|b|^2 = 1 - A2)");
  cmd->add_option("--amps", spec.amps, "complex amplitudes \"re+imi,...\" (M >= 2)");
  cmd->add_option("--amps-m3", spec.amps_m3, "exactly three complex amplitudes");
  cmd->add_option("--probs", spec.probs, "level probabilities |a_i|^2 \"p0,p1,...\"");
}

void add_common_options(CLI::App* cmd, Common& common) {
  cmd->add_option("--format", common.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", common.out, "output path (default: standard output)");
  cmd->add_flag("--renormalize", common.renormalize,
                "rescale amplitudes or the wavefunction to unit norm");
}

nlohmann::ordered_json state_json(const SingleCopyState& state) {
  nlohmann::ordered_json probs = nlohmann::ordered_json::array();
  for (double p : state.probabilities()) probs.push_back(p);
  return probs;
}

Cell i64(std::uint64_t v) { return static_cast<std::int64_t>(v); }

// ---------------------------------------------------------------------------

int cmd_decompose(const SingleCopyState& state, std::uint64_t copies, const Limits& limits,
                  Report& report) {
  auto decomp = std::make_shared<FrequencyDecomposition>(
      state.levels() == 2 ? decompose_two_level(state, copies, limits)
                          : decompose_multilevel(state, copies, limits));
  report.parameters["probabilities"] = state_json(state);
  report.parameters["N"] = copies;

  Table t;
  t.name = "rows";
  if (decomp->is_two_level()) {
    t.columns = {"n", "r", "log_weight", "weight"};
  } else {
    for (std::size_t l = 0; l < decomp->levels(); ++l) t.columns.push_back("n_" + std::to_string(l));
    for (std::size_t l = 0; l < decomp->levels(); ++l) t.columns.push_back("r_" + std::to_string(l));
    t.columns.push_back("log_weight");
    t.columns.push_back("weight");
  }
  t.row_count = decomp->size();
  t.row = [decomp](std::size_t e, std::vector<Cell>& cells) {
    const std::size_t m = decomp->is_two_level() ? 1 : decomp->levels();
    for (std::size_t l = 0; l < m; ++l) cells.push_back(i64(decomp->count(e, l)));
    for (std::size_t l = 0; l < m; ++l) cells.push_back(decomp->relative_frequency(e, l));
    const LogWeight w = decomp->weight(e);
    cells.push_back(w.is_zero() ? Cell{} : Cell{w.log()});
    cells.push_back(w.linear());
  };
  report.tables.push_back(std::move(t));

  const double mass = total_mass(*decomp);
  if (std::fabs(mass - 1.0) > kMassContract) {
    std::cerr << "error: total mass " << mass << " violates |mass - 1| <= 1e-10\n";
    return kExitContract;
  }
  return kExitOk;
}

int cmd_scan(const SingleCopyState& state, double epsilon, const std::vector<std::uint64_t>& ns,
             const Limits& limits, Report& report) {
  const auto scan = std::make_shared<ConvergenceScan>(convergence_scan(state, epsilon, ns, limits));
  report.parameters["a_sq"] = scan->a_sq;
  report.parameters["eps"] = epsilon;
  report.parameters["Ns"] = ns;

  Table t;
  t.name = "rows";
  t.columns = {"N", "outside_mass", "bound", "inside_mass", "below_mass", "above_mass",
               "log_outside_mass"};
  t.row_count = scan->records.size();
  t.row = [scan](std::size_t i, std::vector<Cell>& cells) {
    const auto& rec = scan->records[i];
    cells = {i64(rec.copies),          rec.window.outside(),   rec.window.chebyshev_bound,
             rec.window.mass_inside,   rec.window.mass_below,  rec.window.mass_above,
             rec.window.log_outside().is_zero() ? Cell{} : Cell{rec.window.log_outside().log()}};
  };
  report.tables.push_back(std::move(t));

  for (const auto& rec : scan->records) {
    if (rec.window.outside() > rec.window.chebyshev_bound + 1e-12) {
      std::cerr << "error: outside mass exceeds the Chebyshev bound at N = " << rec.copies << "\n";
      return kExitContract;
    }
  }
  return kExitOk;
}

int cmd_bound(const SingleCopyState& state, std::uint64_t copies, double epsilon,
              const Limits& limits, Report& report) {
  if (state.levels() != 2) throw domain_error("bound: state must be two-level");
  const double a_sq = state.probability(0);
  const auto decomp = decompose_two_level(state, copies, limits);
  const WindowMass w = window_masses(decomp, 0, a_sq, epsilon);
  report.parameters["a_sq"] = a_sq;
  report.parameters["N"] = copies;
  report.parameters["eps"] = epsilon;

  Table t;
  t.name = "rows";
  t.columns = {"a_sq", "N", "eps", "bound", "outside_mass"};
  t.row_count = 1;
  t.row = [a_sq, copies, epsilon, w](std::size_t, std::vector<Cell>& cells) {
    cells = {a_sq, i64(copies), epsilon, w.chebyshev_bound, w.outside()};
  };
  report.tables.push_back(std::move(t));
  return w.outside() <= w.chebyshev_bound + 1e-12 ? kExitOk : kExitContract;
}

int cmd_cv(const std::string& wavefunction_path, const std::vector<std::string>& region_specs,
           std::uint64_t copies, double epsilon, bool renormalize, const Limits& limits,
           Report& report) {
  std::ifstream in(wavefunction_path);
  if (!in) throw domain_error("cannot open wavefunction file '" + wavefunction_path + "'");
  const GridWavefunction psi = read_wavefunction_csv(in, renormalize);
  std::vector<Region> regions;
  for (const auto& spec : region_specs) regions.push_back(Region::parse(spec));
  report.parameters["wavefunction"] = wavefunction_path;
  report.parameters["regions"] = region_specs;
  report.parameters["N"] = copies;
  report.parameters["eps"] = epsilon;
  report.parameters["grid_points"] = psi.size();
  report.parameters["h"] = psi.spacing();

  struct LevelRow {
    std::string region;
    MomentReport moments;
    WindowMass window;
  };
  auto rows = std::make_shared<std::vector<LevelRow>>();
  if (regions.size() == 1) {
    const RegionAnalysis a = region_frequency_analysis(psi, regions[0], copies, epsilon, limits);
    rows->push_back({region_specs[0], a.moments, a.window});
  } else {
    const auto decomp = multi_region_decomposition(psi, regions, copies, limits);
    for (std::size_t l = 0; l < decomp.levels(); ++l) {
      const double p = decomp.level_probability(l);
      rows->push_back({l < region_specs.size() ? region_specs[l] : std::string("rest"),
                       frequency_moments(decomp, l), window_masses(decomp, l, p, epsilon)});
    }
  }

  Table t;
  t.name = "rows";
  t.columns = {"level",        "region",      "a_sq",        "mean",
               "variance",     "predicted_variance", "empirical_variance", "mass_below",
               "mass_inside",  "mass_above",  "outside_mass", "bound"};
  t.row_count = rows->size();
  t.row = [rows](std::size_t i, std::vector<Cell>& cells) {
    const auto& r = (*rows)[i];
    cells = {i64(i),
             r.region,
             r.moments.probability,
             r.moments.mean,
             r.moments.variance,
             r.moments.predicted_variance,
             r.moments.empirical_variance,
             r.window.mass_below,
             r.window.mass_inside,
             r.window.mass_above,
             r.window.outside(),
             r.window.chebyshev_bound};
  };
  report.tables.push_back(std::move(t));
  return kExitOk;
}

int cmd_finite_run(const SingleCopyState& state, std::uint64_t inner,
                   std::optional<std::uint64_t> observed, std::optional<std::uint64_t> outer,
                   std::optional<std::uint64_t> n0, double epsilon, const Limits& limits,
                   Report& report) {
  auto dist = std::make_shared<FiniteRunDistribution>(finite_run_distribution(state, inner, limits));
  report.parameters["a_sq"] = dist->a_sq;
  report.parameters["N_inner"] = inner;

  Table t;
  t.name = "rows";
  t.columns = {"n", "r", "mass"};
  t.row_count = dist->masses.size();
  t.row = [dist](std::size_t n, std::vector<Cell>& cells) {
    cells = {i64(n), static_cast<double>(n) / static_cast<double>(dist->inner_copies),
             dist->masses[n]};
  };
  report.tables.push_back(std::move(t));

  if (observed) {
    report.parameters["observed"] = *observed;
    const double s = surprise_index(*dist, *observed);
    const double m = dist->masses[*observed];
    Table st;
    st.name = "surprise";
    st.columns = {"observed_n", "mass", "surprise_index"};
    st.row_count = 1;
    st.row = [o = *observed, m, s](std::size_t, std::vector<Cell>& cells) {
      cells = {i64(o), m, s};
    };
    report.tables.push_back(std::move(st));
  }

  int status = kExitOk;
  if (outer) {
    const std::size_t level = n0 ? *n0 : (observed ? *observed : dist->argmax());
    report.parameters["N_outer"] = *outer;
    report.parameters["n0"] = level;
    report.parameters["eps"] = epsilon;
    const WindowMass w = outer_frequency_check(*dist, *outer, level, epsilon, limits);
    const double p = dist->masses.at(level);
    Table ot;
    ot.name = "outer";
    ot.columns = {"n0", "p", "N_outer", "eps", "mass_below", "mass_inside", "mass_above",
                  "outside_mass", "bound"};
    ot.row_count = 1;
    ot.row = [level, p, o = *outer, epsilon, w](std::size_t, std::vector<Cell>& cells) {
      cells = {i64(level),   p,           i64(o),        epsilon,          w.mass_below,
               w.mass_inside, w.mass_above, w.outside(), w.chebyshev_bound};
    };
    report.tables.push_back(std::move(ot));
    if (w.outside() > w.chebyshev_bound + 1e-12) status = kExitContract;
  }
  return status;
}

int cmd_oracle_check(const SingleCopyState& state, std::uint64_t copies, const Limits& limits,
                     Report& report) {
  const auto oracle = brute_force_decompose(state, copies, limits);
  const auto closed = state.levels() == 2 ? decompose_two_level(state, copies, limits)
                                          : decompose_multilevel(state, copies, limits);
  if (oracle.size() != closed.size())
    throw contract_violation("oracle-check: entry counts differ");
  double max_dev = 0.0;
  for (std::size_t e = 0; e < closed.size(); ++e) {
    for (std::size_t l = 0; l < closed.levels(); ++l)
      if (oracle.count(e, l) != closed.count(e, l))
        throw contract_violation("oracle-check: sector order differs");
    max_dev = std::max(max_dev, std::fabs(oracle.weight(e).linear() - closed.weight(e).linear()));
  }
  const bool pass = max_dev <= kOracleTolerance;
  report.parameters["probabilities"] = state_json(state);
  report.parameters["N"] = copies;

  Table t;
  t.name = "rows";
  t.columns = {"levels", "N", "entries", "max_deviation", "tolerance", "status"};
  t.row_count = 1;
  t.row = [m = state.levels(), copies, size = closed.size(), max_dev, pass](std::size_t,
                                                                             std::vector<Cell>& cells) {
    cells = {i64(m), i64(copies), i64(size), max_dev, kOracleTolerance,
             std::string(pass ? "PASS" : "FAIL")};
  };
  report.tables.push_back(std::move(t));
  std::cerr << (pass ? "PASS" : "FAIL") << ": max per-weight deviation " << max_dev << "\n";
  return pass ? kExitOk : kExitContract;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"freqborn: fixed-relative-frequency decomposition of N-copy repetition states"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("freqborn ") + kVersion);

  Common common;
  StateSpec spec;
  std::uint64_t copies = 0;
  double epsilon = 0.05;
  std::string ns_text;
  std::string wavefunction;
  std::vector<std::string> regions;
  std::optional<std::uint64_t> observed, outer, n0;

  auto* decompose = app.add_subcommand("decompose", "weights |c_N|^2 of every frequency sector");
  decompose->footer(
      "Columns (two-level): n, r = n/N, log_weight (empty for zero), weight.\n"
      "Columns (M levels): n_0..n_{M-1}, r_0..r_{M-1}, log_weight, weight.\n"
      "Rows are in ascending lexicographic order of the counts.");
  add_state_options(decompose, spec);
  add_common_options(decompose, common);
  decompose->add_option("--n", copies, "number of copies N")->required();

  auto* scan = app.add_subcommand("scan", "window masses around |a|^2 over a list of N");
  scan->footer(
      "Columns: N, outside_mass, bound = |a|^2|b|^2/(eps^2 N), inside_mass, below_mass,\n"
      "above_mass, log_outside_mass (natural log; empty when the mass is exactly zero).");
  add_state_options(scan, spec);
  add_common_options(scan, common);
  scan->add_option("--eps", epsilon, "window half-width")->required();
  scan->add_option("--ns", ns_text, "increasing N list, e.g. 100,1000,10000")->required();

  auto* bound = app.add_subcommand("bound", "Chebyshev bound and measured outside mass");
  bound->footer("Columns: a_sq, N, eps, bound, outside_mass.");
  add_state_options(bound, spec);
  add_common_options(bound, common);
  bound->add_option("--n", copies, "number of copies N")->required();
  bound->add_option("--eps", epsilon, "window half-width")->required();

  auto* cv = app.add_subcommand("cv", "continuous wavefunction reduced to region occupations");
  cv->footer(
      "Wavefunction CSV: header x,re,im; uniform spacing.\n"
      "One --region gives a two-level analysis; several give one level per region plus 'rest'.\n"
      "Columns: level, region, a_sq, mean, variance, predicted_variance, empirical_variance,\n"
      "mass_below, mass_inside, mass_above, outside_mass, bound.");
  add_common_options(cv, common);
  cv->add_option("--wavefunction", wavefunction, "CSV file with columns x,re,im")->required();
  cv->add_option("--region", regions, "region lo:hi[,lo:hi...] (repeatable)")->required();
  cv->add_option("--n", copies, "number of copies N")->required();
  cv->add_option("--eps", epsilon, "window half-width");

  auto* finite = app.add_subcommand("finite-run", "distribution of successes in a finite run");
  finite->footer(
      "Columns: n, r = n/N, mass.\n"
      "--observed adds section 'surprise' (observed_n, mass, surprise_index).\n"
      "--outer adds section 'outer' (n0, p, N_outer, eps, mass_below, mass_inside,\n"
      "mass_above, outside_mass, bound).");
  add_state_options(finite, spec);
  add_common_options(finite, common);
  finite->add_option("--n", copies, "measurements per run N_inner")->required();
  finite->add_option("--observed", observed, "observed number of level-0 outcomes");
  finite->add_option("--outer", outer, "number of repeated runs N_outer");
  finite->add_option("--n0", n0, "outcome whose outer frequency is checked (default: argmax)");
  finite->add_option("--eps", epsilon, "outer window half-width");

  auto* oracle = app.add_subcommand("oracle-check", "closed form vs sequence-by-sequence expansion");
  oracle->footer("Columns: levels, N, entries, max_deviation, tolerance, status. Exit 0 iff PASS.");
  add_state_options(oracle, spec);
  add_common_options(oracle, common);
  oracle->add_option("--n", copies, "number of copies N")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  Report report;
  report.version = kVersion;
  int status = kExitOk;
  try {
    const Limits limits = limits_from_env();
    if (decompose->parsed()) {
      report.command = "decompose";
      status = cmd_decompose(build_state(spec, common.renormalize), copies, limits, report);
    } else if (scan->parsed()) {
      report.command = "scan";
      status = cmd_scan(build_state(spec, common.renormalize), epsilon, parse_n_list(ns_text),
                        limits, report);
    } else if (bound->parsed()) {
      report.command = "bound";
      status = cmd_bound(build_state(spec, common.renormalize), copies, epsilon, limits, report);
    } else if (cv->parsed()) {
      report.command = "cv";
      status = cmd_cv(wavefunction, regions, copies, epsilon, common.renormalize, limits, report);
    } else if (finite->parsed()) {
      report.command = "finite-run";
      status = cmd_finite_run(build_state(spec, common.renormalize), copies, observed, outer, n0,
                              epsilon, limits, report);
    } else if (oracle->parsed()) {
      report.command = "oracle-check";
      status = cmd_oracle_check(build_state(spec, common.renormalize), copies, limits, report);
    }

    const auto format = common.format == "json" ? cli::Format::json : cli::Format::csv;
    if (common.out.empty()) {
      cli::write_report(std::cout, report, format);
      std::cout.flush();
    } else {
      cli::write_report_file(common.out, report, format);
    }
  } catch (const capacity_error& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const range_error& e) {
    std::cerr << "range error: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const contract_violation& e) {
    std::cerr << "contract violation: " << e.what() << "\n";
    return kExitContract;
  } catch (const domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return status;
}
