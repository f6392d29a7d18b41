#pragma once

// Command-line front end: build | constants | select | maximal | verify | sweep.

#include "covlab/builders.hpp"
#include "covlab/constants.hpp"
#include "covlab/covering.hpp"
#include "covlab/io.hpp"
#include "covlab/maximal.hpp"
#include "covlab/numeric.hpp"
#include "covlab/space.hpp"
#include "covlab/sweep.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace covlab::cli {

enum class Exit : int { ok = 0, verification_failed = 1, invalid_input = 2 };

struct RunConfig {
  std::string command;
  std::string space_spec;
  std::string space_file;
  std::string t = "1/2";
  std::string T = "2";
  std::string window;  // "lo,hi"; empty: command default
  std::string k2_mode = "combined";
  std::string mode = "combined";
  std::string balls;
  std::string r;       // bounded base radius; empty: smallest ball radius
  std::string radii;   // sparse radii set / M_R radii
  std::string threshold = "1";
  bool verify = false;
  std::string constants_file;
  std::string declare;
  std::string out_dir;
  std::string format = "report";
  std::uint64_t seed = 1;
  std::string f;       // delta:POINT | const:C | values:a,b,...
  std::string scan;    // delta | random
  std::size_t count = 100;
  std::optional<int> d;
  bool bounds = false;
  std::vector<int> dims;
  int hw = 4;
  std::size_t families = 20;
  std::size_t budget = 2'000'000;
};

namespace detail {

inline Space load_space(const RunConfig& cfg) {
  if (!cfg.space_file.empty() && !cfg.space_spec.empty()) throw std::invalid_argument("give --space or --space-file, not both");
  if (!cfg.space_file.empty()) return read_space_file(cfg.space_file);
  if (cfg.space_spec.empty()) throw std::invalid_argument("missing --space or --space-file");
  return build_space(parse_space_spec(cfg.space_spec));
}

inline std::string as_tsv(const KvDocument& doc) {
  std::string out = "key\tvalue\n";
  for (const auto& [k, v] : doc.entries()) out += k + "\t" + v + "\n";
  return out;
}

struct Emitter {
  const RunConfig& cfg;
  std::ostream& out;
  std::ostream& err;

  void file(const std::string& name, const std::string& text) const {
    if (cfg.out_dir.empty()) return;
    std::filesystem::create_directories(cfg.out_dir);
    write_text_file((std::filesystem::path(cfg.out_dir) / name).string(), text);
  }
  // Prints the report (or `table` in tsv format) and writes report.kv.
  void report(const KvDocument& doc, const std::string& table = "") const {
    out << (cfg.format == "tsv" ? (table.empty() ? as_tsv(doc) : table) : doc.str());
    file("report.kv", doc.str());
  }
};

inline K2Mode parse_k2_mode(const std::string& s) {
  if (s == "combined") return K2Mode::combined;
  if (s == "bounded") return K2Mode::bounded;
  throw std::invalid_argument("--k2-mode must be combined or bounded");
}

inline FamilyMode parse_mode(const std::string& s) {
  if (s == "sparse") return FamilyMode::sparse;
  if (s == "combined") return FamilyMode::combined;
  if (s == "bounded") return FamilyMode::bounded;
  throw std::invalid_argument("--mode must be sparse, combined or bounded");
}

inline std::optional<RadiusWindow> window_of(const RunConfig& cfg) {
  if (cfg.window.empty()) return std::nullopt;
  return parse_window(cfg.window);
}

inline BallFamily family_of(const Space& space, const RunConfig& cfg) {
  BallFamily fam;
  fam.balls = parse_balls(space, cfg.balls);
  fam.t = parse_rational(cfg.t);
  fam.mode = parse_mode(cfg.mode);
  fam.T = parse_rational(cfg.T);
  if (fam.mode == FamilyMode::sparse) {
    RadiiSet rs;
    rs.T = fam.T;
    rs.radii = cfg.radii.empty() ? std::vector<Rational>{} : parse_rational_list(cfg.radii);
    if (cfg.radii.empty())
      for (const auto& b : fam.balls) rs.radii.push_back(b.radius);
    std::sort(rs.radii.begin(), rs.radii.end());
    rs.radii.erase(std::unique(rs.radii.begin(), rs.radii.end()), rs.radii.end());
    fam.radii = rs;
  }
  if (fam.mode == FamilyMode::bounded) {
    if (!cfg.r.empty()) {
      fam.r = parse_rational(cfg.r);
    } else if (!fam.balls.empty()) {
      fam.r = fam.balls.front().radius;
      for (const auto& b : fam.balls) fam.r = std::min(fam.r, b.radius);
    }
  }
  return fam;
}

inline Theorem theorem_of(FamilyMode m) {
  switch (m) {
    case FamilyMode::sparse: return Theorem::sparse;
    case FamilyMode::bounded: return Theorem::bounded;
    case FamilyMode::combined: return Theorem::combined;
  }
  return Theorem::combined;
}

// Declared constants: --constants file first, then --declare key=value,...
inline ConstantsReport apply_declared(const RunConfig& cfg, ConstantsReport base) {
  if (!cfg.constants_file.empty()) {
    std::ifstream in(cfg.constants_file);
    if (!in) throw std::runtime_error("cannot open constants file " + cfg.constants_file);
    base = constants_from_kv(KvDocument::parse(in), base);
  }
  if (!cfg.declare.empty()) {
    KvDocument doc;
    for (const auto& part : split(cfg.declare, ',')) {
      const auto eq = part.find('=');
      if (eq == std::string::npos) throw ParseError("--declare " + part, "expected key=value");
      doc.set(part.substr(0, eq), part.substr(eq + 1));
    }
    base = constants_from_kv(doc, base);
  }
  return base;
}

inline Exit cmd_build(const Space& space, const Emitter& em) {
  KvDocument doc;
  doc.set("points", std::to_string(space.size()));
  doc.set("exact", space.exact_distances() ? "true" : "false");
  doc.set("distinct_distances", std::to_string(space.distance_values().size()));
  doc.set("diameter", to_string(space.distance_values().back()));
  doc.set("total_measure", to_string(space.to_measure(space.total_units())));
  doc.set("support_size", std::to_string(space.support().size()));
  em.report(doc);
  em.file("space.json", space_to_json(space));
  return Exit::ok;
}

inline Exit cmd_constants(const Space& space, const RunConfig& cfg, const Emitter& em) {
  const auto report = constants_report(space, parse_rational(cfg.t), parse_rational(cfg.T),
                                       window_of(cfg).value_or(RadiusWindow::full()), parse_k2_mode(cfg.k2_mode));
  em.report(to_kv(report, &space));
  return Exit::ok;
}

inline Exit cmd_select(const Space& space, const RunConfig& cfg, const Emitter& em, bool verify) {
  const BallFamily fam = family_of(space, cfg);
  const Rational threshold = parse_rational(cfg.threshold);
  SelectionOutcome outcome;
  switch (fam.mode) {
    case FamilyMode::sparse: outcome = sparse_select(space, fam, threshold); break;
    case FamilyMode::combined: outcome = full_select(space, fam, threshold); break;
    case FamilyMode::bounded: outcome = bounded_collection(space, fam); break;
  }
  KvDocument doc = to_kv(outcome, space);
  std::string table = "point\tdensity\n";
  for (std::size_t i = 0; i < space.size(); ++i) table += space.label(i) + "\t" + to_string(outcome.density[i]) + "\n";
  Exit code = Exit::ok;
  if (verify) {
    const RadiusWindow window = window_of(cfg).value_or(covering_window(fam));
    const K2Mode k2 = fam.mode == FamilyMode::bounded ? K2Mode::bounded : K2Mode::combined;
    ConstantsReport report = constants_report(space, fam.t, fam.T, window, k2);
    report = apply_declared(cfg, report);
    const VerificationReport vr = verify_covering_bounds(space, outcome, report, theorem_of(fam.mode));
    doc.append(to_kv(report, &space), "constants.");
    doc.append(to_kv(vr));
    if (!vr.passed()) {
      for (const auto& f : vr.failures()) em.err << "failed " << f << "\n";
      code = Exit::verification_failed;
    }
  }
  em.report(doc, table);
  return code;
}

inline SampleFunction function_of(const Space& space, const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ParseError("--f " + text, "expected delta:POINT, const:C or values:a,b,...");
  const std::string kind = text.substr(0, colon), arg = text.substr(colon + 1);
  if (kind == "delta") return SampleFunction::indicator(space.size(), parse_point(space, arg));
  if (kind == "const") return SampleFunction::constant(space.size(), parse_rational(arg));
  if (kind == "values") {
    SampleFunction f{parse_rational_list(arg)};
    if (f.values.size() != space.size())
      throw ParseError("--f", "expected " + std::to_string(space.size()) + " values, got " + std::to_string(f.values.size()));
    return f;
  }
  throw ParseError("--f " + text, "unknown function kind " + kind);
}

inline Exit cmd_maximal(const Space& space, const RunConfig& cfg, const Emitter& em) {
  std::optional<std::vector<Rational>> radii;
  if (!cfg.radii.empty()) {
    radii = parse_rational_list(cfg.radii);
    std::sort(radii->begin(), radii->end());
    radii->erase(std::unique(radii->begin(), radii->end()), radii->end());
  }
  KvDocument doc;
  doc.set("operator", radii ? "M_R" : "M");
  if (radii) {
    std::vector<std::string> rs;
    for (const auto& r : *radii) rs.push_back(to_string(r));
    doc.set("radii", join(rs));
  }
  SampleFunction f;
  if (!cfg.scan.empty()) {
    Probe probe;
    if (cfg.scan == "delta") probe = DeltaScan{};
    else if (cfg.scan == "random") probe = RandomProbe{cfg.count, cfg.seed};
    else throw std::invalid_argument("--scan must be delta or random");
    const WeakNormResult res = empirical_weak_norm(space, probe, radii);
    doc.set("scan", cfg.scan);
    doc.set("probes", std::to_string(res.probes));
    doc.set("weak_norm_lower_bound", to_string(res.ratio));
    f = res.witness;
  } else {
    if (cfg.f.empty()) throw std::invalid_argument("maximal needs --f or --scan");
    f = function_of(space, cfg.f);
  }
  const MaximalValues mf = maximal_function(space, f, radii);
  std::vector<std::string> vals, fv;
  for (std::size_t i = 0; i < space.size(); ++i) {
    vals.push_back(to_string(mf.values[i]) + (mf.undefined[i] ? "*" : ""));
    fv.push_back(to_string(f.values[i]));
  }
  doc.set("f", join(fv));
  doc.set("Mf", join(vals));
  const WeakTypeProfile prof = weak_type_profile(space, f, radii);
  doc.append(to_kv(prof));

  Exit code = Exit::ok;
  if (cfg.bounds || !cfg.constants_file.empty() || !cfg.declare.empty()) {
    const Rational t = parse_rational(cfg.t), T = parse_rational(cfg.T);
    ConstantsReport report = constants_report(space, t, T, window_of(cfg).value_or(RadiusWindow::full()));
    report = apply_declared(cfg, report);
    const BoundsReport b = theoretical_bounds(report, cfg.d);
    doc.append(to_kv(b));
    // Weak-type checks: M against full_bound; M_R against sparse_bound
    // when R is T-lacunary with T t >= 1.
    const BoundValue* bound = &b.full_bound;
    std::string name = "weak_full";
    if (radii) {
      const bool lacunary = RadiiSet{*radii, T}.is_lacunary() && T * t >= 1;
      bound = lacunary ? &b.sparse_bound : nullptr;
      name = "weak_sparse";
      if (!lacunary) doc.set("check.weak_sparse", "not-applicable");
    }
    if (bound) {
      if (bound->vacuous) {
        doc.set("check." + name, "vacuous");
      } else {
        const bool ok = to_double(prof.supremum) <= bound->value * (1 + kLogBoundSlack);
        doc.set("check." + name, ok ? "pass" : "fail");
        doc.set("check." + name + ".lhs", to_string(prof.supremum));
        doc.set("check." + name + ".rhs", format_double(bound->value));
        if (!ok) {
          em.err << "failed " << name << ": " << to_string(prof.supremum) << " > " << format_double(bound->value) << "\n";
          code = Exit::verification_failed;
        }
      }
    }
  }
  const std::string levels = levels_tsv(prof);
  em.report(doc, levels);
  em.file("levels.tsv", levels);
  return code;
}

inline Exit cmd_sweep(const RunConfig& cfg, const Emitter& em) {
  SweepConfig sc;
  sc.dims = cfg.dims;
  sc.half_width = cfg.hw;
  sc.families = cfg.families;
  sc.seed = cfg.seed;
  sc.point_budget = cfg.budget;
  const auto rows = sweep(sc);
  KvDocument doc;
  doc.set("rows", std::to_string(rows.size()));
  bool all = true;
  for (const auto& r : rows) {
    const std::string p = "d" + std::to_string(r.d) + ".";
    doc.set(p + "max_density", to_string(r.max_density));
    doc.set(p + "density_bound", r.density_bound.str());
    doc.set(p + "weak_norm", to_string(r.weak_norm));
    doc.set(p + "lebesgue_sparse_bound", format_double(*r.bounds.lebesgue_sparse_bound));
    doc.set(p + "consistent", r.consistent() ? "yes" : "no");
    all = all && r.consistent();
  }
  doc.set("consistent", all ? "yes" : "no");
  const std::string table = sweep_tsv(rows);
  em.report(doc, table);
  em.file("sweep.tsv", table);
  return all ? Exit::ok : Exit::verification_failed;
}

}  // namespace detail

inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.format != "report" && cfg.format != "tsv") throw std::invalid_argument("--format must be report or tsv");
    const detail::Emitter em{cfg, out, err};
    Exit code = Exit::ok;
    if (cfg.command == "sweep") {
      code = detail::cmd_sweep(cfg, em);
    } else {
      const Space space = detail::load_space(cfg);
      if (cfg.command == "build") code = detail::cmd_build(space, em);
      else if (cfg.command == "constants") code = detail::cmd_constants(space, cfg, em);
      else if (cfg.command == "select") code = detail::cmd_select(space, cfg, em, cfg.verify);
      else if (cfg.command == "verify") code = detail::cmd_select(space, cfg, em, true);
      else if (cfg.command == "maximal") code = detail::cmd_maximal(space, cfg, em);
      else throw std::invalid_argument("unknown command " + cfg.command);
    }
    if (code == Exit::verification_failed) err << "verification failed\n";
    return static_cast<int>(code);
  } catch (const MetricError& e) {
    err << "error: metric violation: " << e.what() << "\n";
  } catch (const ParseError& e) {
    err << "error: parse error at " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return static_cast<int>(Exit::invalid_input);
}

inline int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Covering constants, ball selection and maximal-function bounds on finite metric measure spaces"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string dims;

  auto space_opts = [&](CLI::App* sub) {
    sub->add_option("--space", cfg.space_spec, "builtin space: three-point-delta | grid:d=D,hw=H | lshape:pitch=P | ngon:n=N");
    sub->add_option("--space-file", cfg.space_file, "JSON space file");
    sub->add_option("--out", cfg.out_dir, "directory for report.kv and tables");
    sub->add_option("--format", cfg.format, "report | tsv");
  };
  auto param_opts = [&](CLI::App* sub) {
    sub->add_option("--t", cfg.t, "t in (0,1]");
    sub->add_option("--T", cfg.T, "T > 1");
    sub->add_option("--window", cfg.window, "radius window lo,hi (hi may be inf)");
  };
  auto family_opts = [&](CLI::App* sub) {
    sub->add_option("--mode", cfg.mode, "sparse | combined | bounded");
    sub->add_option("--balls", cfg.balls, "center:radius,... (center = label, #index or a;b)")->required();
    sub->add_option("--r", cfg.r, "bounded mode base radius");
    sub->add_option("--radii", cfg.radii, "sparse mode radii set (default: the ball radii)");
    sub->add_option("--threshold", cfg.threshold, "acceptance threshold");
    sub->add_option("--constants", cfg.constants_file, "declared constants (key=value file)");
    sub->add_option("--declare", cfg.declare, "declared constants key=value,...");
  };

  auto* build = app.add_subcommand("build", "build a space and write space.json");
  space_opts(build);
  auto* constants = app.add_subcommand("constants", "compute regularity constants");
  space_opts(constants);
  param_opts(constants);
  constants->add_option("--k2-mode", cfg.k2_mode, "combined (ratio 1/t) | bounded (ratio T)");
  auto* select = app.add_subcommand("select", "run ball selection");
  space_opts(select);
  param_opts(select);
  family_opts(select);
  select->add_flag("--verify", cfg.verify, "verify the covering inequalities");
  auto* verify = app.add_subcommand("verify", "run ball selection and verify against computed or declared constants");
  space_opts(verify);
  param_opts(verify);
  family_opts(verify);
  auto* maximal = app.add_subcommand("maximal", "maximal function and weak-type ratios");
  space_opts(maximal);
  param_opts(maximal);
  maximal->add_option("--f", cfg.f, "delta:POINT | const:C | values:a,b,...");
  maximal->add_option("--radii", cfg.radii, "restrict radii (M_R)");
  maximal->add_option("--scan", cfg.scan, "delta | random: search for the largest weak-type ratio");
  maximal->add_option("--count", cfg.count, "random probes");
  maximal->add_option("--seed", cfg.seed, "random seed");
  maximal->add_option("--d", cfg.d, "dimension for the cube bound");
  maximal->add_flag("--bounds", cfg.bounds, "compute constants and check the weak-type bounds");
  maximal->add_option("--constants", cfg.constants_file, "declared constants (key=value file)");
  maximal->add_option("--declare", cfg.declare, "declared constants key=value,...");
  auto* sweep_cmd = app.add_subcommand("sweep", "dimension sweep on lattice cubes");
  sweep_cmd->add_option("--dims", dims, "comma-separated dimensions (may be empty)");
  sweep_cmd->add_option("--hw", cfg.hw, "grid half-width");
  sweep_cmd->add_option("--families", cfg.families, "random families per dimension");
  sweep_cmd->add_option("--seed", cfg.seed, "random seed");
  sweep_cmd->add_option("--budget", cfg.budget, "maximum points per grid");
  sweep_cmd->add_option("--out", cfg.out_dir, "directory for report.kv and sweep.tsv");
  sweep_cmd->add_option("--format", cfg.format, "report | tsv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(Exit::invalid_input);
  }
  cfg.command = app.get_subcommands().front()->get_name();
  if (!dims.empty()) {
    try {
      for (const auto& part : split(dims, ',')) cfg.dims.push_back(std::stoi(part));
    } catch (const std::exception&) {
      err << "error: --dims must be a comma-separated list of integers\n";
      return static_cast<int>(Exit::invalid_input);
    }
  }
  return run(cfg, out, err);
}

}  // namespace covlab::cli
