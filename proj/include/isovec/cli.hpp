#pragma once

// Command-line front end. run() is what tools/isovec.cpp calls; tests call it
// directly with captured streams.
//
// Exit codes: 0 success, 2 usage error, 3 numerical failure, 4 I/O failure.

#include <cstdint>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "isovec/bounds.hpp"
#include "isovec/errors.hpp"
#include "isovec/io.hpp"
#include "isovec/montecarlo.hpp"
#include "isovec/mvee.hpp"
#include "isovec/reduction.hpp"
#include "isovec/selection.hpp"
#include "isovec/systems.hpp"

namespace isovec::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kNumerical = 3, kIo = 4 };

namespace detail {

using nlohmann::json;

struct Options {
  std::string in;
  std::string out;
  std::string kind;
  std::string sampler;
  std::string probs;
  std::size_t dim = 0;
  std::optional<std::size_t> m;
  std::optional<std::uint64_t> seed;
  std::size_t trials = 0;
  std::size_t threads = 1;
  std::size_t max_iterations = 100000;
  double lambda = 0.5;
  double epsilon = 1e-6;
  double tolerance = 1e-8;
  bool centered = false;
  bool best = false;
};

inline void emit_json(std::ostream& out, const Options& o, const json& j) {
  const std::string text = j.dump(2) + "\n";
  if (!o.out.empty()) io::write_file(o.out, text);
  out << text;
}

inline void emit_csv(std::ostream& out, const Options& o, const ExperimentRecord& r) {
  const std::string text = std::string(io::kExperimentHeader) + "\n" + io::experiment_csv_row(r) + "\n";
  if (!o.out.empty()) io::write_file(o.out, text);
  out << text;
}

inline std::uint64_t require_seed(const Options& o) {
  if (!o.seed) throw InvalidArgument("this command needs an explicit --seed");
  return *o.seed;
}

inline Vector parse_probabilities(const std::string& text) {
  Vector p = io::parse_points_csv(text).front();
  return p;
}

inline void cmd_gen(const Options& o, std::ostream& out) {
  const SystemKind kind = parse_system_kind(o.kind);
  const auto s = generate(kind, o.dim, o.m, o.seed);
  emit_json(out, o, io::to_json(s));
}

inline void cmd_check(const Options& o, std::ostream& out) {
  emit_json(out, o, io::to_json(check(io::load_system(o.in), o.tolerance)));
}

inline void cmd_mvee(const Options& o, std::ostream& out) {
  const auto points = io::load_points(o.in);
  const auto system = john_from_points(points, o.centered, o.epsilon, o.max_iterations);
  json j = io::to_json(system);
  j["centered"] = o.centered;
  j["epsilon"] = o.epsilon;
  emit_json(out, o, j);
}

inline void cmd_reduce(const Options& o, std::ostream& out) {
  const auto system = io::load_system(o.in);
  const auto r = o.centered ? reduce_centered_traced(system) : reduce_isotropic_traced(system);
  json j = io::to_json(r.system);
  j["source_indices"] = r.source_indices;
  emit_json(out, o, j);
}

inline void cmd_select(const Options& o, std::ostream& out) {
  const auto system = io::load_system(o.in);
  json j = io::to_json(dr_select(system));
  j["dr_volume_bound"] = dr_volume_bound(system.dim()).value();
  if (o.best) {
    const auto b = best_subset(system);
    j["best_subset"] = {{"indices", b.indices}, {"det_squared", b.det_squared}};
    j["volume_bound"] = (gamma(system.dim(), system.size()) * dr_volume_bound(system.dim())).value();
  }
  emit_json(out, o, j);
}

inline void cmd_gamma(const Options& o, std::ostream& out) {
  if (!o.m) throw InvalidArgument("gamma needs --m");
  const LogValue g = gamma(o.dim, *o.m);
  const LogValue dr = dr_volume_bound(o.dim);
  emit_json(out, o,
            {{"format_version", io::kFormatVersion}, {"d", o.dim}, {"m", *o.m},
             {"m_bar", capped_m(o.dim, *o.m)}, {"gamma", g.value()}, {"log_gamma", g.log_value},
             {"dr_volume_bound", dr.value()}, {"volume_bound", (g * dr).value()}});
}

inline void cmd_p1(const Options& o, std::ostream& out) {
  Vector p;
  std::size_t d = o.dim;
  if (!o.probs.empty()) {
    p = parse_probabilities(o.probs);
  } else if (!o.in.empty()) {
    const auto s = io::load_system(o.in);
    p = s.probabilities();
    if (d == 0) d = s.dim();
  } else {
    throw InvalidArgument("p1 needs --probs or --in");
  }
  if (d == 0) throw InvalidArgument("p1 needs --dim");
  emit_json(out, o,
            {{"format_version", io::kFormatVersion}, {"d", d}, {"m", p.size()}, {"p1", p1_exact(p, d)},
             {"uniform_bound", p1_uniform(d, p.size()).value()}});
}

inline void cmd_expect(const Options& o, std::ostream& out) {
  const std::uint64_t seed = require_seed(o);
  ExperimentRecord r;
  if (!o.in.empty()) {
    const auto system = io::load_system(o.in);
    r = estimate_expected_det2(Sampler::discrete(system), o.trials, seed, o.threads);
    r.m = system.size();
    // Atoms are scaled by sqrt(d), so the target is d! = d^d * E_unit.
    try {
      const double d = static_cast<double>(system.dim());
      r.exact_reference = exact_expected_det2(system) * std::pow(d, d);
    } catch (const TooLargeError&) {
    }
  } else {
    if (o.dim == 0) throw InvalidArgument("expect needs --system/--in or --sampler with --dim");
    if (o.sampler == "gaussian") {
      r = estimate_expected_det2(Sampler::gaussian(o.dim), o.trials, seed, o.threads);
    } else if (o.sampler == "sphere") {
      r = estimate_expected_det2(Sampler::sphere(o.dim), o.trials, seed, o.threads);
    } else {
      throw InvalidArgument("expect: --sampler must be gaussian or sphere when no system is given");
    }
    r.exact_reference = factorial(o.dim);
  }
  emit_csv(out, o, r);
}

inline void cmd_tail(const Options& o, std::ostream& out) {
  const std::uint64_t seed = require_seed(o);
  const auto system = io::load_system(o.in);
  emit_csv(out, o, tail_probability(system, o.lambda, o.trials, seed, o.threads));
}

}  // namespace detail

/// args excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  using detail::Options;
  Options o;
  CLI::App app{"Isotropic vector systems: John decompositions, volume bounds, random parallelotopes", "isovec"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "isovec 1.0");

  auto seed_opt = [&](CLI::App* c) { c->add_option("--seed", o.seed, "Seed for the pseudorandom streams"); };
  auto in_opt = [&](CLI::App* c, const std::string& what) {
    c->add_option("--in,--system,input", o.in, what)->required();
  };
  auto out_opt = [&](CLI::App* c) { c->add_option("--out", o.out, "Also write the result to this file"); };

  auto* gen = app.add_subcommand("gen", "Generate an isotropic vector system");
  gen->add_option("--kind", o.kind, "simplex, cross or random-frame")
      ->required()
      ->check(CLI::IsMember({"simplex", "cross", "random-frame"}));
  gen->add_option("--dim", o.dim, "Dimension d")->required()->check(CLI::PositiveNumber);
  gen->add_option("--m", o.m, "Number of vectors (random-frame)");
  seed_opt(gen);
  out_opt(gen);

  auto* chk = app.add_subcommand("check", "Report isotropy and centeredness residuals");
  in_opt(chk, "System JSON file");
  chk->add_option("--tolerance", o.tolerance, "Residual tolerance for the flags");
  out_opt(chk);

  auto* mv = app.add_subcommand("mvee", "John decomposition of a point cloud via its enclosing ellipsoid");
  in_opt(mv, "Point cloud CSV file");
  mv->add_option("--epsilon", o.epsilon, "Relative duality gap");
  mv->add_option("--max-iterations", o.max_iterations, "Iteration limit");
  mv->add_flag("--centered", o.centered, "Also enforce centeredness (lifted solve)");
  out_opt(mv);

  auto* red = app.add_subcommand("reduce", "Caratheodory-reduce a system");
  in_opt(red, "System JSON file");
  red->add_flag("--centered", o.centered, "Preserve centeredness too (bound d(d+3)/2)");
  out_opt(red);

  auto* sel = app.add_subcommand("select", "Greedy Dvoretzky-Rogers selection");
  in_opt(sel, "System JSON file");
  sel->add_flag("--best", o.best, "Also enumerate the best d-subset");
  out_opt(sel);

  auto* gam = app.add_subcommand("gamma", "Evaluate gamma(d, m) and the volume bounds");
  gam->add_option("--dim", o.dim, "Dimension d")->required()->check(CLI::PositiveNumber);
  gam->add_option("--m", o.m, "Number of vectors m >= d")->required();
  out_opt(gam);

  auto* p1 = app.add_subcommand("p1", "Probability that d i.i.d. draws are pairwise distinct");
  p1->add_option("--probs", o.probs, "Comma-separated probabilities");
  p1->add_option("--in,--system", o.in, "Use p_i = c_i/d from a system file");
  p1->add_option("--dim", o.dim, "Number of draws d");
  out_opt(p1);

  auto* ex = app.add_subcommand("expect", "Monte Carlo estimate of E[det^2]");
  ex->add_option("--in,--system", o.in, "System JSON file (discrete sampler)");
  ex->add_option("--sampler", o.sampler, "gaussian or sphere when no system is given");
  ex->add_option("--dim", o.dim, "Dimension for --sampler");
  ex->add_option("--trials", o.trials, "Number of trials")->required();
  ex->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
  seed_opt(ex);
  out_opt(ex);

  auto* tl = app.add_subcommand("tail", "Monte Carlo estimate of the large-volume tail probability");
  in_opt(tl, "System JSON file");
  tl->add_option("--lambda", o.lambda, "lambda in (0, 1)");
  tl->add_option("--trials", o.trials, "Number of trials")->required();
  tl->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
  seed_opt(tl);
  out_opt(tl);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (gen->parsed()) detail::cmd_gen(o, out);
    else if (chk->parsed()) detail::cmd_check(o, out);
    else if (mv->parsed()) detail::cmd_mvee(o, out);
    else if (red->parsed()) detail::cmd_reduce(o, out);
    else if (sel->parsed()) detail::cmd_select(o, out);
    else if (gam->parsed()) detail::cmd_gamma(o, out);
    else if (p1->parsed()) detail::cmd_p1(o, out);
    else if (ex->parsed()) detail::cmd_expect(o, out);
    else if (tl->parsed()) detail::cmd_tail(o, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const TooLargeError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kOk;
}

}  // namespace isovec::cli
