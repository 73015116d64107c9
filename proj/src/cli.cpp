#include "swavg/cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "swavg/format.hpp"
#include "swavg/hyperbolicity.hpp"
#include "swavg/integrator.hpp"
#include "swavg/orbits.hpp"
#include "swavg/sw_system.hpp"
#include "swavg/verification.hpp"

namespace swavg::cli {

namespace {

using nlohmann::json;

struct Rendered {
  std::string text;
  std::string notes;  // diagnostics for the error stream
  int code = kSuccess;
};

struct Global {
  std::uint64_t seed = 0;
  std::string format = "csv";
  std::string output;
  bool json() const { return format == "json"; }
};

std::string dump(const json& j) { return j.dump(2) + "\n"; }

PlanarPoint to_point(const std::vector<double>& v, const char* flag) {
  if (v.size() != 2) throw InputError(std::string(flag) + " expects two numbers x,y");
  return {v[0], v[1]};
}

// Each command: register options, then a callback producing the output.
using Runner = std::function<Rendered(const Global&)>;

Runner add_table1(CLI::App& app) {
  auto* cmd = app.add_subcommand("table1", "kappa thresholds for hyperbolicity on B(0, r0)");
  auto r0 = std::make_shared<std::vector<double>>(std::vector<double>{1.0, 10.0, 100.0});
  cmd->add_option("--r0", *r0, "ball radii (>= 1)")->delimiter(',')->capture_default_str();
  return [r0](const Global& g) {
    for (double r : *r0) {
      if (!(r >= 1.0)) throw InputError("--r0 values must be >= 1");
    }
    const auto rows = table1(*r0);
    Rendered out;
    if (g.json()) {
      json arr = json::array();
      for (const auto& row : rows) {
        arr.push_back({{"r0", row.r0},
                       {"kappa_min", row.kappa_min},
                       {"paper_value", row.reference ? json(*row.reference) : json(nullptr)},
                       {"relative_diff", row.relative_diff ? json(*row.relative_diff) : json(nullptr)},
                       {"discrepancy", row.discrepancy}});
      }
      out.text = dump(arr);
    } else {
      std::ostringstream s;
      s << "r0,kappa_min,paper_value,relative_diff,discrepancy\n";
      for (const auto& row : rows) {
        s << fmt_real(row.r0) << ',' << fmt_real(row.kappa_min) << ','
          << (row.reference ? fmt_real(*row.reference) : "") << ','
          << (row.relative_diff ? fmt_real(*row.relative_diff) : "") << ','
          << (row.discrepancy ? "true" : "false") << '\n';
      }
      out.text = s.str();
    }
    return out;
  };
}

Runner add_bounds(CLI::App& app) {
  auto* cmd = app.add_subcommand("bounds", "closed-form C0 and C1 averaging error bounds");
  auto args = std::make_shared<std::array<double, 3>>();
  cmd->add_option("--r", (*args)[0], "enclosure radius R")->required();
  cmd->add_option("--kappa", (*args)[1], "forcing frequency")->required();
  cmd->add_option("--t", (*args)[2], "time in [0, 1/(4R^2)]")->required();
  return [args](const Global& g) {
    const auto [R, kappa, t] = *args;
    const double c0 = c0_error_closed(t, R, kappa);
    const double c1 = c1_error_closed(t, R, kappa);
    Rendered out;
    if (g.json()) {
      out.text = dump({{"R", R}, {"kappa", kappa}, {"t", t}, {"c0_error", c0}, {"c1_error", c1}});
    } else {
      out.text = "c0_error,c1_error\n" + fmt_real(c0) + "," + fmt_real(c1) + "\n";
    }
    return out;
  };
}

struct SimulateArgs {
  double kappa = 0.0;
  std::vector<double> z0;
  double t0 = 0.0;
  double T = 0.0;
  bool variational = false;
  IntegratorConfig cfg;
};

void add_integrator_flags(CLI::App* cmd, IntegratorConfig& cfg) {
  cmd->add_option("--rel-tol", cfg.rel_tol, "relative tolerance")->capture_default_str();
  cmd->add_option("--abs-tol", cfg.abs_tol, "absolute tolerance")->capture_default_str();
  cmd->add_option("--blowup-norm", cfg.blowup_norm, "blow-up threshold on |z|")
      ->capture_default_str();
}

Runner add_simulate(CLI::App& app) {
  auto* cmd = app.add_subcommand("simulate", "integrate the equation (and its variational equation)");
  auto a = std::make_shared<SimulateArgs>();
  cmd->add_option("--kappa", a->kappa, "forcing frequency")->required();
  cmd->add_option("--z0", a->z0, "initial point x,y")->delimiter(',')->required();
  cmd->add_option("--t0", a->t0, "initial time")->capture_default_str();
  cmd->add_option("--T", a->T, "signed duration")->required();
  cmd->add_flag("--variational", a->variational, "co-integrate the monodromy");
  add_integrator_flags(cmd, a->cfg);
  return [a](const Global& g) {
    const PlanarPoint z0 = to_point(a->z0, "--z0");
    validate(SWParams{a->kappa});
    validate(a->cfg);
    const auto r = a->variational ? integrate_variational(a->t0, z0, a->T, SWParams{a->kappa}, a->cfg)
                                  : integrate(a->t0, z0, a->T, SWParams{a->kappa}, a->cfg);
    Rendered out;
    out.text = g.json() ? dump(json(r)) : trajectory_csv(r);
    out.code = r.outcome == Outcome::Completed ? kSuccess
               : r.outcome == Outcome::BlewUp  ? kNegative
                                               : kNumerical;
    return out;
  };
}

struct CertifyArgs {
  double r0 = 0.0;
  double kappa = 0.0;
  bool empirical = false;
  std::size_t pairs = 1000;
  std::size_t offsets = 8;
  IntegratorConfig cfg;
};

Runner add_certify(CLI::App& app) {
  auto* cmd = app.add_subcommand("certify", "hyperbolicity certificate on B(0, r0)");
  auto a = std::make_shared<CertifyArgs>();
  cmd->add_option("--r0", a->r0, "ball radius (>= 1)")->required();
  cmd->add_option("--kappa", a->kappa, "forcing frequency")->required();
  cmd->add_flag("--empirical", a->empirical, "also sample the cone conditions numerically");
  cmd->add_option("--pairs", a->pairs, "sampled pairs")->capture_default_str();
  cmd->add_option("--offsets", a->offsets, "time offsets j")->capture_default_str();
  add_integrator_flags(cmd, a->cfg);
  return [a](const Global& g) {
    const auto cert = certify(a->r0, a->kappa);
    validate(a->cfg);
    Rendered out;
    out.code = cert.valid ? kSuccess : kNegative;
    if (!a->empirical) {
      if (g.json()) {
        out.text = dump(json(cert));
      } else {
        std::ostringstream s;
        s << "r0,R,h,kappa,kappa_threshold,b_tilde_cap,delta_bound,xi_lower,mu_upper,valid\n"
          << fmt_real(cert.r0) << ',' << fmt_real(cert.R) << ',' << fmt_real(cert.h) << ','
          << fmt_real(cert.kappa) << ',' << fmt_real(kappa_threshold(cert.r0)) << ','
          << fmt_real(cert.b_tilde_cap) << ',' << fmt_real(cert.delta_bound) << ','
          << fmt_real(cert.xi_lower) << ',' << fmt_real(cert.mu_upper) << ','
          << (cert.valid ? "true" : "false") << '\n';
        out.text = s.str();
      }
      return out;
    }
    const auto rep = empirical_hyperbolicity_check(a->r0, a->kappa, a->pairs, a->offsets, g.seed, a->cfg);
    if (rep.total_violations() > 0 || rep.integration_failures > 0) out.code = kNegative;
    if (g.json()) {
      out.text = dump(json(rep));
    } else {
      std::ostringstream s;
      s << "r0,kappa,valid,xi_lower,mu_upper,pairs,offsets,invariance_violations,"
           "expansion_violations,contraction_violations,integration_failures,"
           "min_expansion_ratio,max_contraction_ratio\n"
        << fmt_real(cert.r0) << ',' << fmt_real(cert.kappa) << ',' << (cert.valid ? "true" : "false")
        << ',' << fmt_real(cert.xi_lower) << ',' << fmt_real(cert.mu_upper) << ',' << rep.pairs
        << ',' << rep.offsets << ',' << rep.invariance_violations << ','
        << rep.expansion_violations << ',' << rep.contraction_violations << ','
        << rep.integration_failures << ',' << fmt_real(rep.min_expansion_ratio) << ','
        << fmt_real(rep.max_contraction_ratio) << '\n';
      out.text = s.str();
    }
    return out;
  };
}

struct EscapeArgs {
  double kappa = 0.0;
  std::vector<double> z0;
  double t0 = 0.0;
  IntegratorConfig cfg;
};

Runner add_escape(CLI::App& app) {
  auto* cmd = app.add_subcommand("escape", "finite-time escape threshold and certification");
  auto a = std::make_shared<EscapeArgs>();
  cmd->add_option("--kappa", a->kappa, "forcing frequency (> 0)")->required();
  cmd->add_option("--z0", a->z0, "initial point x,y")->delimiter(',')->required();
  cmd->add_option("--t0", a->t0, "initial time")->capture_default_str();
  add_integrator_flags(cmd, a->cfg);
  return [a](const Global& g) {
    const PlanarPoint z0 = to_point(a->z0, "--z0");
    escape_threshold(a->kappa);
    validate(a->cfg);
    const auto r = certify_escape(z0, a->t0, a->kappa, a->cfg);
    Rendered out;
    out.code = r.kind == EscapeKind::NoEscapeDetected ? kNegative : kSuccess;
    if (g.json()) {
      json j = r;
      j["z0"] = {z0.x(), z0.y()};
      j["above_threshold"] = z0.squaredNorm() >= r.prediction.norm_sq_threshold;
      out.text = dump(j);
    } else {
      std::ostringstream s;
      s << "kind,time,horizon,delta,t1,norm_sq_threshold,above_threshold\n"
        << to_string(r.kind) << ',' << fmt_real(r.time) << ',' << fmt_real(r.horizon) << ','
        << fmt_real(r.prediction.delta) << ',' << fmt_real(r.prediction.t1) << ','
        << fmt_real(r.prediction.norm_sq_threshold) << ','
        << (z0.squaredNorm() >= r.prediction.norm_sq_threshold ? "true" : "false") << '\n';
      out.text = s.str();
    }
    return out;
  };
}

struct PeriodicArgs {
  std::vector<double> kappas{5.0};
  std::vector<double> guess;
  double t0 = 0.0;
  std::size_t angles = 16;
  IntegratorConfig cfg;
};

Runner add_periodic(CLI::App& app) {
  auto* cmd = app.add_subcommand("periodic", "search for nonzero 2 pi / kappa periodic orbits");
  auto a = std::make_shared<PeriodicArgs>();
  a->cfg.rel_tol = 1e-12;
  a->cfg.abs_tol = 1e-14;
  cmd->add_option("--kappa", a->kappas, "forcing frequencies")->delimiter(',')->capture_default_str();
  cmd->add_option("--guess", a->guess, "initial guess x,y (default: circle search)")->delimiter(',');
  cmd->add_option("--t0", a->t0, "section time")->capture_default_str();
  cmd->add_option("--angles", a->angles, "guesses on the search circle")->capture_default_str();
  add_integrator_flags(cmd, a->cfg);
  return [a](const Global& g) {
    std::optional<PlanarPoint> guess;
    if (!a->guess.empty()) guess = to_point(a->guess, "--guess");
    for (double k : a->kappas) validate(SWParams{k});
    validate(a->cfg);

    std::vector<PeriodicOrbit> found;
    json results = json::array();
    std::ostringstream csv, failures;
    csv << "kappa,min_norm,max_norm,residual\n";
    for (double k : a->kappas) {
      const auto s = guess ? find_periodic_orbit(k, *guess, a->t0, a->cfg)
                           : search_periodic_orbit(k, a->t0, a->angles, a->cfg);
      if (s.orbit) {
        found.push_back(*s.orbit);
        csv << fmt_real(k) << ',' << fmt_real(s.orbit->min_norm) << ','
            << fmt_real(s.orbit->max_norm) << ',' << fmt_real(s.orbit->residual) << '\n';
        results.push_back({{"kappa", k}, {"orbit", *s.orbit}, {"bounds", norm_bounds_check(*s.orbit)}});
      } else {
        results.push_back({{"kappa", k}, {"orbit", nullptr}, {"failure", s.failure}});
        failures << "kappa " << fmt_real(k) << ": " << s.failure << "\n";
      }
    }
    const auto fit = fit_norm_exponent(found);
    Rendered out;
    out.code = found.empty() ? kNegative : kSuccess;
    out.notes = failures.str();
    if (g.json()) {
      out.text = dump({{"results", results},
                       {"exponent", fit.exponent ? json(*fit.exponent) : json(nullptr)},
                       {"exponent_in_range", fit.in_range},
                       {"note", fit.note}});
    } else {
      out.text = csv.str();
    }
    return out;
  };
}

Runner add_scaling(CLI::App& app) {
  auto* cmd = app.add_subcommand("scaling", "growth exponent of the kappa threshold in r0");
  auto args = std::make_shared<std::tuple<double, double, std::size_t>>(10.0, 1000.0, 20);
  cmd->add_option("--r0-min", std::get<0>(*args), "smallest radius")->capture_default_str();
  cmd->add_option("--r0-max", std::get<1>(*args), "largest radius")->capture_default_str();
  cmd->add_option("--points", std::get<2>(*args), "grid size")->capture_default_str();
  return [args](const Global& g) {
    const auto [lo, hi, n] = *args;
    const double slope = scaling_exponent(lo, hi, n);
    Rendered out;
    if (g.json()) {
      out.text = dump({{"r0_min", lo}, {"r0_max", hi}, {"points", n}, {"slope", slope}});
    } else {
      out.text = "r0_min,r0_max,points,slope\n" + fmt_real(lo) + "," + fmt_real(hi) + "," +
                 std::to_string(n) + "," + fmt_real(slope) + "\n";
    }
    return out;
  };
}

Runner add_verify(CLI::App& app) {
  auto* cmd = app.add_subcommand("verify", "run the lemma-verification suites");
  auto opts = std::make_shared<VerifyOptions>();
  cmd->add_option("--samples", opts->samples, "random samples per suite")->capture_default_str();
  return [opts](const Global& g) {
    if (opts->samples == 0) throw InputError("--samples must be positive");
    VerifyOptions o = *opts;
    o.seed = g.seed;
    const auto results = run_verification(o);
    Rendered out;
    bool all = true;
    json arr = json::array();
    std::ostringstream csv;
    csv << "suite,passed,detail\n";
    for (const auto& r : results) {
      all = all && r.passed;
      arr.push_back({{"suite", r.name}, {"passed", r.passed}, {"detail", r.detail}});
      csv << r.name << ',' << (r.passed ? "true" : "false") << ",\"" << r.detail << "\"\n";
    }
    out.code = all ? kSuccess : kNegative;
    out.text = g.json() ? dump({{"suites", arr}, {"all_passed", all}}) : csv.str();
    return out;
  };
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Averaging bounds, hyperbolicity certificates and blow-up checks for "
               "z' = conj(z)(1 + |z|^2 exp(i kappa t))",
               "swavg"};
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_option("--seed", g.seed, "random seed")->capture_default_str();
  app.add_option("--format", g.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_option("--output", g.output, "output file (default: standard output)");

  std::vector<std::pair<CLI::App*, Runner>> commands;
  auto reg = [&](Runner r) { commands.emplace_back(app.get_subcommands({}).back(), std::move(r)); };
  reg(add_table1(app));
  reg(add_bounds(app));
  reg(add_simulate(app));
  reg(add_certify(app));
  reg(add_escape(app));
  reg(add_periodic(app));
  reg(add_scaling(app));
  reg(add_verify(app));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kUsage;
  }

  Rendered rendered;
  try {
    for (auto& [sub, runner] : commands) {
      if (sub->parsed()) rendered = runner(g);
    }
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const IntegrationError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  }

  err << rendered.notes;
  if (g.output.empty()) {
    out << rendered.text;
  } else {
    std::ofstream f(g.output, std::ios::binary);
    if (!f) {
      err << "error: cannot open " << g.output << "\n";
      return kUsage;
    }
    f << rendered.text;
  }
  return rendered.code;
}

}  // namespace swavg::cli
