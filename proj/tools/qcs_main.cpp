#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qcs/ladder.hpp"
#include "qcs/log.hpp"
#include "qcs/perturbation.hpp"
#include "qcs/riccati.hpp"
#include "qcs/rng.hpp"
#include "qcs/serialize.hpp"
#include "qcs/states.hpp"
#include "qcs/theta_weight.hpp"
#include "qcs/version.hpp"

namespace {

using qcs::Complex;
using qcs::Json;

/** Reports go to stdout always and additionally to a file when requested. */
void emit_report(const Json& report, const std::string& out_path) {
  const std::string text = qcs::dump_report(report);
  std::fputs(text.c_str(), stdout);
  if (!out_path.empty()) qcs::save_json(report, out_path);
}

Json envelope(const char* subcommand, Json config) {
  return Json{{"artifact", qcs::kArtifactName},
              {"version", qcs::kArtifactVersion},
              {"subcommand", subcommand},
              {"config", std::move(config)}};
}

/** The beta file carries its own scale; an explicit --s wins over it. */
qcs::PeriodicDeformation resolve_deformation(const std::string& beta_file,
                                             bool s_given, double s_flag,
                                             double fallback_s) {
  qcs::PeriodicDeformation d;
  if (!beta_file.empty()) {
    d = qcs::load_deformation(beta_file);
    if (s_given && std::abs(d.s - s_flag) > 1e-12 * std::max(1.0, s_flag)) {
      qcs::log::info("--s overrides the scale stored in the beta file");
      d.s = s_flag;
    }
    return d;
  }
  d.s = s_given ? s_flag : fallback_s;
  return d;
}

/** JSON coefficient array in ascending powers: numbers or [re, im] pairs. */
qcs::PolyFourierSum parse_poly_literal(const std::string& text, const char* name) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw qcs::validation_error(std::string(name) + ": " + e.what());
  }
  if (!j.is_array())
    throw qcs::validation_error(std::string(name) + " must be a JSON array");
  std::vector<Complex> cs;
  for (const auto& el : j) {
    if (el.is_number()) {
      cs.emplace_back(el.get<double>(), 0.0);
    } else if (el.is_array() && el.size() == 2 && el[0].is_number() &&
               el[1].is_number()) {
      cs.emplace_back(el[0].get<double>(), el[1].get<double>());
    } else {
      throw qcs::validation_error(std::string(name) +
                                  " entries must be numbers or [re, im] pairs");
    }
  }
  return qcs::PolyFourierSum::from_poly_coeffs(cs);
}

Json poly_json(const qcs::PolyFourierSum& p) {
  Json out = Json::array();
  for (const Complex& c : p.poly_coeffs()) out.push_back(qcs::complex_json(c));
  return out;
}

// ---------------------------------------------------------------- algebra-check

struct AlgebraOpts {
  double s = 0.1;
  bool s_given = false;
  std::string beta_file;
  int samples = 100;
  unsigned long long seed = 0;
  double window = 3.0;
  std::string out;
};

int run_algebra_check(const AlgebraOpts& o) {
  const qcs::PeriodicDeformation d =
      resolve_deformation(o.beta_file, o.s_given, o.s, o.s);
  if (o.samples < 1) throw qcs::validation_error("--samples must be positive");
  if (!(o.window > 0.0)) throw qcs::validation_error("--window must be positive");

  qcs::LadderOperator op;
  op.params = qcs::CSParameters::make(d.s, Complex{}, 0.0);
  op.beta = d;
  op.exact_phase_modes = true;  // keep deformed shifts exact, not series-truncated
  op.window = o.window;
  qcs::warn_if_window_overflows(d, o.window);

  qcs::Rng rng(o.seed);
  Json per_function = Json::array();
  double max_residual = 0.0;
  double sum = 0.0;
  for (int i = 0; i < o.samples; ++i) {
    const qcs::ExpClassSum f{qcs::random_exp_class(rng)};
    const qcs::ExpClassSum out = qcs::apply_q_mutator(op, f);
    const double r = qcs::grid_distance(out, f, -o.window, o.window);
    per_function.push_back(r);
    max_residual = std::max(max_residual, r);
    sum += r;
  }

  Json report = envelope(
      "algebra-check", Json{{"s", d.s},
                            {"beta_file", o.beta_file},
                            {"samples", o.samples},
                            {"seed", o.seed},
                            {"window", o.window}});
  report["max_residual"] = max_residual;
  report["mean_residual"] = sum / o.samples;
  report["per_function"] = std::move(per_function);
  emit_report(report, o.out);
  return 0;
}

// ---------------------------------------------------------------- solve-riccati

struct RiccatiOpts {
  std::string p0 = "[0]";
  std::string p1 = "[0]";
  std::string p2 = "[1]";
  bool numeric_check = false;
  double lo = 0.0;
  double hi = 1.0;
  std::string out;
};

int run_solve_riccati(const RiccatiOpts& o) {
  qcs::RiccatiProblem prob;
  prob.p0 = parse_poly_literal(o.p0, "--p0");
  prob.p1 = parse_poly_literal(o.p1, "--p1");
  prob.p2 = parse_poly_literal(o.p2, "--p2");
  if (!(o.hi > o.lo))
    throw qcs::validation_error("--hi must exceed --lo");

  Json report = envelope("solve-riccati", Json{{"p0", Json::parse(o.p0)},
                                               {"p1", Json::parse(o.p1)},
                                               {"p2", Json::parse(o.p2)},
                                               {"numeric_check", o.numeric_check},
                                               {"lo", o.lo},
                                               {"hi", o.hi}});

  Json candidates = Json::array();
  Json residuals = Json::array();
  std::string kind = "numeric";
  try {
    const qcs::RiccatiSolution sol = qcs::solve_polynomial(prob);
    for (const auto& c : sol.candidates) {
      candidates.push_back(Json{{"coeffs", poly_json(c.z)},
                                {"residual", c.residual},
                                {"verified", c.verified}});
      residuals.push_back(c.residual);
    }
    switch (sol.kind) {
      case qcs::RiccatiSolutionKind::polynomial_pair: kind = "polynomial_pair"; break;
      case qcs::RiccatiSolutionKind::constant_particular: kind = "constant_particular"; break;
      case qcs::RiccatiSolutionKind::quadrature_general: kind = "quadrature_general"; break;
      case qcs::RiccatiSolutionKind::numeric: kind = "numeric"; break;
    }
  } catch (const qcs::no_polynomial_solution&) {
    kind = "no_polynomial_solution";
  }

  const std::vector<Complex> constants = qcs::find_constant_solutions(prob);
  Json constants_json = Json::array();
  for (const Complex& c : constants) constants_json.push_back(qcs::complex_json(c));

  Json quadrature = Json::array();
  if (o.numeric_check) {
    for (const Complex& c : constants) {
      const Complex u0 = qcs::pole_free_u0(prob, c, o.lo, o.hi);
      const qcs::QuadratureTrajectory traj =
          qcs::solve_by_quadrature(prob, c, o.lo, o.hi, 801, u0);
      // RK4 on a 10x finer step so every quadrature node is a shared point
      const double fine = (o.hi - o.lo) / 8000.0;
      const auto rk = qcs::rk4_path(
          [&](double x, Complex z) {
            const Complex cx(x, 0.0);
            return prob.p2.evaluate(cx) * z * z + prob.p1.evaluate(cx) * z +
                   prob.p0.evaluate(cx);
          },
          traj.z0, o.lo, o.hi, fine);
      double dev = 0.0;
      for (std::size_t i = 0; i < traj.xs.size(); ++i)
        dev = std::max(dev, std::abs(traj.zs[i] - rk[i * 10].second));
      quadrature.push_back(Json{{"c", qcs::complex_json(c)},
                                {"u0", qcs::complex_json(u0)},
                                {"max_deviation", dev}});
    }
  }

  report["kind"] = kind;
  report["candidates"] = std::move(candidates);
  report["residuals"] = std::move(residuals);
  report["constants"] = std::move(constants_json);
  report["quadrature"] = std::move(quadrature);
  emit_report(report, o.out);
  return 0;
}

// -------------------------------------------------------------------- build-cs

struct BuildCsOpts {
  double s = 0.1;
  bool s_given = false;
  double delta = -2.0;
  double delta_im = 0.0;
  double omega = 0.0;
  std::string branch = "minus";
  std::string beta_file;
  double window = 3.0;
  std::string audit;
};

int run_build_cs(const BuildCsOpts& o) {
  if (o.branch != "plus" && o.branch != "minus")
    throw qcs::validation_error("--branch must be plus or minus");
  const qcs::PeriodicDeformation d =
      resolve_deformation(o.beta_file, o.s_given, o.s, o.s);
  const qcs::CSParameters p =
      qcs::CSParameters::make(d.s, Complex(o.delta, o.delta_im), o.omega);
  const qcs::CSConstruction cs = qcs::build_states(p, d, o.window);
  const bool plus = o.branch == "plus";

  Json report = envelope(
      "build-cs", Json{{"s", d.s},
                       {"delta", qcs::complex_json(p.delta)},
                       {"omega", o.omega},
                       {"branch", o.branch},
                       {"beta_file", o.beta_file},
                       {"window", o.window}});
  report["S_agreement"] = cs.audit.s_form_agreement;
  report["discriminant_residual"] = cs.audit.discriminant_abs;
  report["riccati_residual"] =
      plus ? cs.audit.riccati_residual_plus : cs.audit.riccati_residual_minus;
  report["eigen_residual_grid"] =
      plus ? cs.audit.eigen_residual_plus : cs.audit.eigen_residual_minus;
  report["gamma"] = Json{{"plus", qcs::complex_json(cs.spectral.gamma_plus)},
                         {"minus", qcs::complex_json(cs.spectral.gamma_minus)}};
  report["lambda_s"] = qcs::complex_json(cs.spectral.lambda_s);
  report["square_agreement"] = cs.audit.square_agreement;
  report["constraint_max_coeff"] = cs.audit.constraint_max_coeff;
  report["assembly_agreement"] = plus ? cs.audit.assembly_agreement_plus
                                      : cs.audit.assembly_agreement_minus;
  report["state"] = qcs::exp_class_json(plus ? cs.state_plus : cs.state_minus);
  emit_report(report, o.audit);
  return 0;
}

// ------------------------------------------------------------- perturb-compare

struct PerturbOpts {
  std::string s_list = "0.2,0.1,0.05";
  double delta = -2.0;
  double delta_im = 0.0;
  double omega = 0.0;
  std::string beta_file;
  double window = 2.0;
  std::string out;
};

std::vector<double> parse_s_list(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t next = text.find(',', pos);
    if (next == std::string::npos) next = text.size();
    const std::string piece = text.substr(pos, next - pos);
    try {
      std::size_t used = 0;
      const double v = std::stod(piece, &used);
      if (used != piece.size()) throw std::invalid_argument(piece);
      out.push_back(v);
    } catch (const std::exception&) {
      throw qcs::validation_error("--s-list entry is not a number: " + piece);
    }
    pos = next + 1;
  }
  return out;
}

int run_perturb_compare(const PerturbOpts& o) {
  const std::vector<double> s_values = parse_s_list(o.s_list);
  std::map<int, Complex> coeffs;
  if (!o.beta_file.empty()) {
    const qcs::PeriodicDeformation d = qcs::load_deformation(o.beta_file);
    coeffs = d.coeffs;
    qcs::log::info("beta file scale ignored; --s-list drives the sweep");
  }
  const Complex delta(o.delta, o.delta_im);

  const qcs::ConvergenceStudy study =
      qcs::convergence_study(delta, o.omega, s_values, coeffs, o.window);

  double residual0 = 0.0;
  double residual1 = 0.0;
  for (double s : s_values) {
    qcs::PeriodicDeformation d;
    d.s = s;
    d.coeffs = coeffs;
    const qcs::CSParameters p = qcs::CSParameters::make(s, delta, o.omega);
    const qcs::PerturbativeState pert = qcs::build_perturbative(p, d, o.window);
    residual0 = std::max(residual0, pert.residual0);
    residual1 = std::max(residual1, pert.residual1);
  }

  Json errors_by_s = Json::array();
  for (std::size_t i = 0; i < study.s_values.size(); ++i)
    errors_by_s.push_back(
        Json{{"s", study.s_values[i]}, {"error", study.errors[i]}});

  Json report = envelope(
      "perturb-compare", Json{{"s_list", o.s_list},
                              {"delta", qcs::complex_json(delta)},
                              {"omega", o.omega},
                              {"beta_file", o.beta_file},
                              {"window", o.window}});
  report["residual0"] = residual0;
  report["residual1"] = residual1;
  report["errors_by_s"] = std::move(errors_by_s);
  report["fitted_order"] = study.fit.slope;
  report["fit"] = Json{{"slope", study.fit.slope},
                       {"intercept", study.fit.intercept},
                       {"half_width_95", study.fit.half_width_95}};
  emit_report(report, o.out);
  return 0;
}

// ----------------------------------------------------------------- unity-check

struct UnityOpts {
  double s = 1.0;
  bool s_given = false;
  double delta = -2.0;
  double delta_im = 0.0;
  double omega = 0.0;
  std::string beta_file;
  std::string reparam = "on";
  double window = 3.0;
  unsigned long long seed = 0;
  int m_max = 8;
  std::string out;
  std::string csv;
};

void write_sigma_csv(const std::string& path, const qcs::CSConstruction& cs,
                     const qcs::WeightFunction& w) {
  std::ofstream outf(path);
  if (!outf) throw qcs::validation_error("cannot write file: " + path);
  outf << "t,sigma_lattice,sigma_closed,re_lambda,im_lambda\n";
  const qcs::ExpClassFunction state = qcs::t_representation(cs);
  char buf[256];
  for (int k = 0; k <= 100; ++k) {
    const double t = -M_PI + 2.0 * M_PI * k / 100.0;
    const Complex lam = state.evaluate(Complex(t, 0.0));
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", t,
                  qcs::sigma_lattice(w, t), qcs::sigma_closed(w, t), lam.real(),
                  lam.imag());
    outf << buf;
  }
  if (!outf) throw qcs::validation_error("write failed: " + path);
}

int run_unity_check(const UnityOpts& o) {
  if (o.reparam != "on" && o.reparam != "off")
    throw qcs::validation_error("--reparam must be on or off");
  const qcs::PeriodicDeformation d =
      resolve_deformation(o.beta_file, o.s_given, o.s, o.s);
  const qcs::CSParameters p =
      qcs::CSParameters::make(d.s, Complex(o.delta, o.delta_im), o.omega);
  const qcs::CSConstruction cs = qcs::build_states(p, d, o.window);
  const qcs::WeightFunction w = qcs::make_weight(cs, o.reparam == "on");

  double sigma_max_rel_err = 0.0;
  for (int k = 0; k <= 40; ++k) {
    const double t = -M_PI + 2.0 * M_PI * k / 40.0;
    const double lattice = qcs::sigma_lattice(w, t);
    sigma_max_rel_err = std::max(
        sigma_max_rel_err, std::abs(qcs::sigma_closed(w, t) - lattice) / lattice);
  }

  // quasi-periodicity of the underlying theta series at seeded sample points
  qcs::Rng rng(o.seed);
  double theta_identity_err = 0.0;
  const Complex I(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const Complex z(rng.uniform(-1.5, 1.5), rng.uniform(-1.0, 1.0));
    const Complex tau(rng.uniform(-1.0, 1.0), rng.uniform(0.5, 20.0));
    const Complex base = qcs::theta3(z, tau);
    const double shift_err =
        std::abs(qcs::theta3(z + M_PI, tau) - base) / std::abs(base);
    const Complex jump = std::exp(-I * M_PI * tau - 2.0 * I * z) * base;
    const double jump_err =
        std::abs(qcs::theta3(z + M_PI * tau, tau) - jump) / std::abs(jump);
    theta_identity_err = std::max({theta_identity_err, shift_err, jump_err});
  }

  const Complex unity = qcs::unity_integral(cs, w);
  const double norm = qcs::normalization(cs, w);
  const qcs::FoldReport fold = qcs::fold_consistency(cs, w, o.m_max);

  Json report = envelope(
      "unity-check", Json{{"s", d.s},
                          {"delta", qcs::complex_json(p.delta)},
                          {"omega", o.omega},
                          {"beta_file", o.beta_file},
                          {"reparam", o.reparam},
                          {"window", o.window},
                          {"seed", o.seed},
                          {"m_max", o.m_max}});
  report["sigma_max_rel_err"] = sigma_max_rel_err;
  report["theta_identity_err"] = theta_identity_err;
  report["unity_scalar"] = unity.real();
  report["unity_imag"] = unity.imag();
  report["normalization"] = norm;
  report["fold_agreement"] = fold.agreement;
  report["fold"] = Json{{"direct", fold.direct},
                        {"folded", fold.folded},
                        {"agreement", fold.agreement},
                        {"tail", fold.tail},
                        {"m_max", fold.m_max},
                        {"tail_decaying", fold.tail_decaying}};
  emit_report(report, o.out);
  if (!o.csv.empty()) write_sigma_csv(o.csv, cs, w);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weak q-deformed coherent state construction and verification"};
  app.require_subcommand(1);

  AlgebraOpts al;
  auto* algebra = app.add_subcommand(
      "algebra-check", "residuals of the exact ladder commutation identity");
  algebra->add_option("--s", al.s, "deformation scale")
      ->each([&al](const std::string&) { al.s_given = true; });
  algebra->add_option("--beta-file", al.beta_file, "deformation JSON file");
  algebra->add_option("--samples", al.samples, "number of random functions");
  algebra->add_option("--seed", al.seed, "random seed");
  algebra->add_option("--window", al.window, "evaluation half-window");
  algebra->add_option("--out", al.out, "report path (stdout always)");

  RiccatiOpts ric;
  auto* riccati = app.add_subcommand(
      "solve-riccati", "closed-form Riccati solutions with numeric cross-check");
  riccati->add_option("--p0", ric.p0, "coefficients, ascending powers");
  riccati->add_option("--p1", ric.p1, "coefficients, ascending powers");
  riccati->add_option("--p2", ric.p2, "coefficients, ascending powers");
  riccati->add_flag("--numeric-check", ric.numeric_check,
                    "verify constant-seeded quadrature against RK4");
  riccati->add_option("--lo", ric.lo, "check interval start");
  riccati->add_option("--hi", ric.hi, "check interval end");
  riccati->add_option("--out", ric.out, "report path (stdout always)");

  BuildCsOpts bc;
  auto* build = app.add_subcommand(
      "build-cs", "construct eigenstates and audit every closure identity");
  build->add_option("--s", bc.s, "deformation scale")
      ->each([&bc](const std::string&) { bc.s_given = true; });
  build->add_option("--delta", bc.delta, "ordering parameter, real part");
  build->add_option("--delta-im", bc.delta_im, "ordering parameter, imag part");
  build->add_option("--omega", bc.omega, "frequency");
  build->add_option("--branch", bc.branch, "plus or minus");
  build->add_option("--beta-file", bc.beta_file, "deformation JSON file");
  build->add_option("--window", bc.window, "evaluation half-window");
  build->add_option("--audit", bc.audit, "audit report path (stdout always)");

  PerturbOpts pe;
  auto* perturb = app.add_subcommand(
      "perturb-compare", "order-0/1 expansion vs the full state over an s sweep");
  perturb->add_option("--s-list", pe.s_list, "comma-separated scales");
  perturb->add_option("--delta", pe.delta, "ordering parameter, real part");
  perturb->add_option("--delta-im", pe.delta_im, "ordering parameter, imag part");
  perturb->add_option("--omega", pe.omega, "frequency");
  perturb->add_option("--beta-file", pe.beta_file,
                      "deformation JSON file (scale ignored)");
  perturb->add_option("--window", pe.window, "comparison half-window");
  perturb->add_option("--out", pe.out, "report path (stdout always)");

  UnityOpts un;
  auto* unity = app.add_subcommand(
      "unity-check", "theta weight identities and the resolution-of-unity scalar");
  unity->add_option("--s", un.s, "deformation scale")
      ->each([&un](const std::string&) { un.s_given = true; });
  unity->add_option("--delta", un.delta, "ordering parameter, real part");
  unity->add_option("--delta-im", un.delta_im, "ordering parameter, imag part");
  unity->add_option("--omega", un.omega, "frequency");
  unity->add_option("--beta-file", un.beta_file, "deformation JSON file");
  unity->add_option("--reparam", un.reparam, "lattice convention: on or off");
  unity->add_option("--window", un.window, "state evaluation half-window");
  unity->add_option("--seed", un.seed, "random seed");
  unity->add_option("--m-max", un.m_max, "folding truncation band");
  unity->add_option("--out", un.out, "report path (stdout always)");
  unity->add_option("--csv", un.csv, "weight/state series CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // parse problems are validation failures
  }

  try {
    if (algebra->parsed()) return run_algebra_check(al);
    if (riccati->parsed()) return run_solve_riccati(ric);
    if (build->parsed()) return run_build_cs(bc);
    if (perturb->parsed()) return run_perturb_compare(pe);
    if (unity->parsed()) return run_unity_check(un);
  } catch (const qcs::validation_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const qcs::pole_error& e) {
    std::fprintf(stderr, "numeric failure: %s (near %g)\n", e.what(), e.where());
    return 3;
  } catch (const qcs::numeric_error& e) {
    std::fprintf(stderr, "numeric failure: %s (magnitude %g)\n", e.what(),
                 e.magnitude());
    return 3;
  }
  return 2;
}
