#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qcs/deformation.hpp"
#include "qcs/errors.hpp"
#include "qcs/exp_class.hpp"

namespace qcs {

// ordered_json keeps insertion order, so emitted reports are reproducible
// byte for byte; plain json would re-sort keys alphabetically.
using Json = nlohmann::ordered_json;

inline Json complex_json(Complex c) {
  return Json{{"re", c.real()}, {"im", c.imag()}};
}

inline Complex complex_from_json(const Json& j) {
  try {
    return {j.at("re").get<double>(), j.at("im").get<double>()};
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("bad complex value: ") + e.what());
  }
}

inline Json exp_class_json(const ExpClassFunction& f) {
  Json prefactor = Json::array();
  for (const auto& t : f.prefactor().terms())
    prefactor.push_back(Json{{"re", t.coeff.real()},
                             {"im", t.coeff.imag()},
                             {"power", t.power},
                             {"freq_re", t.freq.real()},
                             {"freq_im", t.freq.imag()}});
  Json modes = Json::array();
  for (const auto& m : f.modes())
    modes.push_back(Json{{"freq_re", m.freq.real()},
                         {"freq_im", m.freq.imag()},
                         {"amp_re", m.amp.real()},
                         {"amp_im", m.amp.imag()}});
  return Json{{"prefactor", std::move(prefactor)},
              {"quad", complex_json(f.quad())},
              {"lin", complex_json(f.lin())},
              {"const", complex_json(f.cst())},
              {"modes", std::move(modes)}};
}

inline ExpClassFunction exp_class_from_json(const Json& j) {
  try {
    std::vector<PolyFourierTerm> terms;
    for (const auto& t : j.at("prefactor"))
      terms.push_back({Complex(t.at("re").get<double>(), t.at("im").get<double>()),
                       t.at("power").get<int>(),
                       Complex(t.at("freq_re").get<double>(),
                               t.at("freq_im").get<double>())});
    std::vector<PhaseMode> modes;
    for (const auto& m : j.at("modes"))
      modes.push_back({Complex(m.at("freq_re").get<double>(),
                               m.at("freq_im").get<double>()),
                       Complex(m.at("amp_re").get<double>(),
                               m.at("amp_im").get<double>())});
    return ExpClassFunction(PolyFourierSum(std::move(terms)),
                            complex_from_json(j.at("quad")),
                            complex_from_json(j.at("lin")),
                            complex_from_json(j.at("const")), std::move(modes));
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("bad function schema: ") + e.what());
  }
}

inline Json deformation_json(const PeriodicDeformation& d) {
  Json coeffs = Json::array();
  for (const auto& [n, c] : d.coeffs)
    coeffs.push_back(Json{{"n", n}, {"re", c.real()}, {"im", c.imag()}});
  return Json{{"s", d.s}, {"coeffs", std::move(coeffs)}};
}

inline PeriodicDeformation deformation_from_json(const Json& j) {
  PeriodicDeformation d;
  try {
    d.s = j.at("s").get<double>();
    for (const auto& entry : j.at("coeffs"))
      d.coeffs[entry.at("n").get<int>()] =
          Complex(entry.at("re").get<double>(), entry.at("im").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw validation_error(std::string("bad deformation schema: ") + e.what());
  }
  d.validate();
  return d;
}

inline Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot read file: " + path);
  try {
    Json j;
    in >> j;
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw validation_error("cannot parse " + path + ": " + e.what());
  }
}

inline PeriodicDeformation load_deformation(const std::string& path) {
  return deformation_from_json(load_json(path));
}

/** Reports are always two-space indented with a trailing newline; together
 *  with ordered_json this makes repeated runs byte-identical. */
inline std::string dump_report(const Json& j) { return j.dump(2) + "\n"; }

inline void save_json(const Json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw validation_error("cannot write file: " + path);
  out << dump_report(j);
  if (!out) throw validation_error("write failed: " + path);
}

}  // namespace qcs
