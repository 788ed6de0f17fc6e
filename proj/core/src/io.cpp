#include "strh2/io.hpp"

#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "strh2/errors.hpp"

namespace strh2 {

using nlohmann::json;

namespace {

json real_matrix_to_json(const RMat& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json complex_matrix_to_json(const CMat& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

json complex_vector_to_json(const CVec& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(json::array({v(i).real(), v(i).imag()}));
  return arr;
}

RMat real_matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ParseError("expected a nonempty matrix");
  const Index rows = static_cast<Index>(j.size());
  const Index cols = static_cast<Index>(j.at(0).size());
  RMat m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const json& row = j.at(static_cast<size_t>(i));
    if (static_cast<Index>(row.size()) != cols) throw ParseError("ragged matrix");
    for (Index c = 0; c < cols; ++c) {
      const json& entry = row.at(static_cast<size_t>(c));
      if (entry.is_number()) {
        m(i, c) = entry.get<double>();
      } else if (entry.is_array() && entry.size() == 2) {
        if (std::abs(entry.at(1).get<double>()) > 0.0)
          throw ParseError("matrix must be real-valued here");
        m(i, c) = entry.at(0).get<double>();
      } else {
        throw ParseError("matrix entries are numbers or [re, im] pairs");
      }
    }
  }
  return m;
}

CMat complex_matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ParseError("expected a nonempty matrix");
  const Index rows = static_cast<Index>(j.size());
  const Index cols = static_cast<Index>(j.at(0).size());
  CMat m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const json& row = j.at(static_cast<size_t>(i));
    if (static_cast<Index>(row.size()) != cols) throw ParseError("ragged matrix");
    for (Index c = 0; c < cols; ++c) {
      const json& entry = row.at(static_cast<size_t>(c));
      if (entry.is_number()) {
        m(i, c) = Complex(entry.get<double>(), 0.0);
      } else if (entry.is_array() && entry.size() == 2) {
        m(i, c) = Complex(entry.at(0).get<double>(), entry.at(1).get<double>());
      } else {
        throw ParseError("matrix entries are numbers or [re, im] pairs");
      }
    }
  }
  return m;
}

CVec complex_vector_from_json(const json& j) {
  if (!j.is_array()) throw ParseError("expected a vector");
  CVec v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i) {
    const json& entry = j.at(static_cast<size_t>(i));
    if (entry.is_number()) {
      v(i) = Complex(entry.get<double>(), 0.0);
    } else if (entry.is_array() && entry.size() == 2) {
      v(i) = Complex(entry.at(0).get<double>(), entry.at(1).get<double>());
    } else {
      throw ParseError("vector entries are numbers or [re, im] pairs");
    }
  }
  return v;
}

json terms_to_json(const std::vector<std::pair<CoefficientFunction, CMat>>& terms) {
  json arr = json::array();
  for (const auto& [f, m] : terms) arr.push_back(json::array({f.to_json(), complex_matrix_to_json(m)}));
  return arr;
}

std::vector<std::pair<CoefficientFunction, CMat>> terms_from_json(const json& j) {
  std::vector<std::pair<CoefficientFunction, CMat>> terms;
  for (const auto& entry : j) {
    if (!entry.is_array() || entry.size() != 2) throw ParseError("terms are [coefficient, matrix] pairs");
    terms.emplace_back(CoefficientFunction::from_json(entry.at(0)), complex_matrix_from_json(entry.at(1)));
  }
  return terms;
}

bool is_diagonal(const CMat& m) {
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      if (i != j && m(i, j) != Complex(0.0, 0.0)) return false;
  return m.rows() == m.cols();
}

bool constant_one(const CoefficientFunction& f) {
  std::vector<Complex> coeffs;
  if (!f.polynomial_coefficients(&coeffs)) return false;
  if (coeffs.empty() || coeffs[0] != Complex(1.0, 0.0)) return false;
  for (size_t k = 1; k < coeffs.size(); ++k)
    if (coeffs[k] != Complex(0.0, 0.0)) return false;
  return true;
}

}  // namespace

json model_to_json(const ModelAny& model) {
  json j;
  if (const auto* fom = std::get_if<StateSpaceFOM>(&model)) {
    j["kind"] = "state_space";
    j["E"] = real_matrix_to_json(fom->E);
    j["A"] = real_matrix_to_json(fom->A);
    if (fom->has_delay()) {
      j["A_tau"] = real_matrix_to_json(fom->A_tau);
      j["tau"] = fom->tau;
    }
    j["B"] = real_matrix_to_json(fom->B);
    j["C"] = real_matrix_to_json(fom->C);
  } else if (const auto* fom = std::get_if<SecondOrderFOM>(&model)) {
    j["kind"] = "second_order";
    j["M"] = real_matrix_to_json(fom->M);
    j["E"] = real_matrix_to_json(fom->E);
    j["K"] = real_matrix_to_json(fom->K);
    j["B"] = real_matrix_to_json(fom->B);
    j["C"] = real_matrix_to_json(fom->C);
  } else if (const auto* rom = std::get_if<SecondOrderROM>(&model)) {
    j["kind"] = "second_order";
    j["E"] = real_matrix_to_json(RMat(rom->damping.asDiagonal()));
    j["K"] = real_matrix_to_json(RMat(rom->stiffness.asDiagonal()));
    j["B"] = real_matrix_to_json(rom->B);
    j["C"] = real_matrix_to_json(rom->C);
  } else if (const auto* ph = std::get_if<PHModel>(&model)) {
    j["kind"] = "ph";
    j["J"] = real_matrix_to_json(ph->J);
    j["R"] = real_matrix_to_json(ph->R);
    j["B"] = real_matrix_to_json(ph->B);
  } else if (const auto* delay = std::get_if<DelayROM>(&model)) {
    j["kind"] = "delay";
    j["mu"] = complex_vector_to_json(delay->mu);
    j["sigma"] = complex_vector_to_json(delay->sigma);
    j["tau"] = delay->tau;
    j["B"] = complex_matrix_to_json(delay->B);
    j["C"] = complex_matrix_to_json(delay->C);
  } else if (const auto* diag = std::get_if<DiagonalStructuredROM>(&model)) {
    j = model_to_json(ModelAny(diag->to_param_sep()));
  } else if (const auto* ps = std::get_if<ParamSepModel>(&model)) {
    j["kind"] = "param_sep";
    j["a_terms"] = terms_to_json(ps->a_terms);
    j["b_terms"] = terms_to_json(ps->b_terms);
    j["c_terms"] = terms_to_json(ps->c_terms);
  }
  return j;
}

ModelAny model_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind")) throw ParseError("model file must carry a kind tag");
  const std::string kind = j.at("kind").get<std::string>();
  try {
    if (kind == "state_space") {
      StateSpaceFOM fom;
      fom.E = real_matrix_from_json(j.at("E"));
      fom.A = real_matrix_from_json(j.at("A"));
      if (j.contains("A_tau")) {
        fom.A_tau = real_matrix_from_json(j.at("A_tau"));
        fom.tau = j.at("tau").get<double>();
      }
      fom.B = real_matrix_from_json(j.at("B"));
      fom.C = real_matrix_from_json(j.at("C"));
      fom.validate();
      return fom;
    }
    if (kind == "second_order") {
      const RMat e = real_matrix_from_json(j.at("E"));
      const RMat k = real_matrix_from_json(j.at("K"));
      const RMat b = real_matrix_from_json(j.at("B"));
      const RMat c = real_matrix_from_json(j.at("C"));
      const bool has_m = j.contains("M");
      const bool diag = e.isDiagonal(0.0) && k.isDiagonal(0.0);
      if (!has_m && diag) {
        SecondOrderROM rom;
        rom.damping = e.diagonal();
        rom.stiffness = k.diagonal();
        rom.B = b;
        rom.C = c;
        rom.validate();
        return rom;
      }
      SecondOrderFOM fom;
      fom.M = has_m ? real_matrix_from_json(j.at("M")) : RMat(RMat::Identity(e.rows(), e.cols()));
      fom.E = e;
      fom.K = k;
      fom.B = b;
      fom.C = c;
      fom.validate();
      return fom;
    }
    if (kind == "ph") {
      PHModel model;
      model.J = real_matrix_from_json(j.at("J"));
      model.R = real_matrix_from_json(j.at("R"));
      model.B = real_matrix_from_json(j.at("B"));
      model.validate();
      return model;
    }
    if (kind == "delay") {
      DelayROM rom;
      rom.mu = complex_vector_from_json(j.at("mu"));
      rom.sigma = complex_vector_from_json(j.at("sigma"));
      rom.tau = j.at("tau").get<double>();
      rom.B = complex_matrix_from_json(j.at("B"));
      rom.C = complex_matrix_from_json(j.at("C"));
      rom.validate();
      return rom;
    }
    if (kind == "param_sep") {
      ParamSepModel ps;
      ps.a_terms = terms_from_json(j.at("a_terms"));
      ps.b_terms = terms_from_json(j.at("b_terms"));
      ps.c_terms = terms_from_json(j.at("c_terms"));
      ps.validate();
      // A parameter-separable file with diagonal A-terms and plain B/C is the
      // on-disk form of a diagonal structured ROM.
      if (ps.b_terms.size() == 1 && ps.c_terms.size() == 1 &&
          constant_one(ps.b_terms[0].first) && constant_one(ps.c_terms[0].first)) {
        bool all_diag = true;
        for (const auto& [f, m] : ps.a_terms) all_diag = all_diag && is_diagonal(m);
        if (all_diag) {
          DiagonalStructuredROM rom;
          for (const auto& [f, m] : ps.a_terms) rom.a_terms.emplace_back(f, CVec(m.diagonal()));
          rom.B = ps.b_terms[0].second;
          rom.C = ps.c_terms[0].second;
          rom.validate();
          return rom;
        }
      }
      return ps;
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed model file: ") + e.what());
  }
  throw ParseError("unknown model kind: " + kind);
}

void save_model(const std::string& path, const ModelAny& model) {
  write_json_file(path, model_to_json(model));
}

ModelAny load_model(const std::string& path) { return model_from_json(read_json_file(path)); }

std::shared_ptr<TransferEvaluator> evaluator_for(const ModelAny& model) {
  return std::visit([](const auto& m) { return make_evaluator(m); }, model);
}

std::string model_kind(const ModelAny& model) {
  return std::visit(
      [](const auto& m) -> std::string {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, StateSpaceFOM>) return m.has_delay() ? "state_space+delay" : "state_space";
        if constexpr (std::is_same_v<T, SecondOrderFOM>) return "second_order";
        if constexpr (std::is_same_v<T, SecondOrderROM>) return "second_order_rom";
        if constexpr (std::is_same_v<T, PHModel>) return "ph";
        if constexpr (std::is_same_v<T, DelayROM>) return "delay";
        if constexpr (std::is_same_v<T, DiagonalStructuredROM>) return "diag_rom";
        return "param_sep";
      },
      model);
}

Index model_order(const ModelAny& model) {
  return std::visit([](const auto& m) { return m.order(); }, model);
}

Index model_inputs(const ModelAny& model) {
  return std::visit([](const auto& m) { return m.inputs(); }, model);
}

Index model_outputs(const ModelAny& model) {
  return std::visit([](const auto& m) { return m.outputs(); }, model);
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open for writing: " + path);
  out << j.dump(2) << '\n';
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON in ") + path + ": " + e.what());
  }
  return j;
}

}  // namespace strh2
