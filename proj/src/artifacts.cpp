#include "msvar/artifacts.hpp"

#include "msvar/csv.hpp"

#include <json.hpp>

#include <fstream>

namespace msvar {

namespace {

using nlohmann::json;

json mat_to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat mat_from_json(const json& rows) {
  const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index c =
      r > 0 ? static_cast<Eigen::Index>(rows[0].size()) : 0;
  Mat m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rows[i][j].get<double>();
  return m;
}

json vec_to_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vec vec_from_json(const json& a) {
  Vec v(static_cast<Eigen::Index>(a.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = a[i].get<double>();
  return v;
}

}  // namespace

std::string fit_to_json(const FitResult& fit) {
  json j;
  j["schema_version"] = kSchemaVersion;
  const ModelSpec& s = fit.model.spec;
  j["spec"] = {{"M", s.M},         {"p", s.p},
               {"q", s.q},         {"d", s.d},
               {"dstar", s.dstar}, {"intercept", s.intercept}};
  json regimes = json::array();
  for (const RegimeParams& r : fit.model.regimes) {
    json jr;
    jr["A"] = json::array();
    for (const Mat& a : r.A) jr["A"].push_back(mat_to_json(a));
    jr["B"] = json::array();
    for (const Mat& b : r.B) jr["B"].push_back(mat_to_json(b));
    if (s.intercept) jr["intercept"] = vec_to_json(r.intercept);
    jr["Q"] = mat_to_json(r.Q);
    regimes.push_back(std::move(jr));
  }
  j["regimes"] = std::move(regimes);
  j["trans"] = mat_to_json(fit.model.trans);
  j["init"] = vec_to_json(fit.model.init);
  j["support"] = fit.support;
  j["objective_trace"] = fit.objective_trace;
  j["converged"] = fit.converged;
  j["failed"] = fit.failed;
  j["loglik"] = fit.loglik;
  j["objective"] = fit.objective;
  j["seed"] = fit.seed;
  j["penalty"] = {
      {"family",
       fit.penalty.family == PenaltyFamily::Lasso ? "lasso" : "scad_lla"},
      {"lambda_coef", fit.penalty.lambda_coef},
      {"lambda_prec", fit.penalty.lambda_prec},
      {"a", fit.penalty.a}};
  return j.dump(2);
}

MsVarModel model_from_json(const std::string& json_text) {
  const json j = json::parse(json_text);
  MsVarModel m;
  m.spec.M = j.at("spec").at("M").get<int>();
  m.spec.p = j.at("spec").at("p").get<int>();
  m.spec.q = j.at("spec").at("q").get<int>();
  m.spec.d = j.at("spec").at("d").get<int>();
  m.spec.dstar = j.at("spec").at("dstar").get<int>();
  m.spec.intercept = j.at("spec").at("intercept").get<bool>();
  for (const json& jr : j.at("regimes")) {
    RegimeParams r;
    for (const json& a : jr.at("A")) r.A.push_back(mat_from_json(a));
    for (const json& b : jr.at("B")) r.B.push_back(mat_from_json(b));
    if (m.spec.intercept) r.intercept = vec_from_json(jr.at("intercept"));
    r.Q = mat_from_json(jr.at("Q"));
    m.regimes.push_back(std::move(r));
  }
  m.trans = mat_from_json(j.at("trans"));
  m.init = vec_from_json(j.at("init"));
  m.validate();
  return m;
}

void save_fit(const std::string& path, const FitResult& fit) {
  write_text_file(path, fit_to_json(fit));
}

MsVarModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_model: cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return model_from_json(text);
}

}  // namespace msvar
