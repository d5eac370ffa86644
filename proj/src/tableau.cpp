// SPDX-License-Identifier: Apache-2.0
#include "indc/tableau.hpp"

#include "indc/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace indc {

namespace {

std::string normalize(std::string_view name) {
  std::string key;
  for (char ch : name) {
    if (ch == '-' || ch == '_' || ch == ' ') continue;
    key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  }
  return key;
}

ButcherTableau make(std::string name, Matrix A, Vector b, int p, int q) {
  ButcherTableau t;
  t.name = std::move(name);
  t.c = A.rowwise().sum();
  t.A = std::move(A);
  t.b = std::move(b);
  t.order = p;
  t.stage_order = q;
  return t;
}

}  // namespace

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names{"BE", "DIRK2-SA", "DIRK2-NSA",
                                              "LobattoIIIA2", "RadauIIA3"};
  return names;
}

ButcherTableau builtin(std::string_view name) {
  const std::string key = normalize(name);

  if (key == "be" || key == "backwardeuler" || key == "euler") {
    Matrix A(1, 1);
    A << 1.0;
    Vector b(1);
    b << 1.0;
    return make("BE", A, b, 1, 1);
  }
  if (key == "dirk2sa" || key == "sdirk2") {
    const double gamma = 1.0 - std::sqrt(2.0) / 2.0;
    Matrix A(2, 2);
    A << gamma, 0.0,
         1.0 - gamma, gamma;
    Vector b(2);
    b << 1.0 - gamma, gamma;
    return make("DIRK2-SA", A, b, 2, 1);
  }
  if (key == "dirk2nsa" || key == "midpoint") {
    Matrix A(1, 1);
    A << 0.5;
    Vector b(1);
    b << 1.0;
    return make("DIRK2-NSA", A, b, 2, 1);
  }
  if (key == "lobattoiiia2" || key == "lobatto2" || key == "lobatto" ||
      key == "trapezoidal") {
    Matrix A(2, 2);
    A << 0.0, 0.0,
         0.5, 0.5;
    Vector b(2);
    b << 0.5, 0.5;
    return make("LobattoIIIA2", A, b, 2, 1);
  }
  if (key == "radauiia3" || key == "radau3" || key == "radau") {
    Matrix A(2, 2);
    A << 5.0 / 12.0, -1.0 / 12.0,
         3.0 / 4.0, 1.0 / 4.0;
    Vector b(2);
    b << 3.0 / 4.0, 1.0 / 4.0;
    return make("RadauIIA3", A, b, 3, 2);
  }

  std::string known;
  for (const auto& n : builtin_names()) known += (known.empty() ? "" : ", ") + n;
  throw usage_error("unknown method '" + std::string(name) +
                    "'; known methods: " + known);
}

std::string short_token(const ButcherTableau& t) {
  if (t.name == "BE") return "BE";
  if (t.name == "DIRK2-SA") return "DIRK2SA";
  if (t.name == "DIRK2-NSA") return "DIRK2NSA";
  if (t.name == "LobattoIIIA2") return "Lobatto2";
  if (t.name == "RadauIIA3") return "Radau3";
  return t.name;
}

void validate(const ButcherTableau& t, double tol) {
  const auto s = t.b.size();
  if (s < 1) throw usage_error("tableau '" + t.name + "': s must be >= 1");
  if (t.A.rows() != s || t.A.cols() != s || t.c.size() != s)
    throw usage_error("tableau '" + t.name + "': A, b, c sizes disagree");
  if (!t.A.allFinite() || !t.b.allFinite() || !t.c.allFinite())
    throw usage_error("tableau '" + t.name + "': non-finite coefficient");
  const Vector rows = t.A.rowwise().sum();
  for (Eigen::Index i = 0; i < s; ++i) {
    if (std::abs(rows(i) - t.c(i)) > tol)
      throw usage_error("tableau '" + t.name + "': c[" + std::to_string(i) +
                        "] differs from the row sum of A");
  }
}

bool is_stiffly_accurate(const ButcherTableau& t) {
  const auto s = t.stages();
  for (int j = 0; j < s; ++j) {
    if (std::abs(t.A(s - 1, j) - t.b(j)) > 1e-14) return false;
  }
  return true;
}

bool has_invertible_A(const ButcherTableau& t) {
  Eigen::PartialPivLU<Matrix> lu(t.A);
  const auto& U = lu.matrixLU();
  for (Eigen::Index i = 0; i < U.rows(); ++i) {
    if (U(i, i) == 0.0 || !std::isfinite(U(i, i))) return false;
  }
  const double rcond = lu.rcond();
  return std::isfinite(rcond) && rcond > 1e-12;
}

std::complex<double> stability_function(const ButcherTableau& t,
                                        std::complex<double> z) {
  using CMatrix = Eigen::MatrixXcd;
  using CVector = Eigen::VectorXcd;
  const auto s = t.stages();
  const CMatrix M = CMatrix::Identity(s, s) - z * t.A.cast<std::complex<double>>();
  Eigen::PartialPivLU<CMatrix> lu(M);
  const double rcond = lu.rcond();
  if (!(std::isfinite(rcond) && rcond > 1e-15))
    throw pole_error("I - zA is singular", z);
  const CVector k = lu.solve(CVector::Ones(s));
  return 1.0 + z * t.b.cast<std::complex<double>>().dot(k);
}

std::string to_json(const ButcherTableau& t) {
  std::ostringstream os;
  os << std::setprecision(17);
  const auto vec = [&os](const Vector& v) {
    os << '[';
    for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v(i);
    os << ']';
  };
  os << "{\n  \"name\": " << nlohmann::json(t.name).dump() << ",\n";
  os << "  \"s\": " << t.stages() << ",\n  \"A\": [";
  for (Eigen::Index i = 0; i < t.A.rows(); ++i) {
    os << (i ? ",\n        " : "");
    vec(t.A.row(i).transpose());
  }
  os << "],\n  \"b\": ";
  vec(t.b);
  os << ",\n  \"c\": ";
  vec(t.c);
  os << ",\n  \"p\": ";
  if (t.order) os << *t.order; else os << "null";
  os << ",\n  \"q\": ";
  if (t.stage_order) os << *t.stage_order; else os << "null";
  os << "\n}\n";
  return os.str();
}

ButcherTableau tableau_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw usage_error(std::string("tableau JSON: ") + e.what());
  }
  try {
    ButcherTableau t;
    t.name = j.at("name").get<std::string>();
    const auto s = j.at("s").get<int>();
    const auto rows = j.at("A").get<std::vector<std::vector<double>>>();
    const auto b = j.at("b").get<std::vector<double>>();
    const auto c = j.at("c").get<std::vector<double>>();
    if (s < 1 || static_cast<int>(rows.size()) != s ||
        static_cast<int>(b.size()) != s || static_cast<int>(c.size()) != s)
      throw usage_error("tableau JSON: sizes disagree with s");
    t.A.resize(s, s);
    for (int i = 0; i < s; ++i) {
      if (static_cast<int>(rows[i].size()) != s)
        throw usage_error("tableau JSON: row " + std::to_string(i) + " of A has wrong length");
      for (int k = 0; k < s; ++k) t.A(i, k) = rows[i][k];
    }
    t.b = Eigen::Map<const Vector>(b.data(), s);
    t.c = Eigen::Map<const Vector>(c.data(), s);
    if (j.contains("p") && !j["p"].is_null()) t.order = j["p"].get<int>();
    if (j.contains("q") && !j["q"].is_null()) t.stage_order = j["q"].get<int>();
    validate(t, 1e-12);
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw usage_error(std::string("tableau JSON: ") + e.what());
  }
}

std::string to_text(const ButcherTableau& t) {
  std::ostringstream os;
  os << t.name << "  (s=" << t.stages();
  os << ", p=" << (t.order ? std::to_string(*t.order) : "-");
  os << ", q=" << (t.stage_order ? std::to_string(*t.stage_order) : "-") << ")\n";
  os << std::setprecision(12);
  for (int i = 0; i < t.stages(); ++i) {
    os << std::setw(20) << t.c(i) << " |";
    for (int j = 0; j < t.stages(); ++j) os << std::setw(20) << t.A(i, j);
    os << '\n';
  }
  os << std::string(20, ' ') << "-+" << std::string(20 * t.stages(), '-') << '\n';
  os << std::string(20, ' ') << " |";
  for (int j = 0; j < t.stages(); ++j) os << std::setw(20) << t.b(j);
  os << '\n';
  os << "stiffly accurate: " << (is_stiffly_accurate(t) ? "yes" : "no")
     << ", A invertible: " << (has_invertible_A(t) ? "yes" : "no") << '\n';
  return os.str();
}

}  // namespace indc
