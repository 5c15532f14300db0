#include "multinorm/core.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace multinorm {

void Exponents::validate() const {
    if (lambda.empty() || blocks.empty())
        throw std::invalid_argument("exponents: empty");
    std::vector<int> seen(lambda.size(), 0);
    for (const auto& l : lambda)
        if (!(l > Rational(0))) throw std::invalid_argument("exponents: lambda_h must be positive");
    for (const auto& b : blocks) {
        if (b.empty()) throw std::invalid_argument("exponents: empty block");
        for (int h : b) {
            if (h < 0 || h >= (int)lambda.size())
                throw std::invalid_argument("exponents: coordinate index out of range");
            if (seen[h]++) throw std::invalid_argument("exponents: blocks overlap");
        }
    }
    for (int c : seen)
        if (!c) throw std::invalid_argument("exponents: blocks do not cover all coordinates");
}

std::vector<int> Exponents::factor_of() const {
    std::vector<int> f(lambda.size(), -1);
    for (int i = 0; i < (int)blocks.size(); ++i)
        for (int h : blocks[i]) f[h] = i;
    return f;
}

Exponents Exponents::isotropic(int n) {
    Exponents e;
    e.lambda.assign(n, Rational(1));
    e.blocks.resize(n);
    for (int i = 0; i < n; ++i) e.blocks[i] = {i};
    return e;
}

std::variant<StandardMatrix, MatrixViolation>
StandardMatrix::validate(const std::vector<std::vector<Rational>>& entries) {
    const int n = (int)entries.size();
    if (n == 0) return MatrixViolation{MatrixViolation::NonSquare, -1, -1, -1, "empty matrix"};
    for (int j = 0; j < n; ++j)
        if ((int)entries[j].size() != n)
            return MatrixViolation{MatrixViolation::NonSquare, j, -1, -1,
                                   "row " + std::to_string(j) + " has wrong length"};
    std::vector<Rational> e;
    e.reserve(n * n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            if (!(entries[j][k] > Rational(0)))
                return MatrixViolation{MatrixViolation::NonPositive, j, k, -1,
                                       "entry (" + std::to_string(j) + "," + std::to_string(k) +
                                           ") is not positive"};
            e.push_back(entries[j][k]);
        }
    for (int j = 0; j < n; ++j)
        if (entries[j][j] != Rational(1))
            return MatrixViolation{MatrixViolation::DiagonalNotOne, j, j, -1,
                                   "diagonal entry (" + std::to_string(j) + "," +
                                       std::to_string(j) + ") is not 1"};
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l)
                if (entries[j][l] > entries[j][k] * entries[k][l])
                    return MatrixViolation{MatrixViolation::Triangle, j, k, l,
                                           "e(j,l) <= e(j,k)e(k,l) fails for (j,k,l)=(" +
                                               std::to_string(j) + "," + std::to_string(k) + "," +
                                               std::to_string(l) + ")"};
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            if (j != k && !(entries[j][k] * entries[k][j] > Rational(1)))
                return MatrixViolation{MatrixViolation::Reducible, j, k, -1,
                                       "e(j,k)e(k,j) = 1 for (j,k)=(" + std::to_string(j) + "," +
                                           std::to_string(k) + "): reducible"};
    return StandardMatrix(n, std::move(e));
}

Rational StandardMatrix::max_entry() const {
    Rational m(0);
    for (const auto& v : e_) m = Rational::max(m, v);
    return m;
}

Structure::Structure(StandardMatrix E, Exponents exps)
    : E_(std::move(E)), exps_(std::move(exps)) {
    exps_.validate();
    if (exps_.factors() != E_.n())
        throw std::invalid_argument("structure: block count must equal matrix size");
    factor_of_ = exps_.factor_of();
}

Rational Structure::Q(int i) const {
    Rational s(0);
    for (int j = 0; j < n(); ++j) s += q(j) / e(i, j);
    return s;
}

Rational Structure::Qhat(int i) const {
    Rational s(0);
    for (int j = 0; j < n(); ++j) s += q(j) * e(j, i);
    return s;
}

Rational Structure::block_length(const std::vector<int>& alpha, int j) const {
    Rational s(0);
    for (int h : exps_.blocks[j]) s += exps_.lambda[h] * Rational(alpha[h]);
    return s;
}

Rational Structure::hat_length(const std::vector<int>& alpha, int i) const {
    Rational s(0);
    for (int j = 0; j < n(); ++j) s += e(j, i) * block_length(alpha, j);
    return s;
}

double Structure::block_norm(const std::vector<double>& x, int i) const {
    double s = 0;
    for (int h : exps_.blocks[i])
        s += std::pow(std::abs(x[h]), 1.0 / exps_.lambda[h].to_double());
    return s;
}

double Structure::norm_N(int i, const std::vector<double>& x) const {
    double m = 0;
    for (int j = 0; j < n(); ++j)
        m = std::max(m, std::pow(block_norm(x, j), e(i, j).to_double()));
    return m;
}

double Structure::norm_Nhat(int i, const std::vector<double>& xi) const {
    double m = 0;
    for (int j = 0; j < n(); ++j)
        m = std::max(m, std::pow(block_norm(xi, j), 1.0 / e(j, i).to_double()));
    return m;
}

double Structure::coord_exponent(int i, int h, bool dual) const {
    const int j = factor_of_[h];
    const double lh = exps_.lambda[h].to_double();
    return dual ? lh * e(j, i).to_double() : lh / e(i, j).to_double();
}

std::vector<double> Structure::dilate(int i, double t, const std::vector<double>& x,
                                      bool dual) const {
    if (!(t > 0)) throw std::domain_error("dilate: t must be positive");
    std::vector<double> y(x.size());
    for (int h = 0; h < dims(); ++h) y[h] = std::pow(t, coord_exponent(i, h, dual)) * x[h];
    return y;
}

LogPoint Structure::log_map(const std::vector<double>& xi) const {
    LogPoint p;
    p.t.resize(n());
    for (int i = 0; i < n(); ++i) {
        const double b = block_norm(xi, i);
        p.t[i] = b > 1.0 ? std::log2(b) : 0.0;
    }
    return p;
}

double Structure::log_norm_nhat(int i, const std::vector<double>& t) const {
    double m = 0;
    for (int j = 0; j < n(); ++j) m = std::max(m, t[j] / e(j, i).to_double());
    return m;
}

namespace {

nlohmann::json rational_to_json(const Rational& r) {
    return nlohmann::json::array({r.num(), r.den()});
}

Rational rational_from_json(const nlohmann::json& j) {
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (!j.is_array() || j.size() != 2)
        throw std::invalid_argument("config: rational must be [num, den]");
    return Rational(j[0].get<long long>(), j[1].get<long long>());
}

}  // namespace

StructureConfig load_structure_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    nlohmann::json j;
    in >> j;
    StructureConfig cfg;
    for (const auto& row : j.at("matrix")) {
        std::vector<Rational> r;
        for (const auto& v : row) r.push_back(rational_from_json(v));
        cfg.matrix.push_back(std::move(r));
    }
    for (const auto& v : j.at("lambda")) cfg.exponents.lambda.push_back(rational_from_json(v));
    for (const auto& b : j.at("blocks")) {
        std::vector<int> blk;
        for (const auto& v : b) blk.push_back(v.get<int>());
        cfg.exponents.blocks.push_back(std::move(blk));
    }
    return cfg;
}

void save_structure_config(const StructureConfig& cfg, const std::string& path) {
    nlohmann::json j;
    j["matrix"] = nlohmann::json::array();
    for (const auto& row : cfg.matrix) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto& v : row) r.push_back(rational_to_json(v));
        j["matrix"].push_back(r);
    }
    j["lambda"] = nlohmann::json::array();
    for (const auto& v : cfg.exponents.lambda) j["lambda"].push_back(rational_to_json(v));
    j["blocks"] = cfg.exponents.blocks;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config file: " + path);
    out << j.dump(2) << "\n";
}

}  // namespace multinorm
