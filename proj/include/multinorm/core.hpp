#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "multinorm/rational.hpp"

namespace multinorm {

// Anisotropic exponents lambda_h > 0 together with the grouping of the d
// scalar coordinates into n factor blocks.
struct Exponents {
    std::vector<Rational> lambda;          // one exponent per scalar coordinate
    std::vector<std::vector<int>> blocks;  // coordinate indices per factor (0-based)

    int dims() const { return (int)lambda.size(); }
    int factors() const { return (int)blocks.size(); }

    // Homogeneous dimension q_i of factor i.
    Rational q(int i) const {
        Rational s(0);
        for (int h : blocks[i]) s += lambda[h];
        return s;
    }

    // Throws std::invalid_argument when the invariants fail.
    void validate() const;

    // factor_of[h] = index of the block containing coordinate h.
    std::vector<int> factor_of() const;

    static Exponents isotropic(int n);  // one coordinate per factor, lambda = 1
};

struct MatrixViolation {
    enum Kind { NonSquare, NonPositive, DiagonalNotOne, Triangle, Reducible } kind;
    int j = -1, k = -1, l = -1;  // offending indices, 0-based
    std::string message;
};

// n x n matrix with positive rational entries e(j,k), unit diagonal,
// sub-multiplicative rows and strict reciprocal products.  Generates all
// dilations and homogeneous norms.
class StandardMatrix {
public:
    static std::variant<StandardMatrix, MatrixViolation>
    validate(const std::vector<std::vector<Rational>>& entries);

    int n() const { return n_; }
    const Rational& e(int j, int k) const { return e_[j * n_ + k]; }
    Rational max_entry() const;

    bool operator==(const StandardMatrix& o) const { return n_ == o.n_ && e_ == o.e_; }

private:
    StandardMatrix(int n, std::vector<Rational> e) : n_(n), e_(std::move(e)) {}
    int n_ = 0;
    std::vector<Rational> e_;
};

// A point of the logarithmic parameter space R^n_+.
struct LogPoint {
    std::vector<double> t;
};

// Matrix + exponents and everything derived from them: the two dual dilation
// families, the homogeneous norms N_i and Nhat_i, block norms, homogeneous
// dimensions and homogeneous lengths of multi-indices.
class Structure {
public:
    Structure(StandardMatrix E, Exponents exps);

    const StandardMatrix& matrix() const { return E_; }
    const Exponents& exponents() const { return exps_; }
    int n() const { return E_.n(); }
    int dims() const { return exps_.dims(); }
    const Rational& e(int j, int k) const { return E_.e(j, k); }
    Rational q(int i) const { return exps_.q(i); }
    int factor_of(int h) const { return factor_of_[h]; }

    // Homogeneous dimensions for the primal and dual dilation families.
    Rational Q(int i) const;      // sum_j q_j / e(i,j)
    Rational Qhat(int i) const;   // sum_j q_j * e(j,i)

    // Homogeneous length of a multi-index: [[alpha^j]] restricted to factor j
    // and [[alpha]]_i relative to the i-th dual dilations.
    Rational block_length(const std::vector<int>& alpha, int j) const;
    Rational hat_length(const std::vector<int>& alpha, int i) const;

    // Block norm |x_i| = sum_{h in E_i} |x_h|^{1/lambda_h}.
    double block_norm(const std::vector<double>& x, int i) const;

    double norm_N(int i, const std::vector<double>& x) const;
    double norm_Nhat(int i, const std::vector<double>& xi) const;

    // delta^i_t (primal) and hat-delta^i_t (dual); t > 0.
    std::vector<double> dilate(int i, double t, const std::vector<double>& x, bool dual) const;

    // Logarithmic coordinates t_i = log2^+ |xi_i| and the logarithmic norms.
    LogPoint log_map(const std::vector<double>& xi) const;
    double log_norm_nhat(int i, const std::vector<double>& t) const;

    // Scalar dilation exponent of coordinate h under delta^i (primal) or
    // hat-delta^i (dual): x_h scales by t^exponent.
    double coord_exponent(int i, int h, bool dual) const;

private:
    StandardMatrix E_;
    Exponents exps_;
    std::vector<int> factor_of_;
};

// Config-file round trip: rationals encoded as [num, den] pairs, blocks as
// index lists.  Bit-exact.
struct StructureConfig {
    std::vector<std::vector<Rational>> matrix;
    Exponents exponents;
};

StructureConfig load_structure_config(const std::string& path);
void save_structure_config(const StructureConfig& cfg, const std::string& path);

}  // namespace multinorm
