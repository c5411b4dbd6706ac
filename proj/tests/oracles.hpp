#pragma once

// Independent oracles used by the tests: plain series summations, small
// closed-form eigendecompositions, and central finite differences. These
// deliberately avoid the library's own evaluation paths.

#include <Eigen/Dense>
#include <cmath>
#include <functional>

namespace oracles {

// Tree function by series: T(z) = sum_{l>=1} l^{l-1} z^l / l!.
inline double tree_series(double z, int terms = 60) {
    double sum = 0.0;
    double term = z;  // l = 1 term
    for (int l = 1; l <= terms; ++l) {
        sum += term;
        // term ratio: (l+1)^l z^{l+1} l! / (l^{l-1} z^l (l+1)!) = z ((l+1)/l)^{l-1}
        term *= z * std::pow(static_cast<double>(l + 1) / static_cast<double>(l), l - 1);
    }
    return sum;
}

// Gauss series for 2F1(mu, 1; 2; z), |z| < 1.
inline double hyp2f1_series(double mu, double z, int terms = 2000) {
    double total = 0.0, term = 1.0;
    for (int n = 0; n < terms; ++n) {
        total += term;
        term *= (mu + n) * z / (2.0 + n);
        if (std::abs(term) < 1e-19) break;
    }
    return total;
}

// Truncated matrix exponential series without scaling; valid for small ||Mt||.
inline Eigen::MatrixXd matexp_series(const Eigen::MatrixXd& m, double t, int terms = 40) {
    const Eigen::Index c = m.rows();
    Eigen::MatrixXd sum = Eigen::MatrixXd::Identity(c, c);
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(c, c);
    for (int k = 1; k <= terms; ++k) {
        term = term * (m * t) / static_cast<double>(k);
        sum += term;
    }
    return sum;
}

// e^{Mt} for the symmetric exchange generator [[-g, g], [g, -g]] via its
// eigendecomposition (eigenvalues 0 and -2g).
inline Eigen::MatrixXd exchange_generator_exp(double g, double t) {
    const double decay = std::exp(-2.0 * g * t);
    Eigen::MatrixXd out(2, 2);
    out << 0.5 * (1.0 + decay), 0.5 * (1.0 - decay), 0.5 * (1.0 - decay), 0.5 * (1.0 + decay);
    return out;
}

// First and second moment of a scalar MGF by central differences at 0.
inline double mgf_mean(const std::function<double(double)>& mgf, double h = 1e-5) {
    return (mgf(h) - mgf(-h)) / (2.0 * h);
}

inline double mgf_second_moment(const std::function<double(double)>& mgf, double h = 1e-5) {
    return (mgf(h) - 2.0 * mgf(0.0) + mgf(-h)) / (h * h);
}

}  // namespace oracles
