#pragma once

#include <stdexcept>

namespace pucci {

/// Ellipticity constants 0 < lambda <= Lambda shared by every operator.
struct EllipticityPair {
    double lambda;
    double Lambda;

    EllipticityPair(double lam, double Lam) : lambda(lam), Lambda(Lam) {
        if (!(lam > 0.0) || !(lam <= Lam))
            throw std::invalid_argument("EllipticityPair: need 0 < lambda <= Lambda");
    }

    double ratio() const { return lambda / Lambda; }
    bool is_laplacian() const { return lambda == Lambda; }
};

/// Dimension-like number for Q+: (lambda/Lambda)(N-1)+1, always <= N.
inline double dim_like_plus(int N, const EllipticityPair& e) {
    return e.lambda / e.Lambda * (N - 1) + 1.0;
}

/// Dimension-like number for Q-: (Lambda/lambda)(N-1)+1, always >= N.
inline double dim_like_minus(int N, const EllipticityPair& e) {
    return e.Lambda / e.lambda * (N - 1) + 1.0;
}

/// Sobolev critical exponent (N+2)/(N-2); accepts the dimension-like reals too.
inline double sobolev_exponent(double n) {
    if (n <= 2.0) throw std::invalid_argument("sobolev_exponent: need dimension > 2");
    return (n + 2.0) / (n - 2.0);
}

}  // namespace pucci
