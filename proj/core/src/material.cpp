#include "vemhr/material.hpp"

#include "vemhr/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace vemhr {

IsotropicMaterial::IsotropicMaterial(double lambda, double mu) : lambda_(lambda), mu_(mu)
{
    c_ << 2.0 * mu + lambda, lambda, 0.0,
          lambda, 2.0 * mu + lambda, 0.0,
          0.0, 0.0, 2.0 * mu;
    // Closed-form inverse of the 2x2 normal block; keeps D accurate for
    // lambda / mu up to ~1e7.
    const double a = 2.0 * mu + lambda;
    const double det = 4.0 * mu * (mu + lambda);
    d_ << a / det, -lambda / det, 0.0,
          -lambda / det, a / det, 0.0,
          0.0, 0.0, 1.0 / (2.0 * mu);
}

IsotropicMaterial IsotropicMaterial::from_lame(double lambda, double mu)
{
    if (!(mu > 0.0) || !std::isfinite(mu))
        throw ValidationError("shear modulus mu must be positive, got " + std::to_string(mu));
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw ValidationError("Lame lambda must be non-negative, got " + std::to_string(lambda));
    return {lambda, mu};
}

IsotropicMaterial IsotropicMaterial::from_young_poisson_plane_strain(double young, double poisson)
{
    if (!(young > 0.0))
        throw ValidationError("Young modulus must be positive");
    if (!(poisson >= 0.0) || !(poisson < 0.5))
        throw ValidationError("Poisson ratio must lie in [0, 0.5)");
    const double lambda = young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
    const double mu = young / (2.0 * (1.0 + poisson));
    return from_lame(lambda, mu);
}

double von_mises_plane_strain(const SymTensor2& s, const IsotropicMaterial& material)
{
    const double s33 = material.poisson() * (s.xx + s.yy);
    const double j2x3 = s.xx * s.xx + s.yy * s.yy + s33 * s33 - s.xx * s.yy - s.yy * s33 - s.xx * s33 +
                        3.0 * s.xy * s.xy;
    return std::sqrt(std::max(j2x3, 0.0));
}

} // namespace vemhr
