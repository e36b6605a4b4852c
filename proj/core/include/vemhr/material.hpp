#pragma once

#include "vemhr/geometry.hpp"

#include <Eigen/Core>

namespace vemhr {

/// Symmetric 2x2 tensor stored as (t11, t22, t12). The double contraction
/// weights the shear slot by 2: s:t = s11 t11 + s22 t22 + 2 s12 t12.
struct SymTensor2 {
    double xx = 0.0;
    double yy = 0.0;
    double xy = 0.0;

    static SymTensor2 from_triple(const Eigen::Vector3d& t) { return {t(0), t(1), t(2)}; }
    [[nodiscard]] Eigen::Vector3d triple() const { return {xx, yy, xy}; }
    /// Traction t n.
    [[nodiscard]] Vec2 operator*(const Vec2& n) const { return {xx * n.x() + xy * n.y(), xy * n.x() + yy * n.y()}; }

    SymTensor2& operator+=(const SymTensor2& o)
    {
        xx += o.xx;
        yy += o.yy;
        xy += o.xy;
        return *this;
    }
    friend SymTensor2 operator+(SymTensor2 a, const SymTensor2& b) { return a += b; }
    friend SymTensor2 operator-(const SymTensor2& a, const SymTensor2& b) { return {a.xx - b.xx, a.yy - b.yy, a.xy - b.xy}; }
    friend SymTensor2 operator*(double s, const SymTensor2& a) { return {s * a.xx, s * a.yy, s * a.xy}; }
    friend bool operator==(const SymTensor2&, const SymTensor2&) = default;
};

inline double ddot(const SymTensor2& s, const SymTensor2& t) { return s.xx * t.xx + s.yy * t.yy + 2.0 * s.xy * t.xy; }

/// Weight matrix turning the triple dot product into the double contraction.
inline Eigen::Matrix3d contraction_weights() { return Eigen::Vector3d(1.0, 1.0, 2.0).asDiagonal(); }

/// Plane-strain isotropic material. C maps strain triples to stress triples
/// (shear slot 2 mu, acting on the tensor component eps12), D = C^-1.
class IsotropicMaterial {
public:
    /// Throws ValidationError unless mu > 0 and lambda >= 0.
    static IsotropicMaterial from_lame(double lambda, double mu);
    /// Plane-strain conversion; requires E > 0 and 0 <= nu < 0.5.
    static IsotropicMaterial from_young_poisson_plane_strain(double young, double poisson);

    [[nodiscard]] double lambda() const { return lambda_; }
    [[nodiscard]] double mu() const { return mu_; }
    [[nodiscard]] double young() const { return mu_ * (3.0 * lambda_ + 2.0 * mu_) / (lambda_ + mu_); }
    /// Plane-strain ratio lambda / (2 (lambda + mu)), also the sigma33 factor.
    [[nodiscard]] double poisson() const { return lambda_ / (2.0 * (lambda_ + mu_)); }

    [[nodiscard]] const Eigen::Matrix3d& c_matrix() const { return c_; }
    [[nodiscard]] const Eigen::Matrix3d& d_matrix() const { return d_; }

    [[nodiscard]] SymTensor2 stress(const SymTensor2& strain) const { return SymTensor2::from_triple(c_ * strain.triple()); }
    [[nodiscard]] SymTensor2 strain(const SymTensor2& stress) const { return SymTensor2::from_triple(d_ * stress.triple()); }

    /// Stabilization and error-norm scale: half the trace of the 3x3 D matrix.
    [[nodiscard]] double kappa() const { return 0.5 * d_.trace(); }

private:
    IsotropicMaterial(double lambda, double mu);

    double lambda_ = 0.0;
    double mu_ = 0.0;
    Eigen::Matrix3d c_;
    Eigen::Matrix3d d_;
};

/// Von Mises stress with the out-of-plane component recovered as
/// sigma33 = lambda / (2 (lambda + mu)) (sigma11 + sigma22).
double von_mises_plane_strain(const SymTensor2& sigma, const IsotropicMaterial& material);

} // namespace vemhr
