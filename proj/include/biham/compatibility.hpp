#pragma once

#include <limits>

#include "biham/structures.hpp"

namespace biham {

/// Two admissible triples that passed check_compatible, with the derived
/// (1,1)-tensors G = g1^-1 g2 and T = omega1^-1 omega2.
class CompatiblePair {
public:
    const AdmissibleTriple& t1() const { return t1_; }
    const AdmissibleTriple& t2() const { return t2_; }
    const RealMatrix& big_g() const { return g_; }
    const RealMatrix& big_t() const { return t_; }
    /// Residuals of the four compatibility conditions and the relation suite.
    const CheckReport& certificates() const { return certificates_; }
    const Tolerance& tolerance() const { return tol_; }
    Eigen::Index dim() const { return t1_.dim(); }
    Eigen::Index n() const { return t1_.dim() / 2; }

private:
    friend Checked<CompatiblePair> check_compatible(const AdmissibleTriple&,
                                                    const AdmissibleTriple&, const Tolerance&);
    CompatiblePair(AdmissibleTriple t1, AdmissibleTriple t2, RealMatrix g, RealMatrix t,
                   CheckReport certificates, Tolerance tol)
        : t1_(std::move(t1)), t2_(std::move(t2)), g_(std::move(g)), t_(std::move(t)),
          certificates_(std::move(certificates)), tol_(tol) {}

    AdmissibleTriple t1_;
    AdmissibleTriple t2_;
    RealMatrix g_;
    RealMatrix t_;
    CheckReport certificates_;
    Tolerance tol_;
};

/// Residual names used in compatibility reports.
namespace relation {
inline constexpr const char* kG2PreservedByGamma1 = "g2 J1 + J1^T g2 = 0";
inline constexpr const char* kOmega2PreservedByGamma1 = "omega2 J1 symmetric";
inline constexpr const char* kG1PreservedByGamma2 = "g1 J2 + J2^T g1 = 0";
inline constexpr const char* kOmega1PreservedByGamma2 = "omega1 J2 symmetric";
inline constexpr const char* kJ1J2Commute = "[J1,J2] = 0";
}  // namespace relation

/// Decides compatibility through the four matrix conditions (Gamma_1
/// preserves g2 and omega2, Gamma_2 preserves g1 and omega1). On success
/// builds G and T and runs the full relation suite; the pair is only returned
/// when every residual passes. [J1,J2] is always reported.
Checked<CompatiblePair> check_compatible(const AdmissibleTriple& t1, const AdmissibleTriple& t2,
                                         const Tolerance& tol = {});

/// Residuals of every identity between G, T, J1, J2 that compatibility implies.
CheckReport relation_suite(const AdmissibleTriple& t1, const AdmissibleTriple& t2,
                           const RealMatrix& big_g, const RealMatrix& big_t,
                           const Tolerance& tol = {});
CheckReport verify_relation_suite(const CompatiblePair& p);

/// Interval of gamma for which g1 + gamma g2 is positive-definite. The upper
/// end is always +infinity because every eigenvalue of G is positive.
struct GammaRange {
    double lower = 0.0;
    double upper = std::numeric_limits<double>::infinity();

    [[nodiscard]] bool contains(double gamma) const { return gamma > lower && gamma < upper; }
};

GammaRange positivity_range(const CompatiblePair& p);

}  // namespace biham
