#ifndef MGI_OPTICS_HPP
#define MGI_OPTICS_HPP

#include "mgi/types.hpp"

namespace mgi {

// Geometry and crystal parameters of the four-beam setup. Lengths in cm,
// wavenumbers in 1/cm. The object arm (beam 1) is lensless; reference arms
// 2..4 each carry a lens between the beam splitter and their CCD.
struct OpticalSetup {
    double k1 = 6.0e4;   // object-arm wavenumber
    double k2 = 6.0e4;
    double k3 = 1.7e5;
    double k4 = 1.7e5;
    double l11 = 10.0;   // beam splitter -> object
    double l12 = 10.0;   // object -> bucket detector

    struct ReferenceArm {
        double l1 = 10.0;  // beam splitter -> lens
        double l2 = 10.0;  // lens -> CCD
        double f = 5.0;    // focal length
    };
    ReferenceArm arm2, arm3, arm4;

    double beta = 10.0;  // crystal parameter, 1/cm
    double xi = 0.4;     // gamma / beta
    double s = 1.0;      // object-arm beam area, cm^2

    const ReferenceArm& arm(int index) const;
    ReferenceArm& arm(int index);
    double wavenumber(int index) const;

    void validate() const;
};

enum class ArmKind { down_conversion, up_conversion };

// Arms 2 and 4 come from down-conversion, arm 3 from up-conversion.
ArmKind arm_kind(int arm_index);

// Focal length solving the arm's imaging condition. For the up-conversion arm
// the effective object distance l31 - (lambda1/lambda3) l11 must be positive.
double required_focal_length(const OpticalSetup& setup, int arm_index);

// alpha_j = (l_j1 + (lambda1/lambda_j) l11) / l_j2 for arms 2 and 4,
// alpha_3 = (l_31 - (lambda1/lambda3) l11) / l_32.
double magnification(const OpticalSetup& setup, int arm_index);

// Second-order intensity correlation profile: arm_scale * s * f, pixelwise
// (unit magnification regime).
Vector g2_kernel(const OpticalSetup& setup, const ObjectImage& f, double arm_scale);

// Cross-arm eighth-order correlation block: the rank-one outer product
// (scale_i * s * f) (scale_j * s * f)^T.
Matrix g4_kernel(const OpticalSetup& setup, const ObjectImage& f, double scale_i,
                 double scale_j);

}  // namespace mgi

#endif
