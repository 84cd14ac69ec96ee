#include "mgi/optics.hpp"

namespace mgi {

const OpticalSetup::ReferenceArm& OpticalSetup::arm(int index) const {
    switch (index) {
        case 2: return arm2;
        case 3: return arm3;
        case 4: return arm4;
    }
    throw InvalidInputError("OpticalSetup: arm index must be 2, 3 or 4");
}

OpticalSetup::ReferenceArm& OpticalSetup::arm(int index) {
    return const_cast<ReferenceArm&>(std::as_const(*this).arm(index));
}

double OpticalSetup::wavenumber(int index) const {
    switch (index) {
        case 1: return k1;
        case 2: return k2;
        case 3: return k3;
        case 4: return k4;
    }
    throw InvalidInputError("OpticalSetup: beam index must be 1..4");
}

void OpticalSetup::validate() const {
    auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!positive(k1) || !positive(k2) || !positive(k3) || !positive(k4))
        throw InvalidInputError("OpticalSetup: wavenumbers must be positive");
    if (!positive(l11) || !positive(l12))
        throw InvalidInputError("OpticalSetup: object-arm lengths must be positive");
    for (int j = 2; j <= 4; ++j) {
        const ReferenceArm& a = arm(j);
        if (!positive(a.l1) || !positive(a.l2) || !positive(a.f))
            throw InvalidInputError("OpticalSetup: reference-arm lengths must be positive");
    }
    if (!(xi > 0.0 && xi <= 1.0))
        throw InvalidInputError("OpticalSetup: xi must be in (0, 1]");
    if (!positive(beta) || !positive(s))
        throw InvalidInputError("OpticalSetup: beta and s must be positive");
}

ArmKind arm_kind(int arm_index) {
    switch (arm_index) {
        case 2:
        case 4:
            return ArmKind::down_conversion;
        case 3:
            return ArmKind::up_conversion;
    }
    throw InvalidInputError("arm_kind: arm index must be 2, 3 or 4");
}

namespace {

// lambda_1 / lambda_j = k_j / k_1
double wavelength_ratio(const OpticalSetup& s, int arm_index) {
    return s.wavenumber(arm_index) / s.k1;
}

// Effective object distance entering the imaging condition: a sum of path
// terms for down-conversion arms, a difference for the up-conversion arm.
double effective_object_distance(const OpticalSetup& s, int arm_index) {
    const double ratio_l11 = wavelength_ratio(s, arm_index) * s.l11;
    const OpticalSetup::ReferenceArm& a = s.arm(arm_index);
    return arm_kind(arm_index) == ArmKind::down_conversion ? a.l1 + ratio_l11
                                                           : a.l1 - ratio_l11;
}

}  // namespace

double required_focal_length(const OpticalSetup& setup, int arm_index) {
    const OpticalSetup::ReferenceArm& a = setup.arm(arm_index);
    const double d = effective_object_distance(setup, arm_index);
    if (d <= 0.0)
        throw ImagingImpossibleError(
            "required_focal_length: non-positive effective object distance in arm " +
            std::to_string(arm_index));
    return 1.0 / (1.0 / a.l2 + 1.0 / d);
}

double magnification(const OpticalSetup& setup, int arm_index) {
    const OpticalSetup::ReferenceArm& a = setup.arm(arm_index);
    if (a.l2 <= 0.0) throw InvalidInputError("magnification: l_j2 must be positive");
    return effective_object_distance(setup, arm_index) / a.l2;
}

Vector g2_kernel(const OpticalSetup& setup, const ObjectImage& f, double arm_scale) {
    if (!f.valid()) throw InvalidInputError("g2_kernel: invalid object image");
    return (arm_scale * setup.s) * f.values;
}

Matrix g4_kernel(const OpticalSetup& setup, const ObjectImage& f, double scale_i,
                 double scale_j) {
    if (!f.valid()) throw InvalidInputError("g4_kernel: invalid object image");
    Vector gi = (scale_i * setup.s) * f.values;
    Vector gj = (scale_j * setup.s) * f.values;
    return gi * gj.transpose();
}

}  // namespace mgi
