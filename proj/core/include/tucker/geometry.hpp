#pragma once

#include <cstdint>

#include "tucker/point.hpp"
#include "tucker/smallmat.hpp"

namespace tucker {

/// Scaled inner product on tangent vectors at x:
///   sum_d <xi_Ud, eta_Ud (G_d G_d^T)> + <xi_G, eta_G>.
double metric(const TuckerPoint& x, const TuckerTangent& xi,
              const TuckerTangent& eta);

double metric_norm(const TuckerPoint& x, const TuckerTangent& xi);

/// Projects an ambient 4-tuple onto the tangent space:
///   Y_Ud - U_d S_Ud (G_d G_d^T)^{-1}, core block unchanged,
/// where S_Ud solves S W_d + W_d S = W_d (Y_Ud^T U_d + U_d^T Y_Ud) W_d.
/// Idempotent; the residual Y - Psi(Y) is metric-orthogonal to the tangent
/// space.
TuckerTangent project_tangent(const TuckerPoint& x, const TuckerTangent& ambient,
                              bool ridge = false);

/// Projects a tangent vector onto the horizontal space by removing the
/// vertical component (U_d O_d, -(G x1 O_1 + G x2 O_2 + G x3 O_3)) whose skew
/// triple solves the coupled Lyapunov system with right-hand sides
///   Skew(U_d^T eta_Ud W_d) + Skew(G_d eta_Gd^T).
TuckerTangent project_horizontal(const TuckerPoint& x, const TuckerTangent& eta,
                                 bool ridge = false);

/// max_d || Sym(W_d zeta_Ud^T U_d + zeta_Gd G_d^T) asymmetry ||_F scaled by
/// nothing: measures how far zeta is from the horizontal space.
double horizontality_error(const TuckerPoint& x, const TuckerTangent& zeta);

/// (uf(U_d + xi_Ud), G + xi_G): moves along xi and re-orthonormalizes via the
/// polar factor.
TuckerPoint retract(const TuckerPoint& x, const TuckerTangent& xi);

/// Transports xi from x to retract(x, eta): project onto the tangent space,
/// then onto the horizontal space, both at the destination point.
TuckerTangent transport(const TuckerPoint& x, const TuckerTangent& eta,
                        const TuckerTangent& xi, bool ridge = false);

/// Transport with the destination point already computed.
TuckerTangent transport_to(const TuckerPoint& y, const TuckerTangent& xi,
                           bool ridge = false);

/// (U_d O_d, G x1 O_1^T x2 O_2^T x3 O_3^T): leaves the represented tensor
/// unchanged.
TuckerPoint group_act(const TuckerPoint& x, const GroupElement& o);

/// Tangent blocks transform like the point blocks.
TuckerTangent group_act_tangent(const TuckerTangent& z, const GroupElement& o);

/// Vertical vector (U_d O_d, -(G x1 O_1 + G x2 O_2 + G x3 O_3)) for a given
/// skew triple; spans the directions along an equivalence class.
TuckerTangent vertical_vector(const TuckerPoint& x, const SkewTriple& omega);

/// Product geometry with the unscaled Euclidean metric; baseline only.
double euclid_metric(const TuckerPoint& x, const TuckerTangent& xi,
                     const TuckerTangent& eta);
TuckerTangent euclid_project_tangent(const TuckerPoint& x,
                                     const TuckerTangent& ambient);

/// Random point: factors are orthogonal factors of standard Gaussian
/// matrices, core is standard Gaussian. Deterministic per seed.
TuckerPoint rand_point(const Dims& dims, const Dims& ranks, std::uint64_t seed);

/// Random horizontal tangent: Gaussian ambient vector pushed through the
/// tangent and horizontal projectors. Deterministic per seed.
TuckerTangent rand_tangent(const TuckerPoint& x, std::uint64_t seed);

/// Random orthogonal rotations, one per mode. Deterministic per seed.
GroupElement rand_group_element(const Dims& ranks, std::uint64_t seed);

/// Gaussian ambient 4-tuple (not tangent). Deterministic per seed.
TuckerTangent rand_ambient(const TuckerPoint& x, std::uint64_t seed);

}  // namespace tucker
