#pragma once

#include <complex>

namespace dbb {

struct PhysicalConstants {
    double hbar = 1.0;
    double mass = 1.0;
};

/// Parameters of one free Gaussian wave packet, a product of independent
/// 1D packets in x and y. sigma_* is the initial rms width parameter.
struct PacketParams {
    double center_x = 0.0;
    double center_y = 0.0;
    double sigma_x = 1.0;
    double sigma_y = 1.0;
    double velocity_x = 0.0;
    double velocity_y = 0.0;
};

/// Packet obtained by reflecting `p` in the plane x = 0. Negating center and
/// velocity keeps the reflection identity psi'(x,y,t) == psi(-x,y,t) exact in
/// floating point, not just analytically.
PacketParams mirrored_in_x(const PacketParams& p);

/// Value and first/second spatial derivatives of a packet at one point.
struct PacketEval {
    std::complex<double> value;
    std::complex<double> dx;
    std::complex<double> dy;
    std::complex<double> dxx;
    std::complex<double> dyy;
};

/// One 1D factor with everything time-dependent precomputed. Repeated
/// evaluations at a fixed time (quadrature, rejection sampling) then cost a
/// single complex exponential each.
struct PacketAxisBasis {
    double drifted_center = 0.0;            // xi0 + u t
    double momentum = 0.0;                  // m u / hbar
    double half_ut = 0.0;                   // u t / 2
    std::complex<double> prefactor;         // (2 pi s_t^2)^(-1/4)
    std::complex<double> half_inv_width;    // 1 / (2 sigma0 s_t)
    std::complex<double> quarter_inv_width; // 1 / (4 sigma0 s_t)

    std::complex<double> value(double xi) const;
    /// value, d/dxi, d2/dxi2
    void eval(double xi, std::complex<double>& v, std::complex<double>& d1,
              std::complex<double>& d2) const;
};

PacketAxisBasis make_axis_basis(double center, double sigma0, double velocity,
                                const PhysicalConstants& c, double t);

/// Complex width parameter s_t = sigma0 (1 + i hbar t / (2 m sigma0^2)) of the
/// freely spreading 1D Gaussian.
std::complex<double> spread_parameter(double sigma0, const PhysicalConstants& c, double t);

/// rms width |s_t| = sigma0 sqrt(1 + (hbar t / (2 m sigma0^2))^2) at time t.
double packet_width(double sigma0, const PhysicalConstants& c, double t);

/// One normalized 1D spreading-Gaussian factor
///   f(xi,t) = (2 pi s_t^2)^(-1/4) exp(-(xi - xi0 - u t)^2 / (4 sigma0 s_t))
///             exp(i m u (xi - u t/2) / hbar),
/// an exact solution of the free 1D Schroedinger equation.
std::complex<double> packet_axis_value(double center, double sigma0, double velocity,
                                       const PhysicalConstants& c, double xi, double t);

/// Normalized free-particle spreading Gaussian, the product of 1D factors
/// in x and y.
std::complex<double> gaussian_packet_value(const PacketParams& p, const PhysicalConstants& c,
                                           double x, double y, double t);

/// Value plus analytic first and second derivatives in x and y.
PacketEval evaluate_packet(const PacketParams& p, const PhysicalConstants& c,
                           double x, double y, double t);

/// Peak modulus (2 pi sx(t)^2)^(-1/4) (2 pi sy(t)^2)^(-1/4) of the packet.
double packet_peak_modulus(const PacketParams& p, const PhysicalConstants& c, double t);

}  // namespace dbb
