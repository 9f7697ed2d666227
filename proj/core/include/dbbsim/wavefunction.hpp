#pragma once

#include <array>
#include <complex>

#include "dbbsim/configuration.hpp"
#include "dbbsim/packet.hpp"

namespace dbb {

/// Double-slit layout: slit A at x = +d, slit B at x = -d, both at y = 0,
/// with a common group velocity toward the screen line y = screen_y.
struct SlitGeometry {
    double slit_half_separation = 5.0;  // d
    double screen_y = 25.0;
    double forward_speed = 5.0;

    double arrival_time() const { return screen_y / forward_speed; }

    /// Packet emerging from slit A. Transverse velocity is zero; the packets
    /// overlap downstream through dispersion alone.
    PacketParams packet_a(double sigma_x, double sigma_y) const
    {
        return {slit_half_separation, 0.0, sigma_x, sigma_y, 0.0, forward_speed};
    }
};

enum class StatisticsMode {
    Bosonic,           // symmetrized two-particle state
    MaxwellBoltzmann,  // bare product, no exchange symmetry
    SingleParticle,    // one particle in a two-slit superposition
};

/// Value, gradient and diagonal second derivatives of the two-particle state
/// at a configuration point. Component order: x1, y1, x2, y2.
struct WavefunctionEval {
    std::complex<double> value;
    std::array<std::complex<double>, 4> grad;
    std::array<std::complex<double>, 4> second;
};

/// The state frozen at one time, with all time-dependent axis factors
/// precomputed. Quadrature, sampling and counting loops evaluate millions of
/// points at fixed t; going through a snapshot makes each evaluation a handful
/// of complex exponentials.
class WavefunctionSnapshot {
  public:
    std::complex<double> value(double x1, double y1, double x2, double y2) const;
    double density(double x1, double y1, double x2, double y2) const;
    WavefunctionEval evaluate(double x1, double y1, double x2, double y2) const;

    double time() const { return t_; }
    /// Upper bound for |Psi| at this time.
    double amplitude_scale() const { return amplitude_scale_; }

  private:
    friend class TwoParticleWaveFunction;
    WavefunctionSnapshot() = default;

    PacketAxisBasis ax_, ay_, bx_, by_;
    StatisticsMode mode_ = StatisticsMode::Bosonic;
    double inv_norm_ = 1.0;
    double t_ = 0.0;
    double amplitude_scale_ = 0.0;
};

/// The two-packet state. Immutable after construction; all evaluation methods
/// are pure, so concurrent use needs no synchronization.
///
/// Mode Bosonic:          (1/N) [psi_A(q1) psi_B(q2) + psi_A(q2) psi_B(q1)]
/// Mode MaxwellBoltzmann:        psi_A(q1) psi_B(q2)
/// Mode SingleParticle:   (1/N1) [psi_A(q1) + psi_B(q1)]      (q2 ignored)
///
/// The packets overlap, so N is not the orthogonal-case sqrt(2):
/// N = sqrt(2 (1 + |<psi_A|psi_B>|^2)), with the overlap evaluated at t = 0
/// by quadrature (it is conserved by the free evolution).
class TwoParticleWaveFunction {
  public:
    TwoParticleWaveFunction(PacketParams packet_a, PacketParams packet_b,
                            PhysicalConstants constants, StatisticsMode mode);

    /// Mirror-slit construction: packet B is packet A reflected in x = 0.
    static TwoParticleWaveFunction from_geometry(const SlitGeometry& geometry, double sigma_x,
                                                 double sigma_y, PhysicalConstants constants,
                                                 StatisticsMode mode);

    std::complex<double> value(const ConfigurationPoint& q) const;
    WavefunctionEval evaluate(const ConfigurationPoint& q) const;

    /// Frozen-time evaluator for hot loops at fixed t.
    WavefunctionSnapshot at_time(double t) const;

    /// |Psi|^2 at q.
    double density(const ConfigurationPoint& q) const;

    /// Quantum potential Q = -(hbar^2 / 2m) (lap R) / R with R = |Psi|, all
    /// derivatives analytic. The Laplacian of R is expressed through Psi and
    /// its derivatives via R^2 = Psi Psi*, avoiding the phase branch cut.
    /// Throws NodeProximityError when |Psi| <= node_epsilon * amplitude_scale.
    double quantum_potential(const ConfigurationPoint& q, double node_epsilon = 1e-10) const;

    /// Upper bound for |Psi| at time t; node thresholds are relative to this.
    double amplitude_scale(double t) const;

    const PacketParams& packet_a() const { return packet_a_; }
    const PacketParams& packet_b() const { return packet_b_; }
    const PhysicalConstants& constants() const { return constants_; }
    StatisticsMode mode() const { return mode_; }
    /// <psi_A|psi_B> single-particle overlap at t = 0.
    std::complex<double> overlap() const { return overlap_; }
    double normalization() const { return normalization_; }

  private:
    PacketParams packet_a_;
    PacketParams packet_b_;
    PhysicalConstants constants_;
    StatisticsMode mode_;
    std::complex<double> overlap_;
    double normalization_;
};

/// Spec-level free functions mirroring the evaluation methods.
inline std::complex<double> wavefunction_value(const TwoParticleWaveFunction& w,
                                               const ConfigurationPoint& q)
{
    return w.value(q);
}

/// (d/dx_i, d/dy_i) for particle_index in {1, 2}.
std::array<std::complex<double>, 2> wavefunction_gradient(const TwoParticleWaveFunction& w,
                                                          const ConfigurationPoint& q,
                                                          int particle_index);

inline double density(const TwoParticleWaveFunction& w, const ConfigurationPoint& q)
{
    return w.density(q);
}

inline double quantum_potential(const TwoParticleWaveFunction& w, const ConfigurationPoint& q,
                                double node_epsilon = 1e-10)
{
    return w.quantum_potential(q, node_epsilon);
}

/// Q from an already-computed evaluation; no node check. Exposed so that
/// algebraic properties of the formula itself (gauge invariance) are testable.
double quantum_potential_from_eval(const WavefunctionEval& eval, const PhysicalConstants& c);

}  // namespace dbb
