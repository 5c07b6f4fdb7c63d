#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "topodetect/network.hpp"

namespace topodetect {

/// Net complex injection (generation minus load) per bus index, in p.u.
/// The slack entry is ignored by the solvers.
struct InjectionSnapshot {
    std::vector<std::complex<double>> power;

    static InjectionSnapshot zeros(std::size_t bus_count) {
        return {std::vector<std::complex<double>>(bus_count)};
    }
};

struct PowerFlowSolution {
    std::vector<double> vm;      // p.u., per bus index
    std::vector<double> va_deg;  // degrees, per bus index
    int iterations = 0;
    double max_mismatch = 0.0;   // p.u.

    std::complex<double> voltage(std::size_t bus) const;
    Eigen::VectorXcd voltages() const;
};

struct SolverOptions {
    double tolerance = 1e-8;  // max |dP|,|dQ| in p.u.
    int max_iterations = 50;
};

/// Per-bus power mismatch: specified PQ injection minus v_k * conj((Y v)_k).
/// Entries are zero at the slack bus.
struct Mismatch {
    Eigen::VectorXd dp;
    Eigen::VectorXd dq;

    double max_abs() const;
};

Mismatch compute_mismatch(const AdmittanceMatrix& ybus, const InjectionSnapshot& inj,
                          const Eigen::VectorXcd& voltages);

/// Polar Newton-Raphson from a flat start. The slack is held at
/// ybus.slack_voltage at 0 degrees. Throws DivergedError when the mismatch is
/// still above tolerance after max_iterations, NumericalError when the
/// Jacobian is singular or the input injections are not finite.
PowerFlowSolution solve_newton_raphson(const AdmittanceMatrix& ybus, const InjectionSnapshot& inj,
                                       const SolverOptions& opts = {});

/// Complex power each bus injects into the network, S = v * conj(Y v).
Eigen::VectorXcd bus_power(const AdmittanceMatrix& ybus, const Eigen::VectorXcd& voltages);

}  // namespace topodetect
