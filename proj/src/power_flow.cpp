#include "topodetect/power_flow.hpp"

#include <cmath>
#include <numbers>

#include "topodetect/errors.hpp"

namespace topodetect {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

std::vector<Eigen::Index> pq_indices(const AdmittanceMatrix& ybus) {
    std::vector<Eigen::Index> pq;
    for (std::size_t i = 0; i < ybus.size(); ++i) {
        if (i != ybus.slack_index) pq.push_back(static_cast<Eigen::Index>(i));
    }
    return pq;
}

void check_inputs(const AdmittanceMatrix& ybus, const InjectionSnapshot& inj) {
    if (inj.power.size() != ybus.size()) {
        throw ConfigError("injection snapshot has " + std::to_string(inj.power.size()) +
                          " entries for a " + std::to_string(ybus.size()) + "-bus network");
    }
    for (std::size_t i = 0; i < inj.power.size(); ++i) {
        if (i == ybus.slack_index) continue;
        if (!std::isfinite(inj.power[i].real()) || !std::isfinite(inj.power[i].imag())) {
            throw NumericalError("non-finite injection at bus index " + std::to_string(i));
        }
    }
}

}  // namespace

std::complex<double> PowerFlowSolution::voltage(std::size_t bus) const {
    return std::polar(vm[bus], va_deg[bus] / kRadToDeg);
}

Eigen::VectorXcd PowerFlowSolution::voltages() const {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(vm.size()));
    for (std::size_t i = 0; i < vm.size(); ++i) v(static_cast<Eigen::Index>(i)) = voltage(i);
    return v;
}

double Mismatch::max_abs() const {
    double m = 0.0;
    if (dp.size() > 0) m = std::max(m, dp.cwiseAbs().maxCoeff());
    if (dq.size() > 0) m = std::max(m, dq.cwiseAbs().maxCoeff());
    return m;
}

Eigen::VectorXcd bus_power(const AdmittanceMatrix& ybus, const Eigen::VectorXcd& voltages) {
    Eigen::VectorXcd current = ybus.entries * voltages;
    return voltages.cwiseProduct(current.conjugate());
}

Mismatch compute_mismatch(const AdmittanceMatrix& ybus, const InjectionSnapshot& inj,
                          const Eigen::VectorXcd& voltages) {
    const auto n = static_cast<Eigen::Index>(ybus.size());
    Eigen::VectorXcd s = bus_power(ybus, voltages);
    Mismatch m{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<std::size_t>(i) == ybus.slack_index) continue;
        const auto d = inj.power[static_cast<std::size_t>(i)] - s(i);
        m.dp(i) = d.real();
        m.dq(i) = d.imag();
    }
    return m;
}

PowerFlowSolution solve_newton_raphson(const AdmittanceMatrix& ybus, const InjectionSnapshot& inj,
                                       const SolverOptions& opts) {
    check_inputs(ybus, inj);
    if (!(opts.tolerance > 0.0)) throw ConfigError("solver tolerance must be positive");

    const auto n = static_cast<Eigen::Index>(ybus.size());
    const auto pq = pq_indices(ybus);
    const auto npq = static_cast<Eigen::Index>(pq.size());
    const auto& y = ybus.entries;

    Eigen::VectorXd vm = Eigen::VectorXd::Ones(n);
    Eigen::VectorXd va = Eigen::VectorXd::Zero(n);
    vm(static_cast<Eigen::Index>(ybus.slack_index)) = ybus.slack_voltage;

    auto assemble = [&]() {
        Eigen::VectorXcd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = std::polar(vm(i), va(i));
        return v;
    };

    Eigen::VectorXcd v = assemble();
    Mismatch mis = compute_mismatch(ybus, inj, v);
    double worst = mis.max_abs();
    int iter = 0;

    while (worst >= opts.tolerance) {
        if (iter >= opts.max_iterations) throw DivergedError(iter, worst);

        // dS/dVa = j diag(V) conj(diag(I) - Y diag(V))
        // dS/dVm = diag(V) conj(Y diag(V/|V|)) + conj(diag(I)) diag(V/|V|)
        const Eigen::VectorXcd current = y * v;
        const Eigen::VectorXcd vnorm = v.cwiseQuotient(vm.cast<std::complex<double>>());
        Eigen::MatrixXcd ds_dva = -(y * v.asDiagonal());
        ds_dva.diagonal() += current;
        ds_dva = std::complex<double>(0.0, 1.0) * (v.asDiagonal() * ds_dva.conjugate());
        Eigen::MatrixXcd ds_dvm = v.asDiagonal() * (y * vnorm.asDiagonal()).conjugate();
        ds_dvm.diagonal() += current.conjugate().cwiseProduct(vnorm);

        Eigen::MatrixXd jac(2 * npq, 2 * npq);
        Eigen::VectorXd rhs(2 * npq);
        for (Eigen::Index r = 0; r < npq; ++r) {
            const auto i = pq[static_cast<std::size_t>(r)];
            rhs(r) = mis.dp(i);
            rhs(npq + r) = mis.dq(i);
            for (Eigen::Index c = 0; c < npq; ++c) {
                const auto j = pq[static_cast<std::size_t>(c)];
                jac(r, c) = ds_dva(i, j).real();
                jac(r, npq + c) = ds_dvm(i, j).real();
                jac(npq + r, c) = ds_dva(i, j).imag();
                jac(npq + r, npq + c) = ds_dvm(i, j).imag();
            }
        }

        Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
        if (!lu.isInvertible()) throw NumericalError("singular power-flow Jacobian");
        const Eigen::VectorXd dx = lu.solve(rhs);
        if (!dx.allFinite()) throw NumericalError("non-finite Newton step");

        for (Eigen::Index r = 0; r < npq; ++r) {
            const auto i = pq[static_cast<std::size_t>(r)];
            va(i) += dx(r);
            vm(i) += dx(npq + r);
        }
        ++iter;
        v = assemble();
        mis = compute_mismatch(ybus, inj, v);
        worst = mis.max_abs();
    }

    PowerFlowSolution sol;
    sol.vm.assign(vm.data(), vm.data() + n);
    sol.va_deg.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) sol.va_deg[static_cast<std::size_t>(i)] = va(i) * kRadToDeg;
    sol.iterations = iter;
    sol.max_mismatch = worst;
    return sol;
}

}  // namespace topodetect
