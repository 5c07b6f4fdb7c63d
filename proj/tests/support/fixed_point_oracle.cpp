#include "fixed_point_oracle.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace oracle {

using cd = std::complex<double>;

topodetect::PowerFlowSolution solve_fixed_point(const topodetect::AdmittanceMatrix& ybus,
                                                const topodetect::InjectionSnapshot& inj, double tol,
                                                int max_sweeps) {
    const auto n = ybus.size();
    const auto& y = ybus.entries;
    std::vector<cd> v(n, cd(1.0, 0.0));
    v[ybus.slack_index] = cd(ybus.slack_voltage, 0.0);

    for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
        double change = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (k == ybus.slack_index) continue;
            const auto kk = static_cast<Eigen::Index>(k);
            cd sum = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j != k) sum += y(kk, static_cast<Eigen::Index>(j)) * v[j];
            }
            const cd next = (std::conj(inj.power[k] / v[k]) - sum) / y(kk, kk);
            change = std::max(change, std::abs(next - v[k]));
            v[k] = next;
        }
        if (change < tol) {
            topodetect::PowerFlowSolution sol;
            for (const auto& vk : v) {
                sol.vm.push_back(std::abs(vk));
                sol.va_deg.push_back(std::arg(vk) * 180.0 / std::numbers::pi);
            }
            sol.iterations = sweep;
            return sol;
        }
    }
    throw std::runtime_error("fixed-point sweep did not converge");
}

}  // namespace oracle
