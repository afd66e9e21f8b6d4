#include "mather_twist/tridiagonal.hpp"

#include <cassert>
#include <cmath>

#include "mather_twist/errors.hpp"

namespace mather_twist {

std::vector<double> CyclicTridiagonal::dense() const {
    const std::size_t n = size();
    std::vector<double> m(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        m[i * n + i] += diag[i];
        const std::size_t j = (i + 1) % n;
        m[i * n + j] += coupling[i];
        m[j * n + i] += coupling[i];
    }
    return m;
}

std::vector<double> CyclicTridiagonal::multiply(std::span<const double> x) const {
    const std::size_t n = size();
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] += diag[i] * x[i];
        const std::size_t j = (i + 1) % n;
        y[i] += coupling[i] * x[j];
        y[j] += coupling[i] * x[i];
    }
    return y;
}

std::optional<CyclicLdlt> CyclicLdlt::factor(const CyclicTridiagonal& a) {
    const std::size_t n = a.size();
    if (n == 0 || a.coupling.size() != n) throw UsageError("CyclicLdlt: bad matrix shape");
    CyclicLdlt f;
    f.n_ = n;
    if (n == 1) {
        f.dense2_[0] = a.diag[0] + 2.0 * a.coupling[0];
        if (!(f.dense2_[0] > 0.0)) return std::nullopt;
        return f;
    }
    if (n == 2) {
        const double off = a.coupling[0] + a.coupling[1];
        f.dense2_[0] = a.diag[0];
        f.dense2_[1] = off;
        f.dense2_[2] = a.diag[1];
        if (!(a.diag[0] > 0.0) || !(a.diag[0] * a.diag[1] - off * off > 0.0)) return std::nullopt;
        return f;
    }
    f.pivots_.assign(n, 0.0);
    f.lower_.assign(n - 2, 0.0);
    f.border_.assign(n - 1, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double d = a.diag[i];
        if (i > 0) d -= f.lower_[i - 1] * f.lower_[i - 1] * f.pivots_[i - 1];
        if (!(d > 0.0)) return std::nullopt;
        f.pivots_[i] = d;
        if (i + 2 < n) f.lower_[i] = a.coupling[i] / d;
        double target = 0.0;
        if (i == 0) target += a.coupling[n - 1];
        if (i == n - 2) target += a.coupling[n - 2];
        if (i > 0) target -= f.border_[i - 1] * f.pivots_[i - 1] * f.lower_[i - 1];
        f.border_[i] = target / d;
    }
    double last = a.diag[n - 1];
    for (std::size_t i = 0; i + 1 < n; ++i) last -= f.border_[i] * f.border_[i] * f.pivots_[i];
    if (!(last > 0.0)) return std::nullopt;
    f.pivots_[n - 1] = last;
    return f;
}

std::vector<double> CyclicLdlt::solve(std::span<const double> rhs) const {
    const std::size_t n = n_;
    assert(rhs.size() == n);
    if (n == 1) return {rhs[0] / dense2_[0]};
    if (n == 2) {
        const double a = dense2_[0], b = dense2_[1], c = dense2_[2];
        const double det = a * c - b * b;
        return {(c * rhs[0] - b * rhs[1]) / det, (a * rhs[1] - b * rhs[0]) / det};
    }
    std::vector<double> z(rhs.begin(), rhs.end());
    for (std::size_t i = 1; i + 1 < n; ++i) z[i] -= lower_[i - 1] * z[i - 1];
    for (std::size_t i = 0; i + 1 < n; ++i) z[n - 1] -= border_[i] * z[i];
    for (std::size_t i = 0; i < n; ++i) z[i] /= pivots_[i];
    std::vector<double> x(n);
    x[n - 1] = z[n - 1];
    x[n - 2] = z[n - 2] - border_[n - 2] * x[n - 1];
    for (std::size_t i = n - 2; i-- > 0;)
        x[i] = z[i] - lower_[i] * x[i + 1] - border_[i] * x[n - 1];
    return x;
}

namespace {

// Thomas algorithm; sub[i] = A[i][i-1], sup[i] = A[i][i+1].
std::vector<double> thomas(std::vector<double> sub, std::vector<double> dia,
                           std::vector<double> sup, std::vector<double> rhs) {
    const std::size_t n = dia.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double m = sub[i] / dia[i - 1];
        dia[i] -= m * sup[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    std::vector<double> x(n);
    x[n - 1] = rhs[n - 1] / dia[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - sup[i] * x[i + 1]) / dia[i];
    return x;
}

}  // namespace

std::vector<double> solve_cyclic_sherman_morrison(const CyclicTridiagonal& a,
                                                  std::span<const double> rhs) {
    const std::size_t n = a.size();
    if (n < 3) throw UsageError("solve_cyclic_sherman_morrison: n must be >= 3");
    std::vector<double> sub(n, 0.0), sup(n, 0.0), dia(a.diag);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        sup[i] = a.coupling[i];
        sub[i + 1] = a.coupling[i];
    }
    const double corner = a.coupling[n - 1];
    const double gamma = -dia[0];
    dia[0] -= gamma;
    dia[n - 1] -= corner * corner / gamma;
    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = corner;
    const std::vector<double> y = thomas(sub, dia, sup, std::vector<double>(rhs.begin(), rhs.end()));
    const std::vector<double> z = thomas(sub, dia, sup, u);
    const double vy = y[0] + corner / gamma * y[n - 1];
    const double vz = z[0] + corner / gamma * z[n - 1];
    const double factor = vy / (1.0 + vz);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] - factor * z[i];
    return x;
}

}  // namespace mather_twist
