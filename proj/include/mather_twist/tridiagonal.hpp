#pragma once

// Symmetric cyclic tridiagonal systems. A matrix of size n is stored as its
// diagonal d[0..n) and couplings e[0..n), where e[i] couples rows i and
// (i + 1) mod n. e[n-1] is the corner entry; set it to zero for an ordinary
// tridiagonal matrix. For n = 1 and n = 2 the couplings fold onto the same
// entries (self-coupling counts twice on the diagonal).

#include <optional>
#include <span>
#include <vector>

namespace mather_twist {

struct CyclicTridiagonal {
    std::vector<double> diag;
    std::vector<double> coupling;

    std::size_t size() const { return diag.size(); }
    /// Dense row-major expansion, for testing.
    std::vector<double> dense() const;
    std::vector<double> multiply(std::span<const double> x) const;
};

/// Bordered LDL^T factorization. Fill-in is confined to the last row, so the
/// cost is O(n). factor() returns nullopt unless every pivot is positive,
/// which doubles as a positive-definiteness test.
class CyclicLdlt {
public:
    static std::optional<CyclicLdlt> factor(const CyclicTridiagonal& a);
    std::vector<double> solve(std::span<const double> rhs) const;

private:
    std::size_t n_ = 0;
    std::vector<double> pivots_;    // D
    std::vector<double> lower_;     // L[i+1][i]
    std::vector<double> border_;    // L[n-1][i] for i < n-2
    double dense2_[3] = {0, 0, 0};  // n <= 2: packed symmetric matrix
};

/// Solves a (not necessarily definite) cyclic system through the Thomas
/// algorithm plus a Sherman-Morrison rank-one corner correction. Requires n >= 3.
std::vector<double> solve_cyclic_sherman_morrison(const CyclicTridiagonal& a,
                                                  std::span<const double> rhs);

}  // namespace mather_twist
