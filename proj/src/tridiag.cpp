#include "spc/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spc/error.hpp"

namespace spc::tridiag {

int count_below(const Eigen::VectorXd& d, const Eigen::VectorXd& e, double x)
{
    const int N = static_cast<int>(d.size());
    const double tiny = std::numeric_limits<double>::min();
    int c = 0;
    double q = d[0] - x;
    for (int i = 0;; ++i) {
        if (q == 0.0) q = -tiny;
        if (q < 0.0) ++c;
        if (i + 1 == N) break;
        q = d[i + 1] - x - e[i] * e[i] / q;
    }
    return c;
}

std::pair<double, double> gershgorin(const Eigen::VectorXd& d, const Eigen::VectorXd& e)
{
    const int N = static_cast<int>(d.size());
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int i = 0; i < N; ++i) {
        double r = (i > 0 ? std::abs(e[i - 1]) : 0.0) + (i + 1 < N ? std::abs(e[i]) : 0.0);
        lo = std::min(lo, d[i] - r);
        hi = std::max(hi, d[i] + r);
    }
    return {lo, hi};
}

double eigenvalue(const Eigen::VectorXd& d, const Eigen::VectorXd& e, int k)
{
    auto [lo, hi] = gershgorin(d, e);
    // invariant: count_below(lo) <= k < count_below(hi)
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (count_below(d, e, mid) > k) hi = mid;
        else lo = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<double> eigenvalues_in(const Eigen::VectorXd& d, const Eigen::VectorXd& e,
                                   double a, double b)
{
    std::vector<double> out;
    int ca = count_below(d, e, a);
    // eigenvalue exactly at a counts as not below a; exclude it (open interval)
    int cb = count_below(d, e, b);
    for (int k = ca; k < cb; ++k) {
        double v = eigenvalue(d, e, k);
        if (v > a && v < b) out.push_back(v);
    }
    return out;
}

Eigen::VectorXd solve_shifted(const Eigen::VectorXd& d, const Eigen::VectorXd& e,
                              double shift, const Eigen::VectorXd& b)
{
    const int N = static_cast<int>(d.size());
    // working copies: sub (dl), diag (dd), super (du), second super (du2)
    Eigen::VectorXd dl = e, dd = d.array() - shift, du = e, du2 = Eigen::VectorXd::Zero(std::max(N - 2, 0));
    Eigen::VectorXd x = b;
    const double tiny = std::numeric_limits<double>::epsilon() * (d.cwiseAbs().maxCoeff() + e.cwiseAbs().maxCoeff() + std::abs(shift));
    for (int i = 0; i + 1 < N; ++i) {
        if (std::abs(dd[i]) >= std::abs(dl[i])) {
            if (dd[i] == 0.0) dd[i] = tiny;
            double f = dl[i] / dd[i];
            dd[i + 1] -= f * du[i];
            x[i + 1] -= f * x[i];
            dl[i] = 0.0;
        } else {
            // swap rows i and i+1
            double f = dd[i] / dl[i];
            dd[i] = dl[i];
            double t = dd[i + 1];
            dd[i + 1] = du[i] - f * t;
            if (i + 2 < N) {
                du2[i] = du[i + 1];
                du[i + 1] = -f * du2[i];
            }
            du[i] = t;
            std::swap(x[i], x[i + 1]);
            x[i + 1] -= f * x[i];
        }
    }
    if (dd[N - 1] == 0.0) dd[N - 1] = tiny;
    x[N - 1] /= dd[N - 1];
    if (N > 1) x[N - 2] = (x[N - 2] - du[N - 2] * x[N - 1]) / dd[N - 2];
    for (int i = N - 3; i >= 0; --i)
        x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / dd[i];
    return x;
}

Eigen::VectorXd eigenvector(const Eigen::VectorXd& d, const Eigen::VectorXd& e, double lambda)
{
    const int N = static_cast<int>(d.size());
    Eigen::VectorXd x = Eigen::VectorXd::Ones(N);
    // deterministic, not orthogonal to any particular eigenvector in practice
    for (int i = 0; i < N; ++i) x[i] += 0.1 * std::sin(0.7 * i);
    x.normalize();
    for (int it = 0; it < 4; ++it) {
        Eigen::VectorXd y = solve_shifted(d, e, lambda, x);
        double nn = y.norm();
        if (!std::isfinite(nn) || nn == 0.0)
            throw Error(ErrorKind::numerical, "inverse iteration broke down");
        x = y / nn;
    }
    return x;
}

} // namespace spc::tridiag
