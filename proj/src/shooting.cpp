#include "spc/shooting.hpp"

#include <cmath>

namespace spc::detail {

namespace {
constexpr double big = 1e100;
}

void shoot_out(const DiscreteOperator& op, double E, int last, std::vector<double>& x, bool keep)
{
    const auto& d = op.diag;
    const auto& e = op.off;
    x.assign(last + 1, 0.0);
    x[0] = 1.0;
    if (last >= 1) x[1] = (E - d[0]) * x[0] / e[0];
    for (int k = 1; k < last; ++k) {
        x[k + 1] = ((E - d[k]) * x[k] - e[k - 1] * x[k - 1]) / e[k];
        double a = std::abs(x[k + 1]);
        if (a > big) {
            int from = keep ? 0 : k;
            for (int i = from; i <= k + 1; ++i) x[i] /= a;
        }
    }
}

void shoot_in(const DiscreteOperator& op, double E, int first, std::vector<double>& y, bool keep)
{
    const auto& d = op.diag;
    const auto& e = op.off;
    const int N = op.dim();
    y.assign(N, 0.0);
    y[N - 1] = 1.0;
    if (N - 2 >= first) y[N - 2] = (E - d[N - 1]) * y[N - 1] / e[N - 2];
    for (int k = N - 2; k > first; --k) {
        y[k - 1] = ((E - d[k]) * y[k] - e[k] * y[k + 1]) / e[k - 1];
        double a = std::abs(y[k - 1]);
        if (a > big) {
            int to = keep ? N - 1 : k;
            for (int i = k - 1; i <= to; ++i) y[i] /= a;
        }
    }
}

void continue_out(const DiscreteOperator& op, double E, int i0, std::vector<double>& x, int last)
{
    const auto& d = op.diag;
    const auto& e = op.off;
    if (static_cast<int>(x.size()) < last + 1) x.resize(last + 1, 0.0);
    for (int k = i0 + 1; k < last; ++k)
        x[k + 1] = ((E - d[k]) * x[k] - e[k - 1] * x[k - 1]) / e[k];
}

} // namespace spc::detail
