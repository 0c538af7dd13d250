#include "spc/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spc {

Shape parse_shape(const std::string& s)
{
    if (s == "well") return Shape::well;
    if (s == "flat") return Shape::flat;
    if (s == "none") return Shape::none;
    throw Error(ErrorKind::configuration, "unknown shape '" + s + "' (expected well, flat or none)");
}

std::string shape_name(Shape s)
{
    switch (s) {
    case Shape::well: return "well";
    case Shape::flat: return "flat";
    case Shape::none: return "none";
    }
    return "?";
}

double PotentialModel::shape_at(double r) const
{
    switch (shape) {
    case Shape::well: return r < radius ? 1.0 : 0.0;
    case Shape::flat: return 1.0;
    case Shape::none: return 0.0;
    }
    return 0.0;
}

double PotentialModel::shape_average(double a, double b) const
{
    switch (shape) {
    case Shape::flat: return 1.0;
    case Shape::none: return 0.0;
    case Shape::well:
        a = std::max(a, 0.0);
        if (b <= radius) return 1.0;
        if (a >= radius) return 0.0;
        return (radius - a) / (b - a);
    }
    return 0.0;
}

double PotentialModel::support() const
{
    switch (shape) {
    case Shape::well: return radius;
    case Shape::flat: return std::numeric_limits<double>::infinity();
    case Shape::none: return 0.0;
    }
    return 0.0;
}

double potential_at(const PotentialModel& m, double sigma, double r)
{
    return m.sign * m.lambda(sigma) * m.shape_at(r);
}

RadialGrid build_grid(double r_max, int n)
{
    if (!(r_max > 0.0) || !std::isfinite(r_max))
        throw Error(ErrorKind::configuration, "grid: r_max must be positive");
    if (n < 16)
        throw Error(ErrorKind::configuration, "grid: n must be at least 16");
    return RadialGrid{r_max, n, r_max / n};
}

bool same_grid(const RadialGrid& a, const RadialGrid& b)
{
    return a.n == b.n && a.r_max == b.r_max;
}

double RadialSpinor::r1(int idx) const
{
    return channel > 0 ? grid.r(idx + 1) : grid.r_half(idx);
}

double RadialSpinor::r2(int idx) const
{
    return channel > 0 ? grid.r_half(idx) : grid.r(idx + 1);
}

double RadialSpinor::norm2() const
{
    return (u1.squaredNorm() + u2.squaredNorm()) * grid.h;
}

RadialSpinor zero_spinor(const RadialGrid& g, int channel)
{
    RadialSpinor s;
    s.grid = g;
    s.channel = channel;
    s.u1 = Eigen::VectorXcd::Zero(g.n);
    s.u2 = Eigen::VectorXcd::Zero(g.n);
    return s;
}

cplx inner_product(const RadialSpinor& a, const RadialSpinor& b)
{
    if (!same_grid(a.grid, b.grid))
        throw Error(ErrorKind::usage, "inner_product: grid mismatch");
    if (a.channel != b.channel)
        throw Error(ErrorKind::usage, "inner_product: channel mismatch");
    return (a.u1.dot(b.u1) + a.u2.dot(b.u2)) * a.grid.h;   // dot() conjugates the left side
}

void normalize(RadialSpinor& s)
{
    double nn = std::sqrt(s.norm2());
    if (nn == 0.0) throw Error(ErrorKind::numerical, "normalize: zero spinor");
    s.u1 /= nn;
    s.u2 /= nn;
    s.norm = NormKind::unit;
}

DiscreteOperator assemble_operator(const RadialGrid& g, const PotentialModel& m, double sigma)
{
    if (m.channel == 0) throw Error(ErrorKind::configuration, "channel kappa must be nonzero");
    if (m.sign != 1 && m.sign != -1) throw Error(ErrorKind::configuration, "sign must be +1 or -1");

    DiscreteOperator op;
    op.grid = g;
    op.model = m;
    op.sigma = sigma;

    const int n = g.n;
    const double h = g.h;
    const double depth = m.sign * m.lambda(sigma);
    const double p = std::abs(m.channel);
    // the integer-point field carries +mass for kappa > 0 (upper component)
    const double m_int = m.channel > 0 ? +1.0 : -1.0;
    const double s = m.channel > 0 ? +1.0 : -1.0;

    op.diag.resize(2 * n - 1);
    op.off.resize(2 * n - 2);
    for (int j = 0; j < n; ++j)
        op.diag[2 * j] = depth * m.shape_average(j * h, (j + 1) * h) - m_int;
    for (int i = 1; i < n; ++i)
        op.diag[2 * i - 1] = depth * m.shape_average((i - 0.5) * h, (i + 0.5) * h) + m_int;

    // (r^-p d/dr r^p w) at half point j couples w_j and w_{j+1}
    for (int j = 0; j < n; ++j) {
        double rh = g.r_half(j);
        if (j >= 1)
            op.off[2 * j - 1] = -s * std::pow(g.r(j) / rh, p) / h;
        if (j + 1 <= n - 1)
            op.off[2 * j] = s * std::pow(g.r(j + 1) / rh, p) / h;
    }
    return op;
}

Eigen::MatrixXd DiscreteOperator::dense() const
{
    const int N = dim();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N, N);
    for (int i = 0; i < N; ++i) M(i, i) = diag[i];
    for (int i = 0; i + 1 < N; ++i) {
        M(i, i + 1) = off[i];
        M(i + 1, i) = off[i];
    }
    return M;
}

double hermiticity_residual(const Eigen::MatrixXd& m)
{
    double scale = m.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    return (m - m.transpose()).cwiseAbs().maxCoeff() / scale;
}

Eigen::VectorXcd DiscreteOperator::to_vector(const RadialSpinor& sp) const
{
    if (!same_grid(sp.grid, grid) || sp.channel != model.channel)
        throw Error(ErrorKind::usage, "spinor does not live on the operator's grid/channel");
    const int n = grid.n;
    const Eigen::VectorXcd& wi = model.channel > 0 ? sp.u1 : sp.u2;
    const Eigen::VectorXcd& wh = model.channel > 0 ? sp.u2 : sp.u1;
    Eigen::VectorXcd x(2 * n - 1);
    for (int j = 0; j < n; ++j) x[2 * j] = wh[j];
    for (int i = 1; i < n; ++i) x[2 * i - 1] = wi[i - 1];
    return x;
}

RadialSpinor DiscreteOperator::to_spinor(const Eigen::VectorXcd& x, NormKind kind) const
{
    const int n = grid.n;
    RadialSpinor sp = zero_spinor(grid, model.channel);
    sp.norm = kind;
    Eigen::VectorXcd& wi = model.channel > 0 ? sp.u1 : sp.u2;
    Eigen::VectorXcd& wh = model.channel > 0 ? sp.u2 : sp.u1;
    for (int j = 0; j < n; ++j) wh[j] = x[2 * j];
    for (int i = 1; i < n; ++i) wi[i - 1] = x[2 * i - 1];
    return sp;
}

RadialSpinor DiscreteOperator::to_spinor(const Eigen::VectorXd& x, NormKind kind) const
{
    return to_spinor(Eigen::VectorXcd(x.cast<cplx>()), kind);
}

Eigen::VectorXcd DiscreteOperator::apply(const Eigen::VectorXcd& x) const
{
    const int N = dim();
    Eigen::VectorXcd y = diag.cast<cplx>().cwiseProduct(x);
    y.head(N - 1) += off.cast<cplx>().cwiseProduct(x.tail(N - 1));
    y.tail(N - 1) += off.cast<cplx>().cwiseProduct(x.head(N - 1));
    return y;
}

int DiscreteOperator::index_near(double r) const
{
    int i = static_cast<int>(std::lround(r / grid.h));
    i = std::clamp(i, 1, grid.n - 2);
    return 2 * i - 1;
}

Eigen::VectorXd shape_weights(const DiscreteOperator& op)
{
    const int n = op.grid.n;
    const double h = op.grid.h;
    Eigen::VectorXd w(2 * n - 1);
    for (int j = 0; j < n; ++j) w[2 * j] = op.model.shape_average(j * h, (j + 1) * h);
    for (int i = 1; i < n; ++i) w[2 * i - 1] = op.model.shape_average((i - 0.5) * h, (i + 0.5) * h);
    return w;
}

} // namespace spc
