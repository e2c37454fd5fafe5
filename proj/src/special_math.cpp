#include "mucap/special_math.hpp"

#include <cmath>
#include <limits>

#include "mucap/errors.hpp"

namespace mucap {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209;
constexpr double kLn2 = 0.69314718055994530941723212;

// Ei power series: gamma + ln|x| + sum x^k/(k k!). All terms positive for
// x > 0; alternating and decaying for -1 <= x < 0.
double ei_series(double x) {
    long double sum = 0.0L;
    long double term = 1.0L;
    const long double lx = static_cast<long double>(x);
    for (int k = 1; k < 4000; ++k) {
        term *= lx / k;
        const long double add = term / k;
        sum += add;
        if (fabsl(add) < 1e-20L * (fabsl(sum) + 1e-30L)) break;
    }
    return static_cast<double>(sum + kEulerGamma + logl(fabsl(lx)));
}

// E1(y) = exp(-y) * CF, y > 1, modified Lentz on the standard continued
// fraction b0=y+1, a_k=-k^2, b_k=y+2k+1.
double e1_continued_fraction(double y) {
    const double tiny = 1e-300;
    double b = y + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int k = 1; k < 1000; ++k) {
        const double a = -static_cast<double>(k) * k;
        b += 2.0;
        d = a * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + a / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(-y) * h;
}

} // namespace

double exp_integral_ei(double x) {
    if (x == 0.0 || std::isnan(x)) {
        throw DomainError("exp_integral_ei: logarithmic singularity at x = 0");
    }
    if (x > 709.0) {
        throw RangeError("exp_integral_ei: overflow for x > ~709");
    }
    if (x > 0.0) {
        return ei_series(x);
    }
    const double y = -x;
    if (y <= 1.0) {
        return ei_series(x);
    }
    return -e1_continued_fraction(y);
}

double digamma(double x) {
    if (!(x > 0.0)) {
        throw DomainError("digamma: requires x > 0");
    }
    double acc = 0.0;
    while (x < 10.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    // asymptotic series with Bernoulli coefficients
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    double series = 0.0;
    static const double b[] = {
        1.0 / 12.0,   -1.0 / 120.0,   1.0 / 252.0,      -1.0 / 240.0,
        1.0 / 132.0,  -691.0 / 32760.0, 1.0 / 12.0,
    };
    double p = inv2;
    for (double coeff : b) {
        series += coeff * p;
        p *= inv2;
    }
    return acc + std::log(x) - 0.5 * inv - series;
}

double log_det_hermitian_bits(const MatrixXcd& a) {
    if (a.rows() != a.cols()) {
        throw DomainError("log_det_hermitian_bits: matrix must be square");
    }
    if (a.rows() == 0) return 0.0;
    Eigen::LLT<MatrixXcd> llt(a);
    if (llt.info() != Eigen::Success) {
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(a, Eigen::EigenvaluesOnly);
        const double min_eig = es.eigenvalues().minCoeff();
        throw SingularMatrixError(
            "log_det_hermitian_bits: matrix not positive definite", min_eig);
    }
    const auto diag = llt.matrixLLT().diagonal();
    double bits = 0.0;
    for (Eigen::Index i = 0; i < diag.size(); ++i) {
        bits += std::log2(diag[i].real());
    }
    return 2.0 * bits;
}

namespace {

// Alternating closed-form tail of delta_m; parts evaluated through log-gamma
// so factorials up to M ~ 256 never overflow. Safe only for lambda >= M
// where successive terms decay.
double delta_tail_closed_nats(double lambda, int m) {
    const long double ll = static_cast<long double>(lambda);
    const long double loglam = logl(ll);
    long double sum = 0.0L;
    for (int k = 1; k <= m - 1; ++k) {
        const long double part1 = expl(lgammal(static_cast<long double>(k)) -
                                       k * loglam - ll);
        const long double part2 =
            expl(lgammal(static_cast<long double>(m)) -
                 lgammal(static_cast<long double>(m - k)) -
                 logl(static_cast<long double>(k)) - k * loglam);
        const long double term = part1 - part2;
        sum += (k % 2 == 0) ? term : -term;
    }
    return static_cast<double>(sum);
}

// Poisson(lambda) mixture of digammas: E[psi(M + P)] in nats. Stable for any
// lambda; used where the alternating closed form would cancel catastrophically.
double delta_poisson_nats(double lambda, int m) {
    const double sd = std::sqrt(lambda);
    const long start =
        std::max(0L, static_cast<long>(lambda - 12.0 * sd - 30.0));
    const long stop = static_cast<long>(lambda + 12.0 * sd + 60.0);
    const long double ll = static_cast<long double>(lambda);
    long double w = expl(start * logl(ll) - ll -
                         lgammal(static_cast<long double>(start) + 1.0L));
    long double sum = 0.0L;
    for (long i = start; i <= stop; ++i) {
        sum += w * static_cast<long double>(digamma(static_cast<double>(m + i)));
        w *= ll / static_cast<long double>(i + 1);
    }
    return static_cast<double>(sum);
}

} // namespace

double delta_m(double lambda, int m_antennas) {
    if (!(lambda > 0.0)) {
        throw DomainError("delta_m: requires lambda > 0");
    }
    if (m_antennas < 1) {
        throw DomainError("delta_m: requires M >= 1");
    }
    if (lambda >= static_cast<double>(m_antennas)) {
        const double tail = delta_tail_closed_nats(lambda, m_antennas);
        return std::log2(lambda) +
               (-exp_integral_ei(-lambda) + tail) / kLn2;
    }
    return delta_poisson_nats(lambda, m_antennas) / kLn2;
}

double central_wishart_logdet_mean_bits(int m_antennas, int num_users) {
    if (num_users < 1 || m_antennas < num_users) {
        throw DomainError("central_wishart_logdet_mean_bits: requires M >= L >= 1");
    }
    double nats = 0.0;
    for (int k = 0; k < num_users; ++k) {
        nats += digamma(static_cast<double>(m_antennas - k));
    }
    return nats / kLn2;
}

} // namespace mucap
