#include "doctest.h"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "sfspline/errors.hpp"
#include "sfspline/kernels.hpp"
#include "sfspline/rng.hpp"

using namespace sfs;

namespace {

// Independent polynomial oracle: Bernoulli polynomials in plain x form,
// B2(x) = x^2 - x + 1/6 and B4(x) = x^4 - 2x^3 + x^2 - 1/30, rather than the
// centered (x - 1/2) form the library uses.
double oracle_k2(double x) { return (x * x - x + 1.0 / 6.0) / 2.0; }

double oracle_k4(double x) {
    return (x * x * x * x - 2.0 * x * x * x + x * x - 1.0 / 30.0) / 24.0;
}

double oracle_cubic(double s, double t) {
    return oracle_k2(s) * oracle_k2(t) - oracle_k4(std::abs(s - t));
}

Matrix random_points(Index n, Index d, std::uint64_t seed) {
    Rng rng(seed);
    Matrix x(n, d);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < d; ++j) x(i, j) = rng.uniform();
    return x;
}

double simpson(double (*f)(double), int panels) {
    // Composite Simpson on [0,1]; panels must be even.
    double acc = f(0.0) + f(1.0);
    for (int i = 1; i < panels; ++i)
        acc += f(static_cast<double>(i) / panels) * (i % 2 == 1 ? 4.0 : 2.0);
    return acc / (3.0 * panels);
}

}  // namespace

TEST_CASE("scaled Bernoulli pieces: frozen exact values") {
    CHECK(bern_k1(0.3) == doctest::Approx(-0.2).epsilon(1e-15));
    CHECK(bern_k2(0.3) == doctest::Approx(-13.0 / 600.0).epsilon(1e-14));
    CHECK(bern_k4(0.4) == doctest::Approx(91.0 / 90000.0).epsilon(1e-14));
    CHECK(cubic_rk(0.3, 0.7) == doctest::Approx(-13.0 / 24000.0).epsilon(1e-12));
}

TEST_CASE("scaled Bernoulli pieces: zero mean over the unit interval") {
    CHECK(simpson(&bern_k1, 200) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::abs(simpson(&bern_k2, 200)) < 1e-12);
    CHECK(std::abs(simpson(&bern_k4, 200)) < 1e-10);
}

TEST_CASE("cubic kernel: matches the plain-Bernoulli oracle everywhere") {
    Rng rng(31);
    for (int t = 0; t < 1000; ++t) {
        const double a = rng.uniform();
        const double b = rng.uniform();
        CHECK(cubic_rk(a, b) == doctest::Approx(oracle_cubic(a, b)).epsilon(1e-13));
    }
}

TEST_CASE("cubic kernel: integrates to zero against constants") {
    // int_0^1 Kc(s, t) ds = 0 for each fixed t (quadrature to 1e-6).
    for (const double t : {0.05, 0.3, 0.5, 0.77, 0.99}) {
        const int panels = 2000;
        double acc = cubic_rk(0.0, t) + cubic_rk(1.0, t);
        for (int i = 1; i < panels; ++i)
            acc += cubic_rk(static_cast<double>(i) / panels, t) *
                   (i % 2 == 1 ? 4.0 : 2.0);
        CHECK(std::abs(acc / (3.0 * panels)) < 1e-6);
    }
}

TEST_CASE("kernel spec: derived null dimensions and validation") {
    CHECK(make_kernel_spec(KernelFamily::cubic_1d, 1).null_dim == 2);
    CHECK(make_kernel_spec(KernelFamily::thinplate_2d, 2).null_dim == 3);
    CHECK(make_kernel_spec(KernelFamily::ssanova_2way, 2).null_dim == 4);
    CHECK(make_kernel_spec(KernelFamily::ssanova_2way, 4).null_dim == 11);
    CHECK(make_kernel_spec(KernelFamily::ssanova_2way, 6).null_dim == 22);

    CHECK_THROWS_AS(make_kernel_spec(KernelFamily::cubic_1d, 2), invalid_input);
    CHECK_THROWS_AS(make_kernel_spec(KernelFamily::thinplate_2d, 3), invalid_input);

    CHECK(kernel_spec_from_string("ssanova", 3).family == KernelFamily::ssanova_2way);
    CHECK(to_string(kernel_spec_from_string("tps", 2).family) == "tps");
    CHECK_THROWS_AS(kernel_spec_from_string("matern", 2), invalid_input);
}

TEST_CASE("null basis: worked d=2 case and lexicographic interactions") {
    const KernelSpec spec = make_kernel_spec(KernelFamily::ssanova_2way, 2);
    Vector x(2);
    x << 0.3, 0.9;
    const Vector b = null_basis_eval(spec, x);
    REQUIRE(b.size() == 4);
    CHECK(b(0) == 1.0);
    CHECK(b(1) == doctest::Approx(-0.2).epsilon(1e-15));
    CHECK(b(2) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(b(3) == doctest::Approx(-0.08).epsilon(1e-14));

    const KernelSpec s3 = make_kernel_spec(KernelFamily::ssanova_2way, 3);
    Vector z(3);
    z << 0.1, 0.6, 0.8;
    const Vector b3 = null_basis_eval(s3, z);
    REQUIRE(b3.size() == 7);
    const double k1v[3] = {-0.4, 0.1, 0.3};
    for (Index j = 0; j < 3; ++j)
        CHECK(b3(1 + j) == doctest::Approx(k1v[j]).epsilon(1e-14));
    // pairs in (0,1), (0,2), (1,2) order
    CHECK(b3(4) == doctest::Approx(k1v[0] * k1v[1]).epsilon(1e-14));
    CHECK(b3(5) == doctest::Approx(k1v[0] * k1v[2]).epsilon(1e-14));
    CHECK(b3(6) == doctest::Approx(k1v[1] * k1v[2]).epsilon(1e-14));

    const KernelSpec tps = make_kernel_spec(KernelFamily::thinplate_2d, 2);
    const Vector bt = null_basis_eval(tps, x);
    CHECK(bt(0) == 1.0);
    CHECK(bt(1) == 0.3);
    CHECK(bt(2) == 0.9);

    Vector bad(2);
    bad << 0.5, 1.5;
    CHECK_THROWS_AS(null_basis_eval(spec, bad), invalid_input);
    CHECK_THROWS_AS(null_basis_eval(spec, z), invalid_input);  // wrong d
}

TEST_CASE("rk_eval: symmetry across families") {
    Rng rng(8);
    for (const auto& [family, d] :
         {std::pair{KernelFamily::cubic_1d, Index{1}},
          std::pair{KernelFamily::ssanova_2way, Index{4}},
          std::pair{KernelFamily::thinplate_2d, Index{2}}}) {
        const KernelSpec spec = make_kernel_spec(family, d);
        for (int t = 0; t < 1000; ++t) {
            Vector a(d), b(d);
            for (Index j = 0; j < d; ++j) {
                a(j) = rng.uniform();
                b(j) = rng.uniform();
            }
            CHECK(rk_eval(spec, a, b) == doctest::Approx(rk_eval(spec, b, a)).epsilon(1e-14));
        }
    }
}

TEST_CASE("thin-plate kernel: zero at coincidence, textbook value away") {
    const KernelSpec spec = make_kernel_spec(KernelFamily::thinplate_2d, 2);
    Vector s(2), t(2);
    s << 0.4, 0.6;
    CHECK(rk_eval(spec, s, s) == 0.0);
    t << 0.7, 0.2;
    const double r = std::sqrt(0.3 * 0.3 + 0.4 * 0.4);
    CHECK(rk_eval(spec, s, t) ==
          doctest::Approx(r * r * std::log(r) / (8.0 * M_PI)).epsilon(1e-13));
}

TEST_CASE("gram: matches the elementwise rk_eval oracle") {
    // 5x5 ssanova d=2 against the double loop, then a wider d=6 instance;
    // this doubles as the cross-check of the reduced pairwise-sum form used
    // by the simd column kernels.
    for (const auto& [family, d, na, nb] :
         {std::tuple{KernelFamily::ssanova_2way, Index{2}, Index{5}, Index{5}},
          std::tuple{KernelFamily::ssanova_2way, Index{6}, Index{40}, Index{13}},
          std::tuple{KernelFamily::cubic_1d, Index{1}, Index{17}, Index{9}},
          std::tuple{KernelFamily::thinplate_2d, Index{2}, Index{21}, Index{8}}}) {
        const KernelSpec spec = make_kernel_spec(family, d);
        const Matrix a = random_points(na, d, 100 + static_cast<std::uint64_t>(d));
        const Matrix b = random_points(nb, d, 200 + static_cast<std::uint64_t>(d));
        const Matrix g = gram(spec, a, b);
        REQUIRE(g.rows() == na);
        REQUIRE(g.cols() == nb);
        for (Index i = 0; i < na; ++i)
            for (Index j = 0; j < nb; ++j)
                CHECK(g(i, j) == doctest::Approx(rk_eval(
                                     spec, Vector(a.row(i).transpose()),
                                     Vector(b.row(j).transpose())))
                                     .epsilon(1e-12));
    }
}

TEST_CASE("gram: single pair equals rk_eval, empty input rejected") {
    const KernelSpec spec = make_kernel_spec(KernelFamily::ssanova_2way, 3);
    const Matrix a = random_points(1, 3, 5);
    const Matrix b = random_points(1, 3, 6);
    const Matrix g = gram(spec, a, b);
    CHECK(g(0, 0) == doctest::Approx(rk_eval(spec, Vector(a.row(0).transpose()),
                                             Vector(b.row(0).transpose())))
                         .epsilon(1e-14));
    CHECK_THROWS_AS(gram(spec, Matrix(0, 3), b), invalid_input);
    CHECK_THROWS_AS(gram(spec, a, Matrix(0, 3)), invalid_input);
    Matrix out_of_cube = a;
    out_of_cube(0, 1) = 1.0001;
    CHECK_THROWS_AS(gram(spec, out_of_cube, b), invalid_input);
}

TEST_CASE("gram: symmetric PSD for the true reproducing kernels") {
    for (const auto& [family, d] : {std::pair{KernelFamily::cubic_1d, Index{1}},
                                    std::pair{KernelFamily::ssanova_2way, Index{3}}}) {
        const KernelSpec spec = make_kernel_spec(family, d);
        const Matrix pts = random_points(40, d, 77);
        Matrix g = gram(spec, pts, pts);
        CHECK((g - g.transpose()).cwiseAbs().maxCoeff() < 1e-12);
        g.diagonal().array() += 1e-10;
        const Eigen::SelfAdjointEigenSolver<Matrix> eig(g);
        CHECK(eig.eigenvalues().minCoeff() >= -1e-8);
    }
}

TEST_CASE("thin-plate gram: conditionally positive on the side-condition space") {
    const KernelSpec spec = make_kernel_spec(KernelFamily::thinplate_2d, 2);
    const Matrix pts = random_points(30, 2, 91);
    const Matrix rss = gram(spec, pts, pts);
    const Matrix sstar = null_basis(spec, pts);
    const Eigen::HouseholderQR<Matrix> qr(sstar);
    const Matrix z = Matrix(qr.householderQ()).rightCols(30 - 3);

    Rng rng(17);
    for (int t = 0; t < 200; ++t) {
        Vector gamma(z.cols());
        for (Index j = 0; j < gamma.size(); ++j) gamma(j) = rng.normal();
        const Vector c = z * gamma;
        CHECK(c.dot(rss * c) >= -1e-8);
    }
}
