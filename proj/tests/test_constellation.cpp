// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "dstm/constellation.hpp"
#include "dstm/errors.hpp"

using namespace dstm;

namespace {

ConstellationSet axes_set(double r1, double r2) {
    ConstellationSet set;
    set.nu = 0.0;
    set.points = {cplx(-r1, 0), cplx(r1, 0), cplx(0, -r2), cplx(0, r2)};
    set.radii = {r1, r2};
    return set;
}

}  // namespace

TEST_CASE("closed-form four-point set") {
    const ConstellationSet m1 = closed_form_m4();
    CHECK(m1.radii[0] == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-14));
    CHECK(m1.radii[1] == doctest::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-14));

    double power = 0.0;
    for (const auto& z : m1.points) power += std::norm(z);
    CHECK(power / 4 == doctest::Approx(1.0).epsilon(1e-14));

    // Both binding terms have magnitude 4/3 at the optimum.
    CHECK(min_delta_metric(m1) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(objective(m1, 4) == doctest::Approx(std::pow(4.0 / 3.0, 4)).epsilon(1e-12));

    CHECK(check_criteria(m1, 1e-9).all_ok());
}

TEST_CASE("objective evaluation") {
    SUBCASE("coincident points floor the metric at zero") {
        ConstellationSet set = closed_form_m4();
        set.points.push_back(set.points[0]);
        CHECK(objective(set, 4) == 0.0);
    }

    SUBCASE("antipodal pair on the x-axis") {
        ConstellationSet pair;
        pair.points = {cplx(0.7, 0), cplx(-0.7, 0)};
        CHECK(objective(pair, 3) == doctest::Approx(std::pow(1.4, 6)).epsilon(1e-12));
    }

    SUBCASE("singleton rejected") {
        ConstellationSet single;
        single.points = {cplx(1, 0)};
        CHECK_THROWS_AS(objective(single, 4), DimensionError);
    }
}

TEST_CASE("criteria report") {
    SUBCASE("unit-circle QPSK fails the constant-x*y criterion") {
        ConstellationSet qpsk;
        qpsk.nu = 0.0;
        const double c = std::sqrt(0.5);
        qpsk.points = {cplx(c, c), cplx(-c, c), cplx(-c, -c), cplx(c, -c)};
        const CriteriaReport rep = check_criteria(qpsk, 1e-9);
        CHECK_FALSE(rep.quasi_unitary_ok);
        CHECK(rep.quasi_unitary_residual == doctest::Approx(0.5));
        CHECK(rep.power_ok);  // unit circle still has mean power 1
    }

    SUBCASE("scaling by 1.1 fails the power criterion with residual 0.21") {
        ConstellationSet scaled = closed_form_m4();
        for (auto& p : scaled.points) p *= 1.1;
        for (auto& r : scaled.radii) r *= 1.1;
        const CriteriaReport rep = check_criteria(scaled, 1e-9);
        CHECK_FALSE(rep.power_ok);
        CHECK(rep.power_residual == doctest::Approx(0.21));
    }

    SUBCASE("same-circle pairing passes feasibility but kills the metric") {
        ConstellationSet same;
        same.nu = 0.0;
        same.points = {cplx(1, 0), cplx(-1, 0), cplx(0, 1), cplx(0, -1)};
        same.radii = {1.0, 1.0};
        const CriteriaReport rep = check_criteria(same, 1e-9);
        CHECK(rep.quasi_unitary_ok);
        CHECK(rep.power_ok);
        CHECK_FALSE(rep.performance_ok);
        CHECK(rep.metric == 0.0);
    }
}

TEST_CASE("optimizer recovers the closed form at M = 4") {
    const ConstellationSet opt = optimize(4, 0.0, 4, 20, 123);
    const ConstellationSet ref = closed_form_m4();
    for (int i = 0; i < 2; ++i) CHECK(opt.radii[i] == doctest::Approx(ref.radii[i]).epsilon(1e-6));
    for (int i = 0; i < 4; ++i) {
        CHECK(opt.points[i].real() == doctest::Approx(ref.points[i].real()).epsilon(1e-6).scale(1.0));
        CHECK(opt.points[i].imag() == doctest::Approx(ref.points[i].imag()).epsilon(1e-6).scale(1.0));
    }
}

TEST_CASE("optimizer determinism and feasibility") {
    SUBCASE("bit-reproducible for fixed arguments") {
        const ConstellationSet a = optimize(6, 0.07, 4, 8, 42);
        const ConstellationSet b = optimize(6, 0.07, 4, 8, 42);
        REQUIRE(a.size() == b.size());
        for (int i = 0; i < a.size(); ++i) {
            CHECK(a.points[i].real() == b.points[i].real());
            CHECK(a.points[i].imag() == b.points[i].imag());
        }
    }

    SUBCASE("every returned set is feasible") {
        for (int m : {4, 6, 8})
            for (double nu : {0.0, 0.1, 0.3, 0.45}) {
                const ConstellationSet set = optimize(m, nu, 4, 6, 1000 + m);
                INFO("m=" << m << " nu=" << nu);
                CHECK(check_criteria(set, 1e-9).all_ok());
            }
    }

    SUBCASE("negative nu mirrors the positive solution") {
        const ConstellationSet neg = optimize(4, -0.1, 4, 8, 5);
        CHECK(check_criteria(neg, 1e-9).all_ok());
        CHECK(neg.nu == doctest::Approx(-0.1));
    }

    SUBCASE("invalid requests") {
        CHECK_THROWS_AS(optimize(3, 0.0, 4, 5, 1), ConfigError);
        CHECK_THROWS_AS(optimize(4, 0.0, 4, 0, 1), ConfigError);
        CHECK_THROWS_AS(optimize(4, 2.0, 4, 5, 1), InfeasibleDesignError);
        CHECK_THROWS_AS(optimize(4, 0.6, 4, 5, 1), InfeasibleDesignError);
    }
}

TEST_CASE("gain is non-increasing in nu") {
    double prev = std::numeric_limits<double>::infinity();
    for (double nu : {0.0, 0.05, 0.1, 0.2}) {
        const double gain = min_delta_metric(optimize(4, nu, 4, 12, 77));
        CHECK(gain <= prev + 1e-9);
        prev = gain;
    }
}

TEST_CASE("eight-point golden values") {
    const ConstellationSet opt = optimize(8, 0.0, 4, 50, 7);

    SUBCASE("frozen radii and metric") {
        const double expect_r[4] = {0.34844965, 0.77915712, 1.04534896, 1.47605642};
        REQUIRE(opt.radii.size() == 4);
        for (int i = 0; i < 4; ++i)
            CHECK(opt.radii[i] == doctest::Approx(expect_r[i]).epsilon(1e-6));
        CHECK(min_delta_metric(opt) == doctest::Approx(0.48566865).epsilon(1e-6));
    }

    SUBCASE("value is stable across seeds") {
        const double ref = min_delta_metric(opt);
        CHECK(min_delta_metric(optimize(8, 0.0, 4, 50, 1234)) == doctest::Approx(ref).epsilon(1e-6));
    }

    SUBCASE("matches the repo golden file") {
        const ConstellationSet golden =
            read_constellation_file(std::string(DSTM_DATA_DIR) + "/m2.txt");
        REQUIRE(golden.size() == opt.size());
        for (int i = 0; i < opt.size(); ++i)
            CHECK(std::abs(golden.points[i] - opt.points[i]) < 1e-9);
    }
}

TEST_CASE("closed-form optimum is a local maximum along the power constraint") {
    const double s1 = 1.0 / 3.0;
    const double base = min_delta_metric(closed_form_m4());
    for (double d : {1e-3, -1e-3}) {
        const ConstellationSet perturbed =
            axes_set(std::sqrt(s1 + d), std::sqrt(2.0 - s1 - d));
        CHECK(min_delta_metric(perturbed) <= base + 1e-12);
    }
}

TEST_CASE("constellation file io") {
    SUBCASE("round trip") {
        const ConstellationSet m1 = closed_form_m4();
        std::stringstream ss;
        write_constellation(ss, m1);
        const ConstellationSet back = read_constellation(ss);
        REQUIRE(back.size() == 4);
        CHECK(back.nu == m1.nu);
        for (int i = 0; i < 4; ++i) CHECK(back.points[i] == m1.points[i]);
        REQUIRE(back.radii.size() == 2);
        CHECK(back.radii[0] == doctest::Approx(m1.radii[0]).epsilon(1e-15));
    }

    SUBCASE("bad input") {
        std::istringstream bad("x y z");
        CHECK_THROWS_AS(read_constellation(bad), IoError);
        std::istringstream truncated("4 0\n1 0\n");
        CHECK_THROWS_AS(read_constellation(truncated), IoError);
    }

    SUBCASE("square QAM baseline") {
        const ConstellationSet qam = square_qam(16, 1.0 / 3.0);
        CHECK(qam.size() == 16);
        double power = 0.0;
        for (const auto& z : qam.points) power += std::norm(z);
        CHECK(power / 16 == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
        CHECK(qam.radii.size() == 8);  // antipodal pairs
        CHECK_THROWS_AS(square_qam(8, 1.0), ConfigError);
    }
}
