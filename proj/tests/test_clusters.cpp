// SPDX-License-Identifier: Apache-2.0
//
// stfchan - space-time-frequency non-stationary THz channel simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <stfchan/clusters.hpp>

#include <catch_amalgamated.hpp>

using namespace stfchan;
using Catch::Approx;

TEST_CASE("cluster distances are increasing NEXP increments", "[clusters]")
{
    Rng rng(1);
    const int trials = 20000;
    double sum_first = 0.0;
    for (int k = 0; k < trials; ++k)
    {
        const auto d = draw_cluster_distances(rng, 5, 3.0, 1.5);
        REQUIRE(d.size() == 5);
        CHECK(d[0] > 3.0);
        for (std::size_t n = 1; n < d.size(); ++n)
            CHECK(d[n] > d[n - 1]);
        sum_first += d[0] - 3.0;
    }
    CHECK(sum_first / trials == Approx(1.5).epsilon(0.03));
    CHECK_THROWS_AS(draw_cluster_distances(rng, 1, 3.0, 0.0), std::domain_error);
}

TEST_CASE("cluster angles are wrapped", "[clusters]")
{
    Rng rng(2);
    for (int k = 0; k < 5000; ++k)
    {
        const Angles a = draw_cluster_angles(rng, 1.0, 3.0, 1.2, 3.0);
        CHECK(a.azimuth > -kPi);
        CHECK(a.azimuth <= kPi);
        CHECK(a.elevation >= -kPi / 2);
        CHECK(a.elevation <= kPi / 2);
    }
    const Angles z = draw_cluster_angles(rng, 0.0, 0.0, 0.2, 0.4);
    CHECK(z.elevation == Approx(0.2));
    CHECK(z.azimuth == Approx(0.4));
}

TEST_CASE("specular ray has the cluster distance", "[clusters]")
{
    Cluster c;
    c.center_distance = 7.0;
    c.center = {0.4, 0.1, -1.1, -0.2};
    c.rc_tx = 0.3;
    c.rc_rx = 0.7;
    CHECK(ray_total_distance(c, AngleSet{}) == Approx(7.0).epsilon(1e-14));
}

TEST_CASE("ray distance grows with offset magnitude", "[clusters]")
{
    Cluster c;
    c.center_distance = 5.0;
    c.center = {0.6, 0.0, -0.9, 0.0};
    c.rc_tx = 0.4;
    c.rc_rx = 0.6;
    double prev = ray_total_distance(c, AngleSet{});
    for (double o = 0.01; o < 1.2; o += 0.05)
    {
        const double d = ray_total_distance(c, {o, 0.0, 0.0, 0.0});
        CHECK(d >= prev);
        CHECK(ray_total_distance(c, {-o, 0.0, 0.0, 0.0}) == Approx(d).epsilon(1e-14));
        prev = d;
    }
    CHECK_THROWS_AS(ray_total_distance(c, {1.6, 0, 0, 0}), GeometryError);
}

TEST_CASE("ray offset statistics follow the cluster sigmas", "[clusters]")
{
    Rng rng(4);
    ClusterLaw law;
    law.ray_count_mode = RayCountMode::fixed;
    law.fixed_ray_count = 20000;
    law.ray_sigmas = {deg2rad(2.0), deg2rad(1.0), deg2rad(3.0), deg2rad(0.5)};
    const Cluster c = draw_cluster(rng, law, 0, 6.0);
    REQUIRE(c.rays.size() == 20000);
    double s[4] = {0, 0, 0, 0};
    for (const auto &r : c.rays)
    {
        s[0] += r.offsets.a_tx * r.offsets.a_tx;
        s[1] += r.offsets.e_tx * r.offsets.e_tx;
        s[2] += r.offsets.a_rx * r.offsets.a_rx;
        s[3] += r.offsets.e_rx * r.offsets.e_rx;
        CHECK(r.total_distance >= 6.0 - 1e-12);
        for (double ph : r.phases)
        {
            CHECK(ph > 0.0);
            CHECK(ph <= kTwoPi);
        }
    }
    const double n = static_cast<double>(c.rays.size());
    CHECK(std::sqrt(s[0] / n) == Approx(deg2rad(2.0)).epsilon(0.03));
    CHECK(std::sqrt(s[1] / n) == Approx(deg2rad(1.0)).epsilon(0.03));
    CHECK(std::sqrt(s[2] / n) == Approx(deg2rad(3.0)).epsilon(0.03));
    CHECK(std::sqrt(s[3] / n) == Approx(deg2rad(0.5)).epsilon(0.03));
}

TEST_CASE("ray ids are unique within a cluster", "[clusters]")
{
    Rng rng(8);
    ClusterLaw law;
    Cluster c = draw_cluster(rng, law, 3, 5.0);
    const std::size_t n = c.rays.size();
    CHECK(n >= 1);
    draw_ray(rng, c, law, 2);
    CHECK(c.rays.size() == n); // draw_ray does not append
    CHECK(c.next_ray_id == n + 1);
    for (std::size_t k = 0; k < n; ++k)
        CHECK(c.rays[k].id == k);
}

TEST_CASE("poisson ray count mean", "[clusters]")
{
    Rng rng(10);
    ClusterLaw law;
    law.lambda_tilde = 12.0;
    double acc = 0.0;
    for (int k = 0; k < 20000; ++k)
        acc += static_cast<double>(draw_ray_count(rng, law));
    CHECK(acc / 20000 == Approx(12.0).epsilon(0.02));
}

TEST_CASE("distance ratios", "[clusters]")
{
    Rng rng(12);
    ClusterLaw law;
    for (int k = 0; k < 2000; ++k)
    {
        const auto [t, r] = draw_distance_ratios(rng, law, false);
        CHECK(t + r == Approx(1.0));
        CHECK(t >= law.rc_min);
        CHECK(t <= law.rc_max);
        const auto [t2, r2] = draw_distance_ratios(rng, law, true);
        CHECK(t2 + r2 < 1.0);
    }
    law.rc_min = 0.6;
    law.rc_max = 0.8;
    CHECK_THROWS_AS(draw_distance_ratios(rng, law, true), ConfigError);
}

TEST_CASE("cluster set determinism", "[clusters]")
{
    ClusterLaw law;
    Rng a(99), b(99);
    const auto s1 = draw_cluster_set(a, law, 4, 3.0);
    const auto s2 = draw_cluster_set(b, law, 4, 3.0);
    REQUIRE(s1.clusters.size() == 4);
    for (std::size_t n = 0; n < 4; ++n)
    {
        CHECK(s1.clusters[n].center_distance == s2.clusters[n].center_distance);
        CHECK(s1.clusters[n].rays.size() == s2.clusters[n].rays.size());
        CHECK(s1.clusters[n].id == n);
    }
}

TEST_CASE("cluster law validation", "[clusters]")
{
    ClusterLaw law;
    CHECK_NOTHROW(law.validate());
    law.rc_max = 1.0;
    CHECK_THROWS_AS(law.validate(), ConfigError);
    law = ClusterLaw{};
    law.d_bar_n = 0.0;
    CHECK_THROWS_AS(law.validate(), ConfigError);
}
