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

#include <stfchan/cir.hpp>
#include <stfchan/model.hpp>

#include <catch_amalgamated.hpp>

using namespace stfchan;
using Catch::Approx;

namespace
{
    ModelParams small_model()
    {
        ModelParams mp;
        mp.tx_array.m_v = 3, mp.tx_array.m_h = 2;
        mp.tx_array.delta_v = mp.tx_array.delta_h = 0.5e-3;
        mp.rx_array.m_v = 2, mp.rx_array.m_h = 2;
        mp.rx_array.delta_v = mp.rx_array.delta_h = 0.5e-3;
        mp.rx_motion = {0.6, 0.0, kPi / 3.0};
        mp.band = {300e9, 300.4e9, 4, std::nullopt};
        mp.time = {4, 1e-3};
        mp.clusters.ray_count_mode = RayCountMode::fixed;
        mp.clusters.fixed_ray_count = 6;
        mp.initial_cluster_count = 4;
        mp.k_factor = 2.0;
        return mp;
    }
} // namespace

TEST_CASE("dipole pattern values", "[cir]")
{
    const auto g = dipole_pattern({kPi / 2.0, 0.0});
    CHECK(g.f_h == Approx(1.2806248).epsilon(1e-6));
    CHECK(g.f_v == Approx(0.0).margin(1e-15));
    const auto up = dipole_pattern({kPi / 2.0, kPi / 2.0});
    CHECK(up.f_v == Approx(1.2806248).epsilon(1e-6));
    const auto null = dipole_pattern({0.0, 0.3});
    CHECK(null.f_v == 0.0);
    CHECK(null.f_h == 0.0);
    const auto iso = isotropic_pattern({0.4, 0.2});
    CHECK(iso.f_v == 1.0);
    CHECK(iso.f_h == 0.0);
}

TEST_CASE("polarisation matrices", "[cir]")
{
    const auto l = los_polarization(0.7);
    CHECK(std::abs(l[0] - std::polar(1.0, 0.7)) < 1e-15);
    CHECK(std::abs(l[3] + std::polar(1.0, 0.7)) < 1e-15);
    CHECK(l[1] == Complex{});
    const auto n = nlos_polarization({0.1, 0.2, 0.3, 0.4}, 100.0);
    CHECK(std::abs(n[1]) == Approx(0.1));
    CHECK(std::abs(n[0]) == Approx(1.0));
    const auto s = sandwich({1.0, 0.0}, n, {1.0, 0.0});
    CHECK(std::abs(s[0] - n[0]) < 1e-15);
    CHECK(s[1] == Complex{});
}

TEST_CASE("K-factor weights", "[cir]")
{
    const auto [a, b] = k_factor_weights(3.0);
    CHECK(a * a == Approx(0.75));
    CHECK(b * b == Approx(0.25));
    const auto [c, d] = k_factor_weights(3.0, false);
    CHECK(c == 0.0);
    CHECK(d == 1.0);
    const auto [e, f] = k_factor_weights(std::numeric_limits<double>::infinity());
    CHECK(e == 1.0);
    CHECK(f == 0.0);
}

TEST_CASE("band plan", "[cir]")
{
    BandPlan b{300e9, 350e9, 500, std::nullopt};
    CHECK(b.b_sub() == Approx(0.1e9));
    CHECK(b.center(0) == Approx(300.05e9));
    CHECK(b.subband_of(300e9) == 0);
    CHECK(b.subband_of(300.1e9) == 1);
    CHECK(b.subband_of(349.99e9) == 499);
    CHECK_THROWS_AS(b.subband_of(350e9), std::out_of_range);
    CHECK(b.system_center() == Approx(325e9));
    b.f_stop = 299e9;
    CHECK_THROWS_AS(b.validate(), ConfigError);
}

TEST_CASE("realization is deterministic per seed and index", "[cir]")
{
    const auto mp = std::make_shared<const ModelParams>(small_model());
    const auto a = generate_realization(mp, 42, 3);
    const auto b = generate_realization(mp, 42, 3);
    const auto c = generate_realization(mp, 42, 4);
    REQUIRE(a.tracks.size() == b.tracks.size());
    const auto ta = assemble_cir(a, 1, 2, 1, 2), tb = assemble_cir(b, 1, 2, 1, 2);
    REQUIRE(ta.size() == tb.size());
    for (std::size_t k = 0; k < ta.size(); ++k)
    {
        CHECK(ta[k].delay == tb[k].delay);
        CHECK(ta[k].gain() == tb[k].gain());
    }
    const auto tc = assemble_cir(c, 1, 2, 1, 2);
    bool differs = tc.size() != ta.size();
    for (std::size_t k = 0; !differs && k < ta.size(); ++k)
        differs = tc[k].gain() != ta[k].gain();
    CHECK(differs);
}

TEST_CASE("LOS tap: delay and Doppler of a receding receiver", "[cir]")
{
    auto m = small_model();
    m.rx_motion = {0.6, 0.0, 0.0}; // along the LOS, away from the Tx
    m.tx_array.m_v = m.tx_array.m_h = 1;
    m.rx_array.m_v = m.rx_array.m_h = 1;
    m.band = {299.9995e9, 300.0005e9, 1, std::nullopt};
    m.tx_pattern = m.rx_pattern = PatternKind::isotropic;
    const auto r = generate_realization(m, 1, 0);
    const auto taps = assemble_cir(r, 0, 0, 0, 0);
    REQUIRE(!taps.empty());
    REQUIRE(taps[0].is_los());
    CHECK(taps[0].delay == Approx(10.00692286e-9).epsilon(1e-9));
    CHECK(taps[0].doppler == Approx(600.4153714).epsilon(1e-6));
    // Isotropic vertical elements: LOS power is K / (K + 1).
    CHECK(taps[0].power() == Approx(m.k_factor / (m.k_factor + 1.0)).epsilon(1e-12));
}

TEST_CASE("NLOS rays are never shorter than the direct path", "[cir]")
{
    const auto r = generate_realization(small_model(), 7, 0);
    for (std::size_t t = 0; t < 4; ++t)
        for (std::size_t p = 0; p < 6; ++p)
        {
            const PathSet ps = evaluate_paths(r, p, 3, 2, t);
            double sum = 0.0;
            for (const auto &rp : ps.rays)
            {
                CHECK(rp.distance >= ps.los_distance);
                sum += rp.power;
            }
            if (!ps.rays.empty())
                CHECK(sum == Approx(1.0));
        }
    CHECK_THROWS_AS(evaluate_paths(r, 6, 0, 0, 0), std::out_of_range);
}

TEST_CASE("disabled LOS and K-factor limits", "[cir]")
{
    auto m = small_model();
    m.los_enabled = false;
    const auto r = generate_realization(m, 3, 0);
    for (const auto &tap : assemble_cir(r, 0, 0, 0, 0))
        CHECK_FALSE(tap.is_los());
    m.los_enabled = true;
    m.k_factor = std::numeric_limits<double>::infinity();
    const auto r2 = generate_realization(m, 3, 0);
    const auto taps = assemble_cir(r2, 0, 0, 0, 0);
    REQUIRE(taps.size() == 1);
    CHECK(taps[0].is_los());
}

TEST_CASE("static scene: CIR identical across snapshots", "[cir]")
{
    auto m = small_model();
    m.rx_motion = {};
    m.time_birth_death = false;
    const auto r = generate_realization(m, 5, 0);
    const auto a = assemble_cir(r, 2, 1, 0, 0), b = assemble_cir(r, 2, 1, 0, 3);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k)
    {
        CHECK(a[k].delay == Approx(b[k].delay).epsilon(1e-14));
        CHECK(std::abs(a[k].gain() - b[k].gain()) < 1e-12);
    }
}

TEST_CASE("cluster lifetimes respect the time grid", "[cir]")
{
    const auto r = generate_realization(small_model(), 11, 0);
    for (const auto &tr : r.tracks)
    {
        CHECK(tr.birth_snapshot < tr.death_snapshot);
        CHECK(tr.death_snapshot <= 4);
        CHECK(tr.states.size() == (tr.death_snapshot - tr.birth_snapshot) * tr.cluster.rays.size());
    }
}

TEST_CASE("fft round trip", "[cir]")
{
    Rng rng(2);
    std::vector<Complex> x(64);
    for (auto &v : x)
        v = {std_normal(rng), std_normal(rng)};
    const auto y = ifft(fft(x));
    for (std::size_t k = 0; k < x.size(); ++k)
        CHECK(std::abs(y[k] - x[k]) < 1e-12);
    // single tone lands in its bin
    std::vector<Complex> tone(32);
    for (std::size_t n = 0; n < 32; ++n)
        tone[n] = std::polar(1.0, kTwoPi * 5.0 * static_cast<double>(n) / 32.0);
    const auto s = fft(tone);
    CHECK(std::abs(s[5]) == Approx(32.0));
    CHECK(std::abs(s[6]) < 1e-9);
}

TEST_CASE("transfer function of a single tap", "[cir]")
{
    Tap t;
    t.delay = 1e-9;
    t.pol = {Complex(2.0), {}, {}, {}};
    CHECK(std::abs(transfer_function({t}, 0.0) - Complex(2.0)) < 1e-15);
    CHECK(std::abs(transfer_function({t}, 0.25e9) - Complex(0.0, -2.0)) < 1e-12);
}

TEST_CASE("received signal with a flat channel reproduces the input", "[cir]")
{
    BandPlan band{300e9, 300.8e9, 2, std::nullopt};
    Tap t;
    t.pol = {Complex(1.0), {}, {}, {}};
    Rng rng(6);
    std::vector<Complex> x(16);
    for (auto &v : x)
        v = {std_normal(rng), std_normal(rng)};
    const auto y = received_signal(spectrum_of(x, band.f_start, band.f_stop), {{t}, {t}}, band, nullptr, 0.0);
    for (std::size_t k = 0; k < x.size(); ++k)
        CHECK(std::abs(y[k] - x[k]) < 1e-12);
    CHECK_THROWS_AS(received_signal(spectrum_of(x, band.f_start, band.f_stop), {{t}}, band, nullptr, 0.0),
                    ConfigError);
}

TEST_CASE("large-scale gain of the reference pair", "[cir]")
{
    auto m = small_model();
    m.large_scale.pl0_db = 60.0;
    m.large_scale.absorption = AbsorptionTable{{{100e9, 0.0}, {1e12, 0.0}}};
    m.rx_motion = {};
    const auto r = generate_realization(m, 1, 0);
    // 60 + 20 log10(3) dB
    CHECK(10.0 * std::log10(large_scale_gain(r, 0, 0)) == Approx(-(60.0 + 20.0 * std::log10(3.0))).epsilon(1e-12));
    const auto h = full_channel_matrix(r, 0, 0);
    CHECK(h.size() == 24);
}
