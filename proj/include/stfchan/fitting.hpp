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

#pragma once

#include "common.hpp"
#include "parallel.hpp"
#include "stats.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <set>
#include <string>
#include <vector>

namespace stfchan
{
    struct ReferenceCdf
    {
        std::vector<std::pair<double, double>> points; // (value, cumulative probability)
        std::string label;

        static ReferenceCdf from_samples(std::vector<double> samples, std::string label = {})
        {
            if (samples.empty())
                throw EstimatorError("ReferenceCdf: empty sample");
            return {empirical_cdf(std::move(samples)), std::move(label)};
        }

        void validate() const
        {
            if (points.empty())
                throw EstimatorError("ReferenceCdf: no points");
            for (std::size_t k = 0; k < points.size(); ++k)
            {
                const auto [x, p] = points[k];
                if (!(p >= 0.0 && p <= 1.0))
                    throw EstimatorError("ReferenceCdf: probability outside [0, 1]");
                if (k > 0 && (x < points[k - 1].first || p < points[k - 1].second))
                    throw EstimatorError("ReferenceCdf: values and probabilities must be non-decreasing");
            }
        }

        // Linear interpolation between points; 0 below the first value, last probability above.
        double operator()(double x) const
        {
            if (x < points.front().first)
                return 0.0;
            if (x >= points.back().first)
                return points.back().second;
            auto hi = std::upper_bound(points.begin(), points.end(), x,
                                       [](double v, const auto &pt) { return v < pt.first; });
            auto lo = hi - 1;
            if (hi->first == lo->first)
                return hi->second;
            const double w = (x - lo->first) / (hi->first - lo->first);
            return lo->second + w * (hi->second - lo->second);
        }
    };

    struct CdfDistance
    {
        double mse = 0.0;
        double ks = 0.0;
    };

    // Mean squared vertical difference over the union of both value grids, plus the sup-distance.
    inline CdfDistance cdf_distance(const ReferenceCdf &a, const ReferenceCdf &b)
    {
        if (a.points.empty() || b.points.empty())
            throw EstimatorError("cdf_distance: empty CDF");
        std::set<double> grid;
        for (const auto &pt : a.points)
            grid.insert(pt.first);
        for (const auto &pt : b.points)
            grid.insert(pt.first);
        CdfDistance d;
        for (double x : grid)
        {
            const double diff = a(x) - b(x);
            d.mse += diff * diff;
            d.ks = std::max(d.ks, std::abs(diff));
        }
        d.mse /= static_cast<double>(grid.size());
        return d;
    }

    struct FitPoint
    {
        std::vector<double> params;
        CdfDistance distance;
    };

    struct FitResult
    {
        std::vector<double> best;
        CdfDistance distance;
        std::vector<FitPoint> evaluated; // grid points first, then the refinement pass
    };

    // Statistic sampler: parameters -> samples whose empirical CDF is compared. Closures must be
    // deterministic in their arguments (common random numbers across grid points).
    using FitSimulator = std::function<std::vector<double>(const std::vector<double> &)>;

    namespace detail
    {
        inline std::vector<std::vector<double>> cartesian(const std::vector<std::vector<double>> &axes)
        {
            std::vector<std::vector<double>> out{{}};
            for (const auto &axis : axes)
            {
                std::vector<std::vector<double>> next;
                for (const auto &prefix : out)
                    for (double v : axis)
                    {
                        auto p = prefix;
                        p.push_back(v);
                        next.push_back(std::move(p));
                    }
                out = std::move(next);
            }
            return out;
        }

        inline std::vector<FitPoint> evaluate_all(const std::vector<std::vector<double>> &points, const FitSimulator &sim,
                                                  const ReferenceCdf &ref, std::size_t threads)
        {
            std::vector<FitPoint> out(points.size());
            parallel_for(points.size(), threads, [&](std::size_t k) {
                out[k].params = points[k];
                out[k].distance = cdf_distance(ReferenceCdf::from_samples(sim(points[k])), ref);
            });
            return out;
        }
    } // namespace detail

    // Exhaustive grid search on the MSE CDF distance followed by one refinement pass on the
    // half-step neighbours of the best grid point.
    inline FitResult mmse_fit(const std::vector<std::vector<double>> &axes, const FitSimulator &sim,
                              const ReferenceCdf &ref, std::size_t threads = 1)
    {
        if (axes.empty() || std::any_of(axes.begin(), axes.end(), [](const auto &a) { return a.empty(); }))
            throw ConfigError("mmse_fit: parameter grid is empty");
        ref.validate();
        FitResult res;
        res.evaluated = detail::evaluate_all(detail::cartesian(axes), sim, ref, threads);
        const auto better = [](const FitPoint &a, const FitPoint &b) { return a.distance.mse < b.distance.mse; };
        FitPoint best = *std::min_element(res.evaluated.begin(), res.evaluated.end(), better);

        // Half-step neighbours along every axis that has a step at the best point.
        std::vector<std::vector<double>> local;
        for (std::size_t d = 0; d < axes.size(); ++d)
        {
            std::vector<double> cand{best.params[d]};
            const auto &axis = axes[d];
            const auto it = std::find(axis.begin(), axis.end(), best.params[d]);
            const auto idx = static_cast<std::size_t>(it - axis.begin());
            if (idx > 0)
                cand.push_back(best.params[d] - 0.5 * (axis[idx] - axis[idx - 1]));
            if (idx + 1 < axis.size())
                cand.push_back(best.params[d] + 0.5 * (axis[idx + 1] - axis[idx]));
            local.push_back(std::move(cand));
        }
        auto refine_points = detail::cartesian(local);
        refine_points.erase(refine_points.begin()); // the best point itself
        if (!refine_points.empty())
        {
            auto refined = detail::evaluate_all(refine_points, sim, ref, threads);
            for (const auto &fp : refined)
                if (better(fp, best))
                    best = fp;
            res.evaluated.insert(res.evaluated.end(), refined.begin(), refined.end());
        }
        res.best = best.params;
        res.distance = best.distance;
        return res;
    }

    // Evenly spaced grid [lo, hi] with the given step, robust to rounding.
    inline std::vector<double> linear_grid(double lo, double hi, double step)
    {
        if (!(step > 0.0) || hi < lo)
            throw ConfigError("linear_grid: invalid range");
        std::vector<double> g;
        const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
        for (std::size_t k = 0; k <= n; ++k)
            g.push_back(lo + static_cast<double>(k) * step);
        return g;
    }
} // namespace stfchan
