#pragma once

#include "monopole/metric.hpp"

#include <vector>

/// Shared configurations for the metric checks of the unit tests and the acceptance run.
namespace testing_support {

using monopole::hyperbolic::BoundaryPoint;
using monopole::hyperbolic::MultiCenterPotential;
using monopole::hyperbolic::PointUHS;
using monopole::metric::MFramePoint;

struct MetricCase {
    MultiCenterPotential V;
    MFramePoint p;
};

inline std::vector<MetricCase> lebrun_configs() {
    return {
        {MultiCenterPotential::moduli(0.5, {PointUHS(0.2, -0.1, 0.8)}, {1}), {0.9, 0.4, 1.3, 0.2}},
        {MultiCenterPotential::moduli(0.0, {PointUHS(-0.6, 0.3, 1.2), PointUHS(0.7, 0.1, 0.6)}, {1, 2}),
         {0.1, -0.5, 0.9, 1.0}},
        {MultiCenterPotential(2.0, {PointUHS(0.0, 0.0, 2.0), PointUHS(1.0, 1.0, 0.5), PointUHS(-1.2, 0.4, 0.9)},
                              {3, 1, 2}),
         {0.4, 0.6, 1.1, -0.7}},
    };
}

inline std::vector<BoundaryPoint> gauges() {
    return {BoundaryPoint::infinity(),         BoundaryPoint::finite(0.0),
            BoundaryPoint::finite({0.3, 0.7}), BoundaryPoint::finite(-2.0),
            BoundaryPoint::finite({1.0, -1.0}), BoundaryPoint::finite({-0.5, 2.0})};
}

} // namespace testing_support
