#pragma once

#include <cmath>

namespace uavsim {

struct Vec2
{
    double x{0.0};
    double y{0.0};

    friend bool operator==(const Vec2&, const Vec2&) = default;
};

/// Point in the deployment area, meters. z is height above ground.
struct Position
{
    double x{0.0};
    double y{0.0};
    double z{0.0};

    Vec2 horizontal() const
    {
        return {x, y};
    }

    friend bool operator==(const Position&, const Position&) = default;
};

inline double distance_2d(const Vec2& a, const Vec2& b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

inline double distance_2d(const Position& a, const Position& b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

inline double distance_3d(const Position& a, const Position& b)
{
    return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

} // namespace uavsim
