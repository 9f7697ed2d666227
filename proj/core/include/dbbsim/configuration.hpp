#pragma once

namespace dbb {

/// A point (x1,y1,x2,y2) of two-particle configuration space, with its time.
struct ConfigurationPoint {
    double x1 = 0.0;
    double y1 = 0.0;
    double x2 = 0.0;
    double y2 = 0.0;
    double t = 0.0;

    /// Particle coordinates swapped; the timestamp is unchanged.
    ConfigurationPoint exchanged() const { return {x2, y2, x1, y1, t}; }
    /// Both particles reflected in the plane x = 0.
    ConfigurationPoint reflected_in_x() const { return {-x1, y1, -x2, y2, t}; }
};

}  // namespace dbb
