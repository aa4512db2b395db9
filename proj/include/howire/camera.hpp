#ifndef HOWIRE_CAMERA_HPP
#define HOWIRE_CAMERA_HPP

#include <cmath>
#include <numbers>
#include <string>

#include "howire/error.hpp"
#include "howire/vec.hpp"
#include "howire/wireframe.hpp"

namespace howire {

/// Pinhole intrinsics. Camera frame: +X right, +Y down, +Z forward.
struct CameraIntrinsics {
    double fx = 0, fy = 0;
    double cx = 0, cy = 0;
    int width = 0, height = 0;

    /// Square image with the given vertical field of view (degrees).
    static CameraIntrinsics from_fov(int width, int height, double vertical_fov_deg) {
        const double half = vertical_fov_deg * std::numbers::pi / 360.0;
        const double f = 0.5 * height / std::tan(half);
        return {f, f, 0.5 * width, 0.5 * height, width, height};
    }

    /// 256x256, 45 degree vertical FOV.
    static CameraIntrinsics default_256() { return from_fov(256, 256, 45.0); }

    void check() const {
        if (!(fx > 0 && fy > 0)) throw ValidationError("focal lengths must be positive");
        if (width <= 0 || height <= 0) throw ValidationError("image size must be positive");
        if (!(cx > 0 && cx < width && cy > 0 && cy < height))
            throw ValidationError("principal point must lie inside the image");
    }

    friend bool operator==(const CameraIntrinsics&, const CameraIntrinsics&) = default;
};

inline constexpr double kProjectionMinDepth = 1e-6;

inline Vec2 project(Vec3 p, const CameraIntrinsics& k, double min_depth = kProjectionMinDepth) {
    if (!(p.z > min_depth)) throw GeometryError("point behind camera (Z = " + std::to_string(p.z) + ")");
    return {k.fx * p.x / p.z + k.cx, k.fy * p.y / p.z + k.cy};
}

/// Inverse of project for a known camera-frame depth Z.
inline Vec3 lift(Vec2 pixel, double depth, const CameraIntrinsics& k) {
    if (!(depth > 0)) throw GeometryError("lifting requires positive depth");
    return {depth * (pixel.x - k.cx) / k.fx, depth * (pixel.y - k.cy) / k.fy, depth};
}

/// Rigid world-to-camera transform: X_cam = R * X_world + t.
struct CameraPose {
    Mat3 rotation;
    Vec3 translation;

    Vec3 apply(Vec3 world) const { return rotation * world + translation; }

    /// Camera center in world coordinates.
    Vec3 eye() const { return -(rotation.transposed() * translation); }

    /// (this after first): apply `first`, then this pose.
    CameraPose compose(const CameraPose& first) const {
        return {rotation * first.rotation, rotation * first.translation + translation};
    }

    void check(double tol = 1e-9) const {
        const Mat3 rrt = rotation * rotation.transposed();
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (std::abs(rrt.rows[i][j] - (i == j ? 1.0 : 0.0)) > tol)
                    throw ValidationError("rotation is not orthonormal");
        if (std::abs(rotation.determinant() - 1.0) > tol) throw ValidationError("rotation determinant is not +1");
    }
};

/// Camera at `eye` looking at `target`; `up` fixes roll (image rows grow along -up).
inline CameraPose look_at(Vec3 eye, Vec3 target, Vec3 up) {
    const Vec3 view = target - eye;
    const double dist = norm(view);
    if (!(dist > 1e-12)) throw GeometryError("look_at: eye coincides with target");
    const Vec3 forward = view / dist;
    const Vec3 side = cross(forward, up);
    const double side_len = norm(side);
    if (!(side_len > 1e-9 * std::max(1.0, norm(up)))) throw GeometryError("look_at: up is parallel to view direction");
    const Vec3 right = side / side_len;
    const Vec3 down = cross(forward, right);

    CameraPose pose;
    pose.rotation.rows = {right, down, forward};
    pose.translation = -(pose.rotation * eye);
    return pose;
}

/// Maps every junction into the camera frame; lines and labels are untouched.
inline WireframeGraph transform_graph(const WireframeGraph& world, const CameraPose& pose) {
    WireframeGraph out = world;
    for (Vec3& j : out.junctions3d) j = pose.apply(j);
    out.junctions2d.clear();
    return out;
}

/// Fills junctions2d by projecting every junction.
inline void project_junctions(WireframeGraph& g, const CameraIntrinsics& k) {
    g.junctions2d.clear();
    g.junctions2d.reserve(g.junctions3d.size());
    for (Vec3 j : g.junctions3d) g.junctions2d.push_back(project(j, k));
}

} // namespace howire

#endif
