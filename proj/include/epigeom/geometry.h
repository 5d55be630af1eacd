#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace epigeom {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Thrown when an operation's precondition fails. The kind lets callers (and
// the breakdown aggregation) tell degeneracies apart without string matching.
class GeometryError : public std::runtime_error {
 public:
  enum class Kind {
    kZeroVector,
    kNotRotation,
    kCoincidentCenters,
    kUndefinedCoordinates,
    kDegeneratePlane,
    kParallelRays,
    kFullyDegenerate,
    kPerpendicularRay,
    kBehindCamera,
  };

  GeometryError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

const char* KindName(GeometryError::Kind kind);

// Unit-length direction. Construction renormalizes; inputs whose norm is
// below 1e-300 or that are not finite are rejected.
class UnitVec3 {
 public:
  explicit UnitVec3(const Vec3& v);
  UnitVec3(double x, double y, double z) : UnitVec3(Vec3(x, y, z)) {}

  const Vec3& vec() const { return v_; }
  operator const Vec3&() const { return v_; }
  double operator[](int i) const { return v_[i]; }

 private:
  Vec3 v_;
};

// Proper rotation: |m^T m - I|_max <= 1e-10 and det(m) within 1e-10 of 1.
class Rotation {
 public:
  static constexpr double kTolerance = 1e-10;

  Rotation() : m_(Mat3::Identity()) {}
  explicit Rotation(const Mat3& m);

  static Rotation Identity() { return Rotation(); }
  static bool IsValid(const Mat3& m);

  const Mat3& matrix() const { return m_; }
  Rotation Transpose() const;

  Vec3 operator*(const Vec3& v) const { return m_ * v; }
  Rotation operator*(const Rotation& other) const;

 private:
  struct Unchecked {};
  Rotation(const Mat3& m, Unchecked) : m_(m) {}
  Mat3 m_;
};

// Maps points from frame c0 to frame c1: x1 = R x0 + t.
class RelativePose {
 public:
  RelativePose(const Rotation& rotation, const Vec3& translation);

  const Rotation& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }
  const UnitVec3& translation_dir() const { return translation_dir_; }
  double translation_norm() const { return translation_norm_; }

  // Pose mapping c1 back to c0.
  RelativePose Inverse() const;

 private:
  Rotation rotation_;
  Vec3 translation_;
  UnitVec3 translation_dir_;
  double translation_norm_;
};

// Two backprojected unit rays, f0 in the frame of c0 and f1 in the frame of
// c1. The z=1 normalized coordinates exist only when the ray points in front
// of the principal plane.
struct ObservationPair {
  UnitVec3 f0;
  UnitVec3 f1;

  ObservationPair(const UnitVec3& ray0, const UnitVec3& ray1)
      : f0(ray0), f1(ray1) {}

  std::optional<Vec3> f0_normalized() const;
  std::optional<Vec3> f1_normalized() const;
};

// E = [t_hat]_x R.
class EssentialMatrix {
 public:
  explicit EssentialMatrix(const Mat3& m) : m_(m) {}
  const Mat3& matrix() const { return m_; }

  // |f1^T E f0|
  double Residual(const Vec3& f0, const Vec3& f1) const {
    return std::abs(f1.dot(m_ * f0));
  }

 private:
  Mat3 m_;
};

Mat3 Skew(const Vec3& v);

RelativePose RelativePoseFromWorld(const Vec3& c0, const Rotation& r0,
                                   const Vec3& c1, const Rotation& r1);

EssentialMatrix EssentialFromPose(const RelativePose& pose);

// Angle in [0, pi], evaluated as atan2(|u x v|, u.v).
double AngleBetween(const Vec3& u, const Vec3& v);

// Angle between the lines spanned by u and v, in [0, pi/2].
double AcuteAngleBetween(const Vec3& u, const Vec3& v);

}  // namespace epigeom
