#include "epigeom/geometry.h"

#include <cmath>

#include <Eigen/LU>

namespace epigeom {

const char* KindName(GeometryError::Kind kind) {
  switch (kind) {
    case GeometryError::Kind::kZeroVector:
      return "zero-vector";
    case GeometryError::Kind::kNotRotation:
      return "not-rotation";
    case GeometryError::Kind::kCoincidentCenters:
      return "coincident-centers";
    case GeometryError::Kind::kUndefinedCoordinates:
      return "undefined-coordinates";
    case GeometryError::Kind::kDegeneratePlane:
      return "degenerate-plane";
    case GeometryError::Kind::kParallelRays:
      return "parallel-rays";
    case GeometryError::Kind::kFullyDegenerate:
      return "fully-degenerate";
    case GeometryError::Kind::kPerpendicularRay:
      return "perpendicular-ray";
    case GeometryError::Kind::kBehindCamera:
      return "behind-camera";
  }
  return "unknown";
}

UnitVec3::UnitVec3(const Vec3& v) {
  const double norm = v.norm();
  if (!v.allFinite() || !(norm >= 1e-300)) {
    throw GeometryError(GeometryError::Kind::kZeroVector,
                        "cannot normalize a zero or non-finite vector");
  }
  v_ = v / norm;
}

bool Rotation::IsValid(const Mat3& m) {
  if (!m.allFinite()) return false;
  const double orthogonality =
      (m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff();
  return orthogonality <= kTolerance && std::abs(m.determinant() - 1.0) <= kTolerance;
}

Rotation::Rotation(const Mat3& m) : m_(m) {
  if (!IsValid(m)) {
    throw GeometryError(GeometryError::Kind::kNotRotation,
                        "matrix is not a proper rotation");
  }
}

Rotation Rotation::Transpose() const {
  return Rotation(m_.transpose(), Unchecked{});
}

Rotation Rotation::operator*(const Rotation& other) const {
  return Rotation(m_ * other.m_);
}

RelativePose::RelativePose(const Rotation& rotation, const Vec3& translation)
    : rotation_(rotation),
      translation_(translation),
      translation_dir_(translation),
      translation_norm_(translation.norm()) {}

RelativePose RelativePose::Inverse() const {
  const Rotation rt = rotation_.Transpose();
  return RelativePose(rt, -(rt * translation_));
}

namespace {

std::optional<Vec3> ZNormalized(const UnitVec3& ray) {
  if (ray[2] <= 1e-12) return std::nullopt;
  return Vec3(ray.vec() / ray[2]);
}

}  // namespace

std::optional<Vec3> ObservationPair::f0_normalized() const {
  return ZNormalized(f0);
}

std::optional<Vec3> ObservationPair::f1_normalized() const {
  return ZNormalized(f1);
}

Mat3 Skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
      -v.y(), v.x(), 0.0;
  return s;
}

RelativePose RelativePoseFromWorld(const Vec3& c0, const Rotation& r0,
                                   const Vec3& c1, const Rotation& r1) {
  if ((c0 - c1).norm() < 1e-12) {
    throw GeometryError(GeometryError::Kind::kCoincidentCenters,
                        "camera centers coincide");
  }
  // x_i = R_i (x_w - c_i)  =>  x1 = R1 R0^T x0 + R1 (c0 - c1)
  return RelativePose(r1 * r0.Transpose(), r1 * (c0 - c1));
}

EssentialMatrix EssentialFromPose(const RelativePose& pose) {
  return EssentialMatrix(Skew(pose.translation_dir()) * pose.rotation().matrix());
}

namespace {

void RequireNonZero(const Vec3& u, const Vec3& v) {
  if (!(u.norm() > 1e-300) || !(v.norm() > 1e-300)) {
    throw GeometryError(GeometryError::Kind::kZeroVector,
                        "angle undefined for a zero vector");
  }
}

}  // namespace

double AngleBetween(const Vec3& u, const Vec3& v) {
  RequireNonZero(u, v);
  return std::atan2(u.cross(v).norm(), u.dot(v));
}

double AcuteAngleBetween(const Vec3& u, const Vec3& v) {
  RequireNonZero(u, v);
  return std::atan2(u.cross(v).norm(), std::abs(u.dot(v)));
}

}  // namespace epigeom
