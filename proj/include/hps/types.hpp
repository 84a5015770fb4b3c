#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <string_view>

#include <Eigen/Dense>

namespace hps {

using index_t = Eigen::Index;
using cplx = std::complex<double>;

using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr cplx kI{0.0, 1.0};

using Point = std::array<double, 3>;

/// Faces of an axis-aligned box, in the local boundary ordering.
enum class Face : int { XMinus = 0, XPlus = 1, YMinus = 2, YPlus = 3, ZMinus = 4, ZPlus = 5 };

inline constexpr std::array<Face, 6> kAllFaces{Face::XMinus, Face::XPlus, Face::YMinus,
                                               Face::YPlus,  Face::ZMinus, Face::ZPlus};

constexpr int face_index(Face f) { return static_cast<int>(f); }
constexpr int face_axis(Face f) { return face_index(f) / 2; }
constexpr bool face_is_upper(Face f) { return face_index(f) % 2 == 1; }
constexpr Face opposite(Face f) { return static_cast<Face>(face_index(f) ^ 1); }

std::string_view face_name(Face f);

/// Scalar field on the closed unit cube.
using ScalarField = std::function<cplx(const Point&)>;
/// Field defined on a face of the domain boundary; the face fixes the outward normal.
using BoundaryField = std::function<cplx(const Point&, Face)>;

/// Axis-aligned cube. The upper corner is stored explicitly so that neighbouring
/// boxes produced by a mesh share bitwise-identical face planes.
struct Box {
  Point lower{0.0, 0.0, 0.0};
  Point upper{1.0, 1.0, 1.0};
  double edge = 1.0;

  static Box cube(const Point& lower, double edge) {
    return {lower, {lower[0] + edge, lower[1] + edge, lower[2] + edge}, edge};
  }
};

}  // namespace hps
