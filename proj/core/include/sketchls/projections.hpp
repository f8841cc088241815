#ifndef SKETCHLS_PROJECTIONS_HPP
#define SKETCHLS_PROJECTIONS_HPP

#include "sketchls/problem.hpp"

namespace sketchls {

struct ProjectionResult {
  Matrix point;
  bool active = false;  // input was outside the set and was moved
};

// Euclidean projection onto { x : ||x||_1 <= r }, exact sort-and-threshold.
ProjectionResult project_l1(const Vector& v, double r);

// Projection onto { x : ||phi x||_1 <= r } for orthogonal phi.
ProjectionResult project_transformed_l1(const Vector& v, const Matrix& phi, double r);

// Projection onto { X : ||X||_* <= r } via SVD and l1 projection of the
// singular values.
ProjectionResult project_nuclear(const Matrix& X, double r);

// Dispatch on the constraint variant; identity when unconstrained.
ProjectionResult project(const ConstraintSet& c, const Matrix& v);

}  // namespace sketchls

#endif
