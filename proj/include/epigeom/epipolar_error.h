#pragma once

#include "epigeom/geometry.h"

namespace epigeom {

// |f1 . (t_hat x R f0)|, the absolute triple product of three unit vectors.
// Always in [0, 1]; zero iff t_hat, R f0 and f1 are coplanar.
double NormalizedEpipolarError(const RelativePose& pose, const ObservationPair& obs);

// Same triple product with both rays scaled so their third component is 1.
// Equals the normalized error times |f0| |f1| in z=1 coordinates.
// Throws kUndefinedCoordinates when either ray has z <= 1e-12.
double StandardEpipolarError(const RelativePose& pose, const ObservationPair& obs);

// Distance from the tip of f1 to the plane spanned by t_hat and R f0.
// Throws kDegeneratePlane when |t_hat x R f0| <= 1e-12.
double PlaneDistanceError(const RelativePose& pose, const ObservationPair& obs);

}  // namespace epigeom
