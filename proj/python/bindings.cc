#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "epigeom/epipolar_error.h"
#include "epigeom/geometry.h"
#include "epigeom/interpretations.h"
#include "epigeom/l1_triangulation.h"
#include "epigeom/report.h"
#include "epigeom/simulation.h"

namespace py = pybind11;
using namespace epigeom;

namespace {

py::dict ReportToDict(const SummaryReport& r) {
  py::dict histograms;
  for (const auto& [name, hist] : r.histograms) {
    py::list bins;
    for (const auto& b : hist) bins.append(py::make_tuple(b.low_log10, b.high_log10, b.count));
    histograms[py::str(name)] = bins;
  }
  py::dict meta;
  meta["kind"] = r.metadata.kind;
  meta["version"] = r.metadata.version;
  meta["seed"] = r.metadata.seed;
  meta["trials"] = r.metadata.trials;
  meta["nondegenerate"] = r.metadata.nondegenerate;
  meta["config"] = r.metadata.config;
  meta["degenerate_counts"] = r.metadata.degenerate_counts;
  meta["counters"] = r.metadata.counters;
  meta["stats"] = r.metadata.stats;

  py::dict out;
  out["histograms"] = histograms;
  out["optimality_curve"] = r.optimality_curve;
  out["identity_max_errors"] = r.identity_max_errors;
  out["metadata"] = meta;
  return out;
}

}  // namespace

PYBIND11_MODULE(_epigeom, m) {
  m.doc() = "Normalized epipolar error, its geometric interpretations and the "
            "L1-optimal ray correction";
  m.attr("__version__") = kVersion;

  py::register_exception<GeometryError>(m, "GeometryError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const IoError& e) {
      PyErr_SetString(PyExc_OSError, e.what());
    }
  });

  py::class_<RelativePose>(m, "RelativePose")
      .def(py::init([](const Mat3& r, const Vec3& t) { return RelativePose(Rotation(r), t); }),
           py::arg("rotation"), py::arg("translation"))
      .def_property_readonly("rotation",
                             [](const RelativePose& p) { return p.rotation().matrix(); })
      .def_property_readonly("translation", &RelativePose::translation)
      .def_property_readonly("translation_dir",
                             [](const RelativePose& p) { return p.translation_dir().vec(); })
      .def_property_readonly("translation_norm", &RelativePose::translation_norm)
      .def("inverse", &RelativePose::Inverse);

  py::class_<ObservationPair>(m, "ObservationPair")
      .def(py::init([](const Vec3& f0, const Vec3& f1) {
             return ObservationPair(UnitVec3(f0), UnitVec3(f1));
           }),
           py::arg("f0"), py::arg("f1"))
      .def_property_readonly("f0", [](const ObservationPair& o) { return o.f0.vec(); })
      .def_property_readonly("f1", [](const ObservationPair& o) { return o.f1.vec(); });

  m.def("relative_pose_from_world",
        [](const Vec3& c0, const Mat3& r0, const Vec3& c1, const Mat3& r1) {
          return RelativePoseFromWorld(c0, Rotation(r0), c1, Rotation(r1));
        },
        py::arg("c0"), py::arg("r0"), py::arg("c1"), py::arg("r1"));
  m.def("essential_from_pose",
        [](const RelativePose& p) { return EssentialFromPose(p).matrix(); });
  m.def("angle_between", &AngleBetween);
  m.def("acute_angle_between", &AcuteAngleBetween);

  m.def("normalized_epipolar_error", &NormalizedEpipolarError);
  m.def("standard_epipolar_error", &StandardEpipolarError);
  m.def("plane_distance_error", &PlaneDistanceError);

  m.def("tetrahedron_volume", &TetrahedronVolume);
  m.def("ray_distance", &RayDistance);
  m.def("parallax_angle", &ParallaxAngle);
  m.def("distance_identity", &DistanceIdentity);
  m.def("incidence_angles", [](const RelativePose& p, const ObservationPair& o) {
    const auto a = IncidenceAnglesOf(p, o);
    return py::make_tuple(a.phi0, a.phi1);
  });
  m.def("dihedral_angle", &DihedralAngle);
  m.def("dihedral_identity", &DihedralIdentity);
  m.def("quadruple_product_check", &QuadrupleProductCheck);
  m.def("l1_identity", &L1Identity, py::arg("pose"), py::arg("obs"), py::arg("theta_l1"));

  py::class_<ErrorBreakdown>(m, "ErrorBreakdown")
      .def_readonly("e_hat", &ErrorBreakdown::e_hat)
      .def_readonly("volume", &ErrorBreakdown::volume)
      .def_readonly("ray_distance", &ErrorBreakdown::ray_distance)
      .def_readonly("parallax", &ErrorBreakdown::parallax)
      .def_readonly("dihedral", &ErrorBreakdown::dihedral)
      .def_readonly("phi0", &ErrorBreakdown::phi0)
      .def_readonly("phi1", &ErrorBreakdown::phi1)
      .def_readonly("theta_l1", &ErrorBreakdown::theta_l1)
      .def_readonly("volume_estimate", &ErrorBreakdown::volume_estimate)
      .def_readonly("distance_estimate", &ErrorBreakdown::distance_estimate)
      .def_readonly("dihedral_estimate", &ErrorBreakdown::dihedral_estimate)
      .def_readonly("l1_estimate", &ErrorBreakdown::l1_estimate)
      .def_readonly("quadruple_product", &ErrorBreakdown::quadruple_product)
      .def_readonly("degeneracies", &ErrorBreakdown::degeneracies);
  m.def("full_breakdown", &FullBreakdown);

  py::class_<CorrectedPair>(m, "CorrectedPair")
      .def_property_readonly("f0", [](const CorrectedPair& c) { return c.f0.vec(); })
      .def_property_readonly("f1", [](const CorrectedPair& c) { return c.f1.vec(); })
      .def_readonly("theta0", &CorrectedPair::theta0)
      .def_readonly("theta1", &CorrectedPair::theta1)
      .def_readonly("corrected_ray", &CorrectedPair::corrected_ray);
  py::class_<TriangulatedPoint>(m, "TriangulatedPoint")
      .def_readonly("point", &TriangulatedPoint::point)
      .def_readonly("depth0", &TriangulatedPoint::depth0)
      .def_readonly("depth1", &TriangulatedPoint::depth1)
      .def_property_readonly("cheirality_ok", &TriangulatedPoint::cheirality_ok);
  m.def("l1_optimal_angle", &L1OptimalAngle);
  m.def("l1_correct_rays", &L1CorrectRays);
  m.def("intersect_corrected", &IntersectCorrected);
  m.def("angular_cost", &AngularCost, py::arg("pose"), py::arg("obs"), py::arg("point"));

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("image_width", &SimConfig::image_width)
      .def_readwrite("image_height", &SimConfig::image_height)
      .def_readwrite("focal", &SimConfig::focal)
      .def_readwrite("sigma_px", &SimConfig::sigma_px)
      .def_readwrite("depth_min", &SimConfig::depth_min)
      .def_readwrite("depth_max", &SimConfig::depth_max)
      .def_readwrite("half_baseline", &SimConfig::half_baseline)
      .def_readwrite("trials", &SimConfig::trials)
      .def_readwrite("seed", &SimConfig::seed)
      .def_readwrite("perturb_exponents", &SimConfig::perturb_exponents)
      .def_readwrite("perturbs_per_magnitude", &SimConfig::perturbs_per_magnitude)
      .def_readwrite("max_visibility_attempts", &SimConfig::max_visibility_attempts);

  m.def("run_appendix",
        [](const SimConfig& config, unsigned threads) {
          std::vector<TrialRecord> records;
          {
            py::gil_scoped_release release;
            records = RunTrials(config, threads);
          }
          return ReportToDict(Aggregate(records, config));
        },
        py::arg("config"), py::arg("threads") = 0,
        "Run the simulation protocol and return the aggregated report as a dict.");
  m.def("verify_identities",
        [](std::uint64_t trials, std::uint64_t seed, unsigned threads) {
          VerifyConfig config;
          config.trials = trials;
          config.seed = seed;
          SummaryReport report;
          {
            py::gil_scoped_release release;
            report = RunIdentitySuite(config, threads);
          }
          return ReportToDict(report);
        },
        py::arg("trials") = 10000, py::arg("seed") = 7, py::arg("threads") = 0);
}
