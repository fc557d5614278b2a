#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "driftzero/counting.hpp"
#include "driftzero/dimension.hpp"
#include "driftzero/gaussian.hpp"
#include "driftzero/percolation.hpp"
#include "driftzero/zeros.hpp"

namespace py = pybind11;
using namespace dz;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Zero sets of Brownian motion with variable drift";

  py::class_<SeedSpec>(m, "SeedSpec")
      .def(py::init([](std::uint64_t master, std::uint64_t stream) {
             return SeedSpec{master, stream};
           }),
           py::arg("master_seed") = 0, py::arg("stream_index") = 0)
      .def_readwrite("master_seed", &SeedSpec::master_seed)
      .def_readwrite("stream_index", &SeedSpec::stream_index)
      .def("stream", &SeedSpec::stream);

  py::enum_<GammaRegime>(m, "GammaRegime")
      .value("subcritical", GammaRegime::subcritical)
      .value("critical", GammaRegime::critical)
      .value("supercritical", GammaRegime::supercritical);

  py::class_<GammaParam>(m, "GammaParam")
      .def(py::init<double>(), py::arg("gamma"))
      .def_readonly("gamma", &GammaParam::gamma)
      .def("regime", &GammaParam::regime);

  py::class_<SampledPath>(m, "SampledPath")
      .def_readonly("times", &SampledPath::times)
      .def_readonly("values", &SampledPath::values);

  py::class_<DriftFunction>(m, "DriftFunction")
      .def_static("cantor", &DriftFunction::cantor, py::arg("gamma"),
                  py::arg("base_lo") = 1.0, py::arg("base_hi") = 2.0)
      .def_static("cascade", &DriftFunction::cascade)
      .def_static("linear", &DriftFunction::linear, py::arg("slope"),
                  py::arg("intercept") = 0.0)
      .def_static("cube_root", &DriftFunction::cube_root)
      .def_static("constant", &DriftFunction::constant)
      .def_static("custom", &DriftFunction::custom)
      .def("__call__", &DriftFunction::operator())
      .def_property_readonly("name", &DriftFunction::name)
      .def_property_readonly("monotone", &DriftFunction::monotone);

  m.def("eval_cantor", &eval_cantor, py::arg("gamma"), py::arg("t"),
        py::arg("base_lo") = 1.0, py::arg("base_hi") = 2.0, py::arg("depth") = 48);
  m.def("std_normal_cdf", &std_normal_cdf);
  m.def("bivariate_upper_prob", &bivariate_upper_prob, py::arg("h"), py::arg("k"),
        py::arg("rho"));
  m.def("gaussian_stream", &gaussian_stream, py::arg("seed"), py::arg("count"));

  m.def("sample_bm",
        [](const std::vector<double>& grid, SeedSpec seed) {
          return sample_bm(std::span<const double>(grid), seed);
        },
        py::arg("grid"), py::arg("seed"));
  m.def("sample_fbm", &sample_fbm, py::arg("points"), py::arg("horizon"), py::arg("hurst"),
        py::arg("seed"));

  py::enum_<CrossingStatus>(m, "CrossingStatus")
      .value("confirmed_crossing", CrossingStatus::confirmed_crossing)
      .value("possible_zero", CrossingStatus::possible_zero);

  py::class_<Crossing>(m, "Crossing")
      .def_readonly("t_lo", &Crossing::t_lo)
      .def_readonly("t_hi", &Crossing::t_hi)
      .def_readonly("status", &Crossing::status);

  py::class_<ZeroSetEstimate>(m, "ZeroSetEstimate")
      .def_readonly("resolution", &ZeroSetEstimate::resolution)
      .def_readonly("domain_lo", &ZeroSetEstimate::domain_lo)
      .def_readonly("domain_hi", &ZeroSetEstimate::domain_hi)
      .def_readonly("crossings", &ZeroSetEstimate::crossings)
      .def_readonly("drift_id", &ZeroSetEstimate::drift_id)
      .def("confirmed_count", &ZeroSetEstimate::confirmed_count)
      .def("possible_count", &ZeroSetEstimate::possible_count);

  m.def("detect_zeros",
        [](const DriftFunction& f, double a, double b, int depth, SeedSpec seed,
           std::uint64_t refine_budget) { return detect_zeros(f, a, b, depth, seed, refine_budget); },
        py::arg("f"), py::arg("a"), py::arg("b"), py::arg("depth"), py::arg("seed"),
        py::arg("refine_budget") = 0);

  py::enum_<Membership>(m, "Membership")
      .value("member", Membership::member)
      .value("non_member", Membership::non_member)
      .value("undecided", Membership::undecided);

  py::class_<IsolationCandidate>(m, "IsolationCandidate")
      .def_readonly("location", &IsolationCandidate::location)
      .def_readonly("t_lo", &IsolationCandidate::t_lo)
      .def_readonly("t_hi", &IsolationCandidate::t_hi)
      .def_readonly("gap_left", &IsolationCandidate::gap_left)
      .def_readonly("gap_right", &IsolationCandidate::gap_right)
      .def_readonly("in_cantor", &IsolationCandidate::in_cantor);

  py::class_<IsolationReport>(m, "IsolationReport")
      .def_readonly("delta", &IsolationReport::delta)
      .def_readonly("cantor_level", &IsolationReport::cantor_level)
      .def_readonly("candidates", &IsolationReport::candidates);

  m.def("isolated_candidates",
        [](const ZeroSetEstimate& z, double delta, std::optional<GammaParam> gamma) {
          return isolated_candidates(z, delta, gamma);
        },
        py::arg("z"), py::arg("delta"), py::arg("gamma") = std::nullopt);

  py::class_<SingletonDriftParams>(m, "SingletonDriftParams")
      .def(py::init<double, double, double, double, GammaParam, double>(), py::arg("c"),
           py::arg("delta"), py::arg("q1"), py::arg("q2"), py::arg("gamma"), py::arg("epsilon"));

  py::class_<SingletonReport>(m, "SingletonReport")
      .def_readonly("prob_no_zero_linear_tail", &SingletonReport::prob_no_zero_linear_tail)
      .def_readonly("se_linear_tail", &SingletonReport::se_linear_tail)
      .def_readonly("prob_single_crossing_cluster",
                    &SingletonReport::prob_single_crossing_cluster)
      .def_readonly("se_cluster", &SingletonReport::se_cluster)
      .def_readonly("paths", &SingletonReport::paths);

  m.def("singleton_experiment", &singleton_experiment, py::arg("params"), py::arg("horizon"),
        py::arg("paths"), py::arg("seed"));

  py::class_<CantorAddress>(m, "CantorAddress")
      .def(py::init([](std::uint64_t bits, int level, double lo, double hi) {
             return CantorAddress{bits, level, lo, hi};
           }),
           py::arg("bits"), py::arg("level"), py::arg("base_lo") = 1.0,
           py::arg("base_hi") = 2.0)
      .def_readonly("bits", &CantorAddress::bits)
      .def_readonly("level", &CantorAddress::level)
      .def("left_endpoint", &CantorAddress::left_endpoint)
      .def("right_endpoint", &CantorAddress::right_endpoint);

  m.def("interval_hit_prob", &interval_hit_prob, py::arg("gamma"), py::arg("addr"));

  py::class_<CountStats>(m, "CountStats")
      .def_readonly("n", &CountStats::n)
      .def_readonly("mean_analytic", &CountStats::mean_analytic)
      .def_readonly("second_moment_analytic", &CountStats::second_moment_analytic)
      .def_readonly("mean_mc", &CountStats::mean_mc)
      .def_readonly("second_moment_mc", &CountStats::second_moment_mc)
      .def_readonly("prob_positive_mc", &CountStats::prob_positive_mc)
      .def_readonly("se_mean", &CountStats::se_mean)
      .def_readonly("se_prob", &CountStats::se_prob)
      .def_readonly("paths", &CountStats::paths);

  m.def("analytic_moments", &analytic_moments, py::arg("gamma"), py::arg("n"),
        py::arg("with_second") = false);
  m.def("mc_counting", &mc_counting, py::arg("gamma"), py::arg("n"), py::arg("paths"),
        py::arg("seed"));

  py::class_<RetentionSchedule>(m, "RetentionSchedule")
      .def_static("reference", &RetentionSchedule::reference, py::arg("levels"))
      .def_static("constant_beta", &RetentionSchedule::constant_beta, py::arg("beta"),
                  py::arg("levels"))
      .def_static("constant_p", &RetentionSchedule::constant_p, py::arg("p"),
                  py::arg("levels"))
      .def_readonly("betas", &RetentionSchedule::betas)
      .def_readonly("clamped", &RetentionSchedule::clamped)
      .def("p", &RetentionSchedule::p)
      .def("gamma_partial", &RetentionSchedule::gamma_partial)
      .def("epsilon", &RetentionSchedule::epsilon);

  m.def("gw_survival", &gw_survival, py::arg("p"));
  m.def("pair_retention_prob", &pair_retention_prob, py::arg("schedule"), py::arg("m"),
        py::arg("l"));

  py::class_<PercolationTree>(m, "PercolationTree")
      .def_readonly("depth", &PercolationTree::depth)
      .def_readonly("levels", &PercolationTree::levels)
      .def("survives", &PercolationTree::survives);

  m.def("sample_percolation", &sample_percolation, py::arg("schedule"), py::arg("depth"),
        py::arg("base_lo"), py::arg("base_hi"), py::arg("seed"));

  py::class_<HawkesReport>(m, "HawkesReport")
      .def_readonly("m", &HawkesReport::m)
      .def_readonly("epsilon", &HawkesReport::epsilon)
      .def_readonly("mean_y", &HawkesReport::mean_y)
      .def_readonly("se_y", &HawkesReport::se_y)
      .def_readonly("second_y", &HawkesReport::second_y)
      .def_readonly("prob_v_positive", &HawkesReport::prob_v_positive)
      .def_readonly("se_p", &HawkesReport::se_p)
      .def_readonly("paths", &HawkesReport::paths);

  m.def("joint_hawkes_experiment", &joint_hawkes_experiment, py::arg("f"), py::arg("schedule"),
        py::arg("m"), py::arg("paths"), py::arg("seed"), py::arg("epsilon_override") = -1.0);

  py::class_<Interval>(m, "Interval")
      .def(py::init([](double lo, double hi) { return Interval{lo, hi}; }), py::arg("lo"),
           py::arg("hi"))
      .def_readonly("lo", &Interval::lo)
      .def_readonly("hi", &Interval::hi);

  py::class_<BoxCountTable>(m, "BoxCountTable")
      .def_readonly("ks", &BoxCountTable::ks)
      .def_readonly("counts", &BoxCountTable::counts)
      .def_readonly("slope_defined", &BoxCountTable::slope_defined)
      .def_readonly("slope", &BoxCountTable::slope)
      .def_readonly("slope_se", &BoxCountTable::slope_se);

  m.def("box_count",
        [](const std::vector<Interval>& intervals, int k_min, int k_max) {
          return box_count(intervals, k_min, k_max);
        },
        py::arg("intervals"), py::arg("k_min"), py::arg("k_max"));
  m.def("box_count_zeros",
        [](const ZeroSetEstimate& z, int k_min, int k_max, bool include_possible) {
          return box_count(z, k_min, k_max, include_possible);
        },
        py::arg("z"), py::arg("k_min"), py::arg("k_max"), py::arg("include_possible") = false);
  m.def("covering_sum", &covering_sum, py::arg("z"), py::arg("k"));
  m.def("cantor_intervals", &cantor_intervals, py::arg("gamma"), py::arg("level"),
        py::arg("base_lo") = 1.0, py::arg("base_hi") = 2.0);
  m.def("defect_set", &defect_set, py::arg("f"), py::arg("alpha"), py::arg("n"),
        py::arg("grid_depth"), py::arg("domain_lo") = 0.0, py::arg("domain_hi") = 1.0);
}
