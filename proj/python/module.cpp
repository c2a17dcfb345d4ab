#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "qslab/acceptance.hpp"
#include "qslab/experiments.hpp"

namespace py = pybind11;
using namespace qslab;

namespace {

std::pair<double, double> iv_pair(const RatInterval& iv) {
    // outward rounding keeps the bracket certified across the boundary
    return {std::nextafter(iv.lo_d(), -std::numeric_limits<double>::infinity()),
            std::nextafter(iv.hi_d(), std::numeric_limits<double>::infinity())};
}

SymbolWindow window_from(py::sequence symbols, long long origin, int alphabet) {
    SymbolWindow w;
    w.origin = origin;
    w.alphabet = alphabet;
    for (auto item : symbols) w.symbols.push_back(item.cast<std::uint8_t>());
    if (w.symbols.empty()) throw std::invalid_argument("empty window");
    return w;
}

py::list window_symbols(const SymbolWindow& w) {
    py::list out;
    for (auto s : w.symbols) out.append(int(s));
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "exact quasisturmian / cellular-automata kernel";

    py::register_exception<PrecisionExhausted>(m, "PrecisionExhausted");
    py::register_exception<EpsilonUnreachable>(m, "EpsilonUnreachable");
    py::register_exception<CoreNotAdmissible>(m, "CoreNotAdmissible");

    py::class_<Angle>(m, "Angle")
        .def_static("from_text", &Angle::from_text)
        .def("to_text", &Angle::to_text)
        .def("eval",
             [](const Angle& a, unsigned k) { return iv_pair(a.eval(k)); },
             py::arg("k") = 52)
        .def("approx", &Angle::approx)
        .def("__repr__", [](const Angle& a) { return "Angle(" + a.to_text() + ")"; });

    m.def("golden_conjugate", &Angle::golden_conjugate);
    m.def("dyadic_recurrent_angle",
          [] { return make_special_angle(SpecialAngle::DyadicRecurrent); });
    m.def("p_adic_recurrent_angle",
          [](unsigned long p) { return make_special_angle(SpecialAngle::PAdicRecurrent, p); });
    m.def("high_partial_quotient_angle", [](unsigned long m) {
        return make_special_angle(SpecialAngle::HighPartialQuotient, m);
    });

    py::class_<TorusPoint>(m, "TorusPoint")
        .def(py::init([](long long z, long long num, long long den) {
                 return TorusPoint(z, make_rat(to_int(num), to_int(den)));
             }),
             py::arg("z") = 0, py::arg("num") = 0, py::arg("den") = 1)
        .def_static("from_text", &TorusPoint::from_text)
        .def("to_text", &TorusPoint::to_text)
        .def("rotate", &TorusPoint::rotate)
        .def("__eq__", [](const TorusPoint& a, const TorusPoint& b) { return a == b; })
        .def("__repr__", [](const TorusPoint& p) { return "TorusPoint(" + p.to_text() + ")"; });

    py::enum_<Ordering>(m, "Ordering")
        .value("Less", Ordering::Less)
        .value("Equal", Ordering::Equal)
        .value("Greater", Ordering::Greater);

    m.def("compare", &compare, py::arg("a"), py::arg("b"), py::arg("angle"),
          py::arg("budget_bits") = kDefaultBudgetBits);
    m.def("eval_point",
          [](const TorusPoint& p, const Angle& a, unsigned k) {
              return iv_pair(eval_point(p, a, k));
          });

    py::class_<IntervalPartition>(m, "IntervalPartition")
        .def_static("from_text", &IntervalPartition::from_text, py::arg("text"),
                    py::arg("alphabet") = -1)
        .def_static("sturmian", &IntervalPartition::sturmian)
        .def_static("halves", &IntervalPartition::halves)
        .def_static(
            "trivial",
            [](const Angle& a, int alphabet, int label) {
                return IntervalPartition::trivial(a, alphabet, label);
            },
            py::arg("angle"), py::arg("alphabet") = 2, py::arg("label") = 0)
        .def("to_text", &IntervalPartition::to_text)
        .def("alphabet", &IntervalPartition::alphabet)
        .def("arc_count", [](const IntervalPartition& p) { return p.arcs().size(); })
        .def("boundary_count", &IntervalPartition::boundary_count)
        .def("boundary",
             [](const IntervalPartition& p) {
                 py::list out;
                 for (const auto& b : p.boundary()) out.append(b);
                 return out;
             })
        .def("label_at", &IntervalPartition::label_at)
        .def("rotate", &IntervalPartition::rotate)
        .def("is_trivial", &IntervalPartition::is_trivial)
        .def("cell_measure",
             [](const IntervalPartition& p, int label) {
                 return p.cell_measure(label).approx(p.angle());
             })
        .def("__eq__",
             [](const IntervalPartition& a, const IntervalPartition& b) { return a == b; })
        .def("__repr__",
             [](const IntervalPartition& p) { return "IntervalPartition(" + p.to_text() + ")"; });

    m.def("sym_diff_distance",
          [](const IntervalPartition& p, const IntervalPartition& q, unsigned k) {
              return iv_pair(sym_diff_distance(p, q, k));
          },
          py::arg("p"), py::arg("q"), py::arg("k") = 48);
    m.def("is_simple", [](const IntervalPartition& p) {
        auto [simple, witness] = is_simple(p);
        return py::make_tuple(simple, witness ? py::cast(*witness) : py::none());
    });
    m.def("is_primitive", &is_primitive);
    m.def("transversal_boundary", &transversal_boundary);

    py::class_<SymbolWindow>(m, "SymbolWindow")
        .def(py::init(&window_from), py::arg("symbols"), py::arg("origin") = 0,
             py::arg("alphabet") = 2)
        .def_static("from_text", &SymbolWindow::from_text)
        .def("to_text", &SymbolWindow::to_text)
        .def_readonly("origin", &SymbolWindow::origin)
        .def_readonly("alphabet", &SymbolWindow::alphabet)
        .def("symbols", &window_symbols)
        .def("__len__", [](const SymbolWindow& w) { return w.symbols.size(); })
        .def("__eq__", [](const SymbolWindow& a, const SymbolWindow& b) { return a == b; });

    m.def("rule_from_text", [](const std::string& text) {
        return rule_to_text(rule_from_text(text));  // validates and normalizes
    });
    py::class_<LinearRule>(m, "LinearRule")
        .def_static("from_text", &LinearRule::from_text)
        .def_static("one_plus_x", &LinearRule::one_plus_x, py::arg("p") = 2)
        .def("to_text", &LinearRule::to_text)
        .def("support_size", &LinearRule::support_size)
        .def("neighbourhood", &LinearRule::neighbourhood);
    py::class_<GeneralRule>(m, "GeneralRule")
        .def_static("from_text", &GeneralRule::from_text)
        .def_static("majority3", &GeneralRule::majority3)
        .def("to_text", &GeneralRule::to_text);

    m.def("power", [](const LinearRule& r, unsigned long long n) { return power(r, n); });
    m.def("lucas_binom", &lucas_binom);
    m.def("nu", &nu);
    m.def("trace", &trace);
    m.def("apply_window", [](const std::string& rule, const SymbolWindow& w) {
        return apply_window(rule_from_text(rule), w);
    });
    m.def("apply_window_n", [](const std::string& rule, const SymbolWindow& w, unsigned n) {
        return apply_window_n(rule_from_text(rule), w, n);
    });

    m.def("induced_map", [](const std::string& rule, const IntervalPartition& p) {
        return induced_map(rule_from_text(rule), p);
    });
    m.def("induced_iterate",
          [](const std::string& rule, const IntervalPartition& p, unsigned long long n,
             bool step) {
              return induced_iterate(rule_from_text(rule), p, n,
                                     step ? IterStrategy::Step : IterStrategy::Power);
          },
          py::arg("rule"), py::arg("p"), py::arg("n"), py::arg("step") = false);
    m.def("chopping_counts",
          [](const std::string& rule, const IntervalPartition& p, unsigned N) {
              return chopping_stats(rule_from_text(rule), p, N).counts;
          });
    m.def("rotation_conjugacy_test", [](const IntervalPartition& p, const IntervalPartition& q) {
        auto t = rotation_conjugacy_test(p, q);
        return t ? py::cast(*t) : py::none();
    });

    m.def("trajectory", &trajectory);
    m.def("besicovitch_estimate",
          [](const SymbolWindow& a, const SymbolWindow& b) {
              return besicovitch_estimate(a, b).get_d();
          });
    m.def("conjugacy_check",
          [](const std::string& rule, const IntervalPartition& p, const TorusPoint& t,
             unsigned n, long long lo, long long hi) {
              return conjugacy_check(rule_from_text(rule), p, t, n, lo, hi);
          });
    m.def("verify_tiling",
          [](const SymbolWindow& w, const SymbolWindow& tile, int spacer, double eps) {
              TilingReport r = verify_tiling(w, tile, spacer,
                                             make_rat(Int(static_cast<long>(eps * 1000000)), Int(1000000L)));
              py::dict out;
              out["skeleton"] = r.skeleton;
              out["density"] = r.density.get_d();
              out["overlap_violations"] = r.overlap_violations;
              out["tile_mismatches"] = r.tile_mismatches;
              out["spacer_violations"] = r.spacer_violations;
              out["coverage"] = r.coverage.get_d();
              return out;
          });

    py::class_<TowerSpec>(m, "TowerSpec")
        .def_readonly("half_height", &TowerSpec::half_height)
        .def_readonly("achieved_epsilon", &TowerSpec::achieved_epsilon)
        .def("delta", [](const TowerSpec& t) { return t.delta.approx(t.angle); })
        .def("to_json", &TowerSpec::to_json);
    m.def("build_tower", [](const Angle& a, long long n, double eps) {
        return build_tower(a, n, make_rat(Int(static_cast<long>(eps * 1000000)), Int(1000000L)));
    });
    m.def("choose_tower_height", [](const Angle& a, double eps, long long cap) {
        return choose_tower_height(a, make_rat(Int(static_cast<long>(eps * 1000000)), Int(1000000L)), cap);
    });
    m.def("paint", &paint);

    py::class_<DirichletSft>(m, "DirichletSft")
        .def_static("majority_fixed_points", &DirichletSft::majority_fixed_points)
        .def("admissible", &DirichletSft::admissible)
        .def("count_violations", &DirichletSft::count_violations);
    m.def("dirichlet_extension", &dirichlet_extension);

    m.def("surjective_preimage", [](const IntervalPartition& target, double eps) {
        PreimageResult r = surjective_preimage_partition(
            LinearRule::one_plus_x(), target, make_rat(Int(static_cast<long>(eps * 1000000)), Int(1000000L)));
        py::dict out;
        out["preimage"] = r.preimage;
        out["distance"] = iv_pair(r.certified_distance);
        out["tower_epsilon"] = r.tower_epsilon;
        return out;
    });

    m.def("run_experiment", [](const std::string& config_json) {
        Report rep = run_experiment(ExperimentConfig::from_json_text(config_json));
        return rep.to_json_text();
    });
    m.def("run_acceptance", [] {
        std::ostringstream os;
        int failures = qslab::run_acceptance(os);
        return py::make_tuple(failures, os.str());
    });
}
