#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "forcinglab/boolalg.hpp"
#include "forcinglab/formula.hpp"
#include "forcinglab/iteration.hpp"
#include "forcinglab/poset.hpp"
#include "forcinglab/runner.hpp"

namespace py = pybind11;
using namespace forcinglab;

namespace {

RunConfig make_config(const py::dict& kw) {
  RunConfig c;
  for (auto [k, v] : kw) {
    const auto key = k.cast<std::string>();
    if (key == "suite") c.suite = v.cast<std::string>();
    else if (key == "max_poset") c.max_poset = v.cast<std::size_t>();
    else if (key == "max_stages") c.max_stages = v.cast<std::size_t>();
    else if (key == "max_rank") c.max_rank = v.cast<int>();
    else if (key == "cap") c.cap = v.cast<std::uint64_t>();
    else if (key == "sample") c.sample = v.cast<std::size_t>();
    else if (key == "max_pairs") c.max_pairs = v.cast<std::size_t>();
    else if (key == "max_stage_size") c.max_stage_size = v.cast<std::size_t>();
    else if (key == "seed") c.seed = v.cast<std::uint64_t>();
    else if (key == "workers") c.workers = v.cast<std::size_t>();
    else throw py::key_error("unknown option " + key);
  }
  c.validate();
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "finite experiments on iterated forcing quotients";

  py::class_<Poset>(m, "Poset")
      .def_static("point", &Poset::point)
      .def_static("antichain", &Poset::antichain, py::arg("k"))
      .def_static("parse", [](const std::string& text) { return parse_poset(text); })
      .def("__len__", &Poset::size)
      .def_property_readonly("top", &Poset::top)
      .def_property_readonly("atoms", &Poset::atoms)
      .def("leq", &Poset::leq)
      .def("compatible", &Poset::compatible)
      .def("canonical_form", [](const Poset& p) { return canonical_form(p); })
      .def("__str__", [](const Poset& p) { return format_poset(p); });

  m.def("posets_of_size", &posets_of_size, py::arg("n"));
  m.def("separative_posets", &separative_posets, py::arg("max_elements"), py::arg("max_atoms"));
  m.def(
      "ro_size", [](const Poset& p) { return ro_algebra(p).algebra.size(); },
      "number of elements of the regular open algebra");
  m.def(
      "check_laws",
      [](const Poset& p) {
        auto r = check_laws(ro_algebra(p).algebra);
        return py::make_tuple(r.checked, r.failures);
      },
      "(cases checked, failed laws) for the regular open algebra");
  m.def("collapse_count", &collapse_count, py::arg("x"), py::arg("m"));
  m.def(
      "normalize_formula", [](const std::string& s) { return to_string(parse_formula(s)); },
      "parse and print a formula in canonical form");

  m.def("suite_names", &suite_names);
  m.def(
      "run",
      [](const py::kwargs& kw) {
        const RunConfig c = make_config(kw);
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run_suites(c);
        }
        std::ostringstream os;
        write_report(os, c, r);
        py::dict out;
        out["census"] = r.census;
        out["counterexamples"] = r.counterexamples;
        out["skipped"] = r.skipped;
        out["inexhaustive"] = r.inexhaustive;
        out["status"] = r.exit_status();
        out["report"] = os.str();
        return out;
      },
      "run suites; keyword arguments mirror the CLI flags; returns the summary and the JSONL report");
}
