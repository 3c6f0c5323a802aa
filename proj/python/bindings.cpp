#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cslw/infer.hpp"

namespace py = pybind11;
using namespace cslw;

namespace {

CompileMode mode_of(const std::string& name) {
  if (name == "table") return CompileMode::Table;
  if (name == "tree") return CompileMode::Tree;
  throw std::invalid_argument("mode must be 'tree' or 'table'");
}

}  // namespace

PYBIND11_MODULE(_cslw, m) {
  m.doc() = "likelihood-weighting inference over rule programs and networks";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<NoEffectiveSamples>(m, "NoEffectiveSamples",
                                             PyExc_ArithmeticError);

  py::class_<Model>(m, "Model")
      .def_property_readonly("name", [](const Model& mo) { return mo.name; })
      .def_property_readonly("variables",
                             [](const Model& mo) {
                               std::vector<std::string> names;
                               const VariableTable& vars =
                                   mo.network ? mo.network->vars : mo.program->vars;
                               for (const auto& v : vars) names.push_back(v.name);
                               return names;
                             })
      .def("rule_count",
           [](const Model& mo, const std::string& mode) {
             return mo.as_program(mode_of(mode)).rules.size();
           },
           py::arg("mode") = "tree")
      .def("__repr__", [](const Model& mo) { return "Model('" + mo.name + "')"; });

  m.def("load_model", &load_model, py::arg("path"),
        "Load a .bif network or .dcp rule program.");

  m.def(
      "infer",
      [](const Model& model, const AssignmentMap& query,
         const AssignmentMap& evidence, const std::string& method, int samples,
         std::uint64_t seed) {
        auto mm = method_from_name(method);
        if (!mm) throw std::invalid_argument("unknown method '" + method + "'");
        InferResult r = run_inference(model, query, evidence, *mm, samples, seed);
        py::dict d;
        d["value"] = r.value;
        d["method"] = std::string(method_name(r.method));
        d["n_samples"] = r.n_samples;
        d["ess"] = r.ess;
        d["elapsed_ms"] = r.elapsed_ms;
        d["mean_assigned"] = r.mean_assigned;
        d["mean_residual"] = r.mean_residual;
        return d;
      },
      py::arg("model"), py::arg("query"), py::arg("evidence") = AssignmentMap{},
      py::arg("method") = "cslw", py::arg("samples") = 10000,
      py::arg("seed") = 20240901ull,
      "Estimate P(query | evidence); method is one of lw-full, lw, cslw, "
      "exact-enum, exact-ve, exact-ctx.");

  m.def(
      "compile_rules",
      [](const Model& model, const std::string& mode) {
        return serialize_dcp(model.as_program(mode_of(mode)));
      },
      py::arg("model"), py::arg("mode") = "tree",
      "Serialize the model as a rule program ('tree' merges rows that agree).");

  m.def(
      "validate",
      [](const std::string& path) {
        Model mo = load_model(path);
        ValidationReport rep =
            validate_program(mo.as_program(CompileMode::Tree));
        return py::make_tuple(rep.ok(), rep.to_string());
      },
      py::arg("path"),
      "Check rule exclusiveness/exhaustiveness; returns (ok, report_text).");

  m.def("parse_assignments", &parse_assignment_list, py::arg("text"),
        "Parse 'a=1,b=0' into a dict.");

  m.def(
      "bench_csv",
      [](const std::string& spec_path, const std::vector<std::string>& methods,
         const std::vector<int>& samples_list, int runs, int threads,
         std::uint64_t seed) {
        BenchOptions opt;
        for (const auto& name : methods) {
          auto mm = method_from_name(name);
          if (!mm) throw std::invalid_argument("unknown method '" + name + "'");
          opt.methods.push_back(*mm);
        }
        opt.samples_list = samples_list;
        opt.runs = runs;
        opt.threads = threads;
        opt.seed = seed;
        return run_bench_csv(load_bench_spec(spec_path), opt);
      },
      py::arg("spec_path"), py::arg("methods"), py::arg("samples_list"),
      py::arg("runs") = 3, py::arg("threads") = 1, py::arg("seed") = 20240901ull,
      "Run the benchmark grid and return the CSV text.");
}
