#include <sstream>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fulldim/carpet.hpp"
#include "fulldim/cli.hpp"
#include "fulldim/io.hpp"
#include "fulldim/level_set.hpp"
#include "fulldim/oracle.hpp"
#include "fulldim/transfer.hpp"

namespace py = pybind11;
using fulldim::io::json;

namespace {

// Reports cross the boundary as JSON text; the Python package decodes them.
json parse(const std::string& text) { return json::parse(text); }

fulldim::ShiftSpace shift(const Eigen::MatrixXi& transitions) { return fulldim::ShiftSpace(transitions); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of the fulldim package";

  py::register_exception<fulldim::InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<fulldim::DomainRejection>(m, "DomainRejection", PyExc_ValueError);
  py::register_exception<fulldim::ConvergenceFailure>(m, "ConvergenceFailure", PyExc_RuntimeError);

  m.def(
      "pressure",
      [](const Eigen::MatrixXi& t, const Eigen::VectorXd& phi) { return fulldim::pressure(shift(t), phi); },
      py::arg("transitions"), py::arg("phi"));

  m.def(
      "equilibrium_json",
      [](const Eigen::MatrixXi& t, const Eigen::VectorXd& phi) {
        return fulldim::io::to_json(fulldim::equilibrium(shift(t), phi)).dump();
      },
      py::arg("transitions"), py::arg("phi"));

  m.def(
      "birkhoff_range_json",
      [](const Eigen::MatrixXi& t, const Eigen::VectorXd& psi) {
        return fulldim::io::to_json(fulldim::birkhoff_range(shift(t), psi)).dump();
      },
      py::arg("transitions"), py::arg("psi"));

  m.def(
      "solve_beta_json",
      [](const Eigen::MatrixXi& t, const Eigen::VectorXd& phi, const Eigen::VectorXd& psi, double alpha) {
        try {
          return fulldim::io::to_json(fulldim::solve_beta(shift(t), phi, psi, alpha)).dump();
        } catch (const fulldim::LevelSetRejection& e) {
          return json{{"rejection", fulldim::io::to_json(e)}}.dump();
        }
      },
      py::arg("transitions"), py::arg("phi"), py::arg("psi"), py::arg("alpha"));

  m.def(
      "mcmullen_dimension",
      [](int l, int mm, const std::vector<int>& rows) { return fulldim::mcmullen_dimension(l, mm, rows).value; },
      py::arg("l"), py::arg("m"), py::arg("rows"));

  m.def(
      "carpet_dim_json",
      [](const std::string& carpet, std::size_t threads) {
        fulldim::CarpetOptions options;
        options.threads = threads;
        const fulldim::CarpetSystem system = fulldim::io::parse_carpet(parse(carpet), "/carpet");
        py::gil_scoped_release release;
        return fulldim::io::to_json(fulldim::solve_full_dimension(system, options)).dump();
      },
      py::arg("carpet"), py::arg("threads") = 1);

  m.def(
      "run_cli",
      [](const std::string& command, const std::string& input_path, std::size_t threads) {
        fulldim::cli::RunConfig config;
        config.command = command;
        config.input_path = input_path;
        config.threads = threads;
        std::ostringstream out, log;
        const int code = fulldim::cli::run(config, out, log);
        return py::make_tuple(code, out.str());
      },
      py::arg("command"), py::arg("input_path"), py::arg("threads") = 1);
}
