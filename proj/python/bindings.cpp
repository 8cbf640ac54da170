#include <memory>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "morphpiece/error.hpp"
#include "morphpiece/tokenizer.hpp"

namespace py = pybind11;
using namespace morphpiece;

namespace {

class BoundTokenizer {
 public:
  explicit BoundTokenizer(std::unique_ptr<MorphPieceTokenizer> tokenizer) : tokenizer_(std::move(tokenizer)) {}

  const MorphPieceTokenizer& get() const {
    if (!tokenizer_) throw py::value_error("tokenizer handle is closed");
    return *tokenizer_;
  }

  void close() { tokenizer_.reset(); }
  bool closed() const { return !tokenizer_; }

 private:
  std::unique_ptr<MorphPieceTokenizer> tokenizer_;
};

BoundTokenizer load(const std::filesystem::path& dir, const std::string& case_policy, bool joiner) {
  TokenizerConfig config;
  if (case_policy == "lowercase-fallback") {
    config.case_policy = CasePolicy::LowercaseFallback;
  } else if (case_policy != "exact") {
    throw py::value_error("case must be 'exact' or 'lowercase-fallback'");
  }
  config.nospace_joiner = joiner;
  return BoundTokenizer(std::make_unique<MorphPieceTokenizer>(MorphPieceTokenizer::load(dir, config)));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "MorphPiece tokenizer core";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      auto factory = py::module_::import("morphpiece._errors").attr("make_error");
      py::object exc = factory(std::string(to_string(e.code())), e.line(), e.what());
      PyErr_SetObject(reinterpret_cast<PyObject*>(Py_TYPE(exc.ptr())), exc.ptr());
    }
  });

  py::class_<BoundTokenizer>(m, "Tokenizer")
      .def("encode", [](const BoundTokenizer& t, const std::string& text) { return t.get().encode(text).ids; },
           py::arg("text"))
      .def("tokenize", [](const BoundTokenizer& t, const std::string& text) { return t.get().tokenize(text); },
           py::arg("text"))
      .def("decode",
           [](const BoundTokenizer& t, const std::vector<std::uint32_t>& ids) { return t.get().decode(ids); },
           py::arg("ids"))
      .def("detokenize",
           [](const BoundTokenizer& t, const std::vector<std::string>& tokens) { return t.get().detokenize(tokens); },
           py::arg("tokens"))
      .def("coverage_trace",
           [](const BoundTokenizer& t, const std::string& text) {
             std::vector<std::string> out;
             for (auto h : t.get().coverage_trace(text)) out.emplace_back(to_string(h));
             return out;
           },
           py::arg("text"))
      .def("token_to_id",
           [](const BoundTokenizer& t, const std::string& token) { return t.get().vocab().id(token); },
           py::arg("token"))
      .def("id_to_token", [](const BoundTokenizer& t, std::uint32_t id) { return t.get().vocab().token(id); },
           py::arg("id"))
      .def_property_readonly("vocab_size", [](const BoundTokenizer& t) { return t.get().vocab().size(); })
      .def_property_readonly("closed", &BoundTokenizer::closed)
      .def("close", &BoundTokenizer::close)
      .def("__enter__", [](BoundTokenizer& t) -> BoundTokenizer& { return t; }, py::return_value_policy::reference)
      .def("__exit__", [](BoundTokenizer& t, py::args) { t.close(); });

  m.def("load", &load, py::arg("artifact_dir"), py::arg("case") = "exact", py::arg("joiner") = true);
  m.def("version", [] { return std::string(MORPHPIECE_VERSION); });
}
