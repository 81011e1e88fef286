#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nskd/box.hpp"
#include "nskd/eve.hpp"
#include "nskd/hashing.hpp"
#include "nskd/protocol.hpp"
#include "nskd/quantum.hpp"
#include "nskd/security.hpp"
#include "nskd/verify.hpp"

namespace py = pybind11;
using namespace nskd;

namespace {

py::dict ns_report_dict(const NsReport& r) {
    py::dict d;
    d["alice_residual"] = r.alice_residual;
    d["bob_residual"] = r.bob_residual;
    d["max_residual"] = r.max_residual;
    d["pass"] = r.pass;
    d["worst"] = r.worst;
    return d;
}

py::dict transcript_dict(const Transcript& t) {
    py::dict d;
    d["N"] = t.n;
    d["M"] = t.m;
    d["delta"] = t.delta;
    d["seed"] = t.seed;
    d["B_est"] = t.b_est;
    d["w_hat"] = t.w_hat;
    d["N_r"] = t.n_r;
    d["N_e"] = t.n_e;
    d["N_c"] = t.n_c;
    d["N_s"] = t.n_s;
    d["N_s_uc"] = t.n_s_uc;
    d["K_A"] = bits_to_string(t.key_a);
    d["K_B"] = bits_to_string(t.key_b);
    d["est_set"] = t.est_set;
    d["json"] = t.to_json();
    return d;
}

}  // namespace

PYBIND11_MODULE(_nskd, m) {
    m.doc() = "Device-independent key distribution against no-signaling eavesdroppers: "
              "boxes, Born-rule sources, protocol runs, security bounds, LP adversary";

    py::class_<Box>(m, "Box")
        .def(py::init<int, bool, std::vector<double>>(), py::arg("m"), py::arg("bob_extra"),
             py::arg("entries"))
        .def_property_readonly("m", &Box::settings)
        .def_property_readonly("bob_extra", &Box::bob_extra)
        .def("at", &Box::at, py::arg("a"), py::arg("b"), py::arg("x"), py::arg("y"))
        .def("entries", &Box::entries)
        .def("to_json", &Box::to_json, py::arg("meta") = "")
        .def_static("from_json", &Box::from_json);

    m.def("epr_box", [](double p, int m) { return epr_box(p, m); }, py::arg("p"), py::arg("m"));
    m.def("expected_bc", &expected_bc, py::arg("p"), py::arg("m"));
    m.def("raw_error_rate", &raw_error_rate, py::arg("p"));
    m.def("bc_value", &bc_value, py::arg("box"));
    m.def("check_nonsignaling",
          [](const Box& b, double tol) { return ns_report_dict(check_nonsignaling(b, tol)); },
          py::arg("box"), py::arg("tol") = Box::kNsTol);
    m.def("pr_analog", &pr_analog, py::arg("m"), py::arg("bob_extra") = true);
    m.def("uniform_box", &uniform_box, py::arg("m"), py::arg("bob_extra") = true);
    m.def("local_deterministic", &local_deterministic, py::arg("fa"), py::arg("fb"));
    m.def("mix", &mix, py::arg("b1"), py::arg("b2"), py::arg("weight"));
    m.def("relabel", &relabel, py::arg("box"), py::arg("shift"));
    m.def("random_ns_box", [](int m, std::uint64_t seed, bool extra) {
              Rng rng(seed);
              return random_ns_box(m, rng, extra);
          },
          py::arg("m"), py::arg("seed"), py::arg("bob_extra") = true);

    m.def("binary_entropy", &binary_entropy, py::arg("w"));
    m.def("asymptotic_rate", &asymptotic_rate, py::arg("bc"), py::arg("w"));
    m.def("noise_threshold", &noise_threshold, py::arg("m"), py::arg("tol") = 1e-4);
    m.def("optimal_m", &optimal_m, py::arg("p"), py::arg("m_max"));
    m.def("rate_curve", [](int mm, const std::vector<double>& grid) {
              py::list rows;
              for (const auto& r : rate_curve(mm, grid)) {
                  py::dict d;
                  d["p"] = r.p;
                  d["M"] = r.m;
                  d["B"] = r.bc;
                  d["w"] = r.w;
                  d["rate_raw"] = r.rate_raw;
                  d["rate_clamped"] = r.rate_clamped;
                  rows.append(d);
              }
              return rows;
          },
          py::arg("m"), py::arg("p_grid"));
    m.def("pa_bound", &pa_bound, py::arg("n"), py::arg("n_s"), py::arg("n_c"), py::arg("bc_product"));
    m.def("pa_bound_log2", &pa_bound_log2, py::arg("n"), py::arg("n_s"), py::arg("n_c"),
          py::arg("log2_bc_product"));
    m.def("security_epsilon", &security_epsilon, py::arg("n_e"));
    m.def("estimation_failure", &estimation_failure, py::arg("n"), py::arg("n_e"), py::arg("m"));
    m.def("output_length", &output_length, py::arg("n_r"), py::arg("n_c"), py::arg("b_est"),
          py::arg("n_e"));
    m.def("protocol_key_length", &protocol_key_length, py::arg("n_r"), py::arg("n_c"),
          py::arg("b_est"));

    m.def("auto_delta", &auto_delta, py::arg("n"));
    m.def("run_protocol",
          [](long long n, int mm, double delta, std::uint64_t seed, double purity,
             const std::string& ec, double margin, double sample_fraction) {
              ProtocolParams params;
              params.n = n;
              params.m = mm;
              params.delta = delta > 0.0 ? delta : auto_delta(n);
              params.seed = seed;
              params.ec.margin = margin;
              params.ec.scheme = ec == "ldpc" ? EcConfig::Scheme::Ldpc : EcConfig::Scheme::Block;
              params.sample_fraction = sample_fraction;
              BoxSource source(epr_box(purity, mm));
              return transcript_dict(run_protocol(params, source));
          },
          py::arg("n"), py::arg("m"), py::arg("delta") = -1.0, py::arg("seed") = 0,
          py::arg("purity") = 1.0, py::arg("ec") = "block", py::arg("margin") = 0.15,
          py::arg("sample_fraction") = 0.05);
    m.def("run_protocol_with_box",
          [](long long n, int mm, const Box& box, double delta, std::uint64_t seed) {
              ProtocolParams params;
              params.n = n;
              params.m = mm;
              params.delta = delta > 0.0 ? delta : auto_delta(n);
              params.seed = seed;
              BoxSource source(box);
              return transcript_dict(run_protocol(params, source));
          },
          py::arg("n"), py::arg("m"), py::arg("box"), py::arg("delta") = -1.0, py::arg("seed") = 0);

    m.def("max_guessing", [](const Box& b, int x_target) {
              GuessResult g = max_guessing(b, x_target);
              py::dict d;
              d["value"] = g.value;
              d["bc"] = g.bc;
              d["slack"] = g.slack;
              d["witness_ns_residual"] = g.witness.ns_residual();
              return d;
          },
          py::arg("box"), py::arg("x_target"));

    m.def("sample_hash_bits", [](int in_len, int out_len, std::uint64_t seed) {
              Rng rng(seed);
              ToeplitzHash h = sample_hash(in_len, out_len, rng);
              return bits_to_string(h.seed);
          },
          py::arg("in_len"), py::arg("out_len"), py::arg("seed"));
    m.def("apply_hash", [](int in_len, int out_len, const std::string& seed_bits,
                           const std::string& input) {
              ToeplitzHash h;
              h.in_len = in_len;
              h.out_len = out_len;
              h.seed = string_to_bits(seed_bits);
              return bits_to_string(apply_hash(h, string_to_bits(input)));
          },
          py::arg("in_len"), py::arg("out_len"), py::arg("seed_bits"), py::arg("input"));

    m.def("verify_all", [](std::uint64_t seed) {
              py::list out;
              for (const auto& c : verify_all(seed)) {
                  py::dict d;
                  d["name"] = c.name;
                  d["pass"] = c.pass;
                  d["detail"] = c.detail;
                  out.append(d);
              }
              return out;
          },
          py::arg("seed") = 1);

    py::register_exception<ProtocolAbort>(m, "ProtocolAbort");
    py::register_exception<BoxError>(m, "BoxError");
}
