// Python bindings for the eqsim core: message algebra, conversions, channel
// models, equalizers, and the Monte-Carlo experiment harness.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "eqsim/harness.hpp"
#include "eqsim/oracles.hpp"

namespace py = pybind11;
using namespace eqsim;

namespace {

std::vector<SoftBit> to_softbits(const std::vector<double>& llrs, double llr_max) {
    std::vector<SoftBit> out;
    out.reserve(llrs.size());
    for (double l : llrs) out.emplace_back(l, llr_max);
    return out;
}

std::vector<double> to_llrs(const std::vector<SoftBit>& bits) {
    std::vector<double> out;
    out.reserve(bits.size());
    for (const SoftBit& b : bits) out.push_back(b.llr());
    return out;
}

}  // namespace

PYBIND11_MODULE(_eqsim, m) {
    m.doc() = "Iterative Gaussian (Kalman) equalization with soft-bit conversions";

    py::register_exception<NonInformativeMessage>(m, "NonInformativeMessageError");
    py::register_exception<NumericalFailure>(m, "NumericalFailureError");
    py::register_exception<UnsupportedChannel>(m, "UnsupportedChannelError");
    py::register_exception<OracleFailure>(m, "OracleFailureError");

    py::class_<GaussianMessage>(m, "GaussianMessage")
        .def(py::init<>())
        .def(py::init<double, double>(), py::arg("weight"), py::arg("wmean"))
        .def_static("from_mean_var", &GaussianMessage::from_mean_var, py::arg("mean"),
                    py::arg("variance"))
        .def_property_readonly("weight", &GaussianMessage::weight)
        .def_property_readonly("wmean", &GaussianMessage::wmean)
        .def("informative", &GaussianMessage::informative)
        .def("corrective", &GaussianMessage::corrective)
        .def("mean_var", &GaussianMessage::mean_var)
        .def("__repr__", [](const GaussianMessage& g) {
            return "GaussianMessage(weight=" + std::to_string(g.weight()) +
                   ", wmean=" + std::to_string(g.wmean()) + ")";
        });

    m.def("multiply", &multiply, py::arg("a"), py::arg("b"));
    m.def("divide", &divide, py::arg("product"), py::arg("divisor"));
    m.def("weight_clamp_count", &weight_clamp_count);
    m.def("reset_weight_clamp_count", &reset_weight_clamp_count);

    py::class_<SoftBit>(m, "SoftBit")
        .def(py::init<>())
        .def(py::init<double, double>(), py::arg("llr"), py::arg("llr_max") = kDefaultLlrMax)
        .def_property_readonly("llr", &SoftBit::llr)
        .def_property_readonly("mean", &SoftBit::mean)
        .def("__repr__",
             [](const SoftBit& s) { return "SoftBit(llr=" + std::to_string(s.llr()) + ")"; });

    py::class_<TrueMoments>(m, "TrueMoments")
        .def_readonly("mean", &TrueMoments::mean)
        .def_readonly("variance", &TrueMoments::variance);

    m.def("gaussian_to_softbit", &gaussian_to_softbit, py::arg("g"),
          py::arg("llr_max") = kDefaultLlrMax);
    m.def("softbit_moments", &softbit_moments, py::arg("s"));
    m.def("standard_gaussian", &standard_gaussian, py::arg("s"));
    m.def("true_moments", &true_moments, py::arg("forward"), py::arg("backward"));
    m.def(
        "minka_gaussian",
        [](const SoftBit& forward, const GaussianMessage& incoming, double llr_max)
            -> std::optional<GaussianMessage> {
            return minka_gaussian(forward, incoming, llr_max);
        },
        py::arg("forward"), py::arg("incoming"), py::arg("llr_max") = kDefaultLlrMax,
        "Minka conversion; returns None when the incoming message is not proper.");
    m.def(
        "damped_msg",
        [](const GaussianMessage& minka, const GaussianMessage& standard, double alpha) {
            return damped_msg(minka, standard, AlphaValue(alpha));
        },
        py::arg("minka"), py::arg("standard"), py::arg("alpha"));

    py::class_<ChannelSpec>(m, "ChannelSpec")
        .def_static("fir", &ChannelSpec::fir, py::arg("taps"))
        .def_static("iir", &ChannelSpec::iir, py::arg("numerator"), py::arg("denominator"))
        .def_static("preset", &ChannelSpec::preset, py::arg("name"))
        .def_static("parse", &ChannelSpec::parse, py::arg("text"))
        .def_readonly("b", &ChannelSpec::b)
        .def_readonly("a", &ChannelSpec::a)
        .def("is_fir", &ChannelSpec::is_fir)
        .def("memory", &ChannelSpec::memory);

    m.def("impulse_response", &impulse_response, py::arg("spec"), py::arg("count"));
    m.def("channel_energy", &channel_energy, py::arg("spec"));
    m.def("snr_to_noise_var", &snr_to_noise_var, py::arg("snr_db"), py::arg("spec"),
          py::arg("code_rate") = 1.0);

    py::class_<StateSpaceModel>(m, "StateSpaceModel")
        .def_property_readonly("dim", &StateSpaceModel::dim);
    m.def("realize_state_space", &realize_state_space, py::arg("spec"));

    py::class_<TransmissionRecord>(m, "TransmissionRecord")
        .def_readonly("symbols", &TransmissionRecord::symbols)
        .def_readonly("observations", &TransmissionRecord::observations)
        .def_readonly("noise_var", &TransmissionRecord::noise_var)
        .def_readonly("seed", &TransmissionRecord::seed);
    m.def(
        "simulate",
        [](const StateSpaceModel& model, const std::vector<int>& symbols, double noise_var,
           std::uint64_t seed) { return simulate(model, symbols, noise_var, seed); },
        py::arg("model"), py::arg("symbols"), py::arg("noise_var"), py::arg("seed"));

    py::enum_<Schedule>(m, "Schedule").value("A", Schedule::A).value("B", Schedule::B);
    py::enum_<NegVarPolicy>(m, "NegVarPolicy")
        .value("allow", NegVarPolicy::allow)
        .value("clamp", NegVarPolicy::clamp);

    py::class_<AlphaSchedule>(m, "AlphaSchedule")
        .def_static("constant", &AlphaSchedule::constant, py::arg("a0"))
        .def_static("geometric", &AlphaSchedule::geometric, py::arg("a0"), py::arg("growth"))
        .def_static("two_phase", &AlphaSchedule::two_phase, py::arg("a0"), py::arg("growth"),
                    py::arg("hold"))
        .def_static("parse", &AlphaSchedule::parse, py::arg("text"));
    m.def(
        "alpha_at",
        [](const AlphaSchedule& s, int iteration) { return alpha_at(s, iteration).value(); },
        py::arg("schedule"), py::arg("iteration"));

    py::class_<EqualizerConfig>(m, "EqualizerConfig")
        .def(py::init<>())
        .def_readwrite("schedule", &EqualizerConfig::schedule)
        .def_readwrite("max_iters", &EqualizerConfig::max_iters)
        .def_readwrite("alpha", &EqualizerConfig::alpha)
        .def_readwrite("llr_max", &EqualizerConfig::llr_max)
        .def_readwrite("negvar_policy", &EqualizerConfig::negvar_policy)
        .def_readwrite("convergence_tol", &EqualizerConfig::convergence_tol)
        .def_readwrite("record_residuals", &EqualizerConfig::record_residuals)
        .def_readwrite("track_iteration_ber", &EqualizerConfig::track_iteration_ber);

    py::class_<EqualizerDiagnostics>(m, "EqualizerDiagnostics")
        .def_readonly("iterations_run", &EqualizerDiagnostics::iterations_run)
        .def_readonly("negvar_count", &EqualizerDiagnostics::negvar_count)
        .def_readonly("clamp_count", &EqualizerDiagnostics::clamp_count)
        .def_readonly("converged", &EqualizerDiagnostics::converged)
        .def_readonly("per_iteration_ber", &EqualizerDiagnostics::per_iteration_ber)
        .def_readonly("moment_residuals", &EqualizerDiagnostics::moment_residuals);

    m.def(
        "kalman_extrinsic",
        [](const StateSpaceModel& model, const std::vector<double>& obs, double noise_var,
           const std::vector<GaussianMessage>& inputs, NegVarPolicy policy) {
            EqualizerDiagnostics diag;
            auto out = kalman_extrinsic(model, obs, noise_var, inputs, policy, &diag);
            return py::make_tuple(out, diag);
        },
        py::arg("model"), py::arg("observations"), py::arg("noise_var"), py::arg("inputs"),
        py::arg("policy") = NegVarPolicy::clamp);
    m.def(
        "ep_equalize",
        [](const StateSpaceModel& model, const TransmissionRecord& record,
           const std::vector<double>& priors, const EqualizerConfig& config) {
            auto [llrs, diag] =
                ep_equalize(model, record, to_softbits(priors, config.llr_max), config);
            return py::make_tuple(to_llrs(llrs), diag);
        },
        py::arg("model"), py::arg("record"), py::arg("priors"), py::arg("config"));
    m.def(
        "lmmse_equalize",
        [](const StateSpaceModel& model, const TransmissionRecord& record,
           const std::vector<double>& priors) {
            return to_llrs(lmmse_equalize(model, record, to_softbits(priors, kDefaultLlrMax)));
        },
        py::arg("model"), py::arg("record"), py::arg("priors"));
    m.def(
        "bcjr_equalize",
        [](const ChannelSpec& spec, const TransmissionRecord& record,
           const std::vector<double>& priors, double noise_var) {
            return to_llrs(
                bcjr_equalize(spec, record, to_softbits(priors, kDefaultLlrMax), noise_var));
        },
        py::arg("spec"), py::arg("record"), py::arg("priors"), py::arg("noise_var"));
    m.def(
        "hard_decide",
        [](const std::vector<double>& llrs, const std::vector<double>& priors) {
            return hard_decide(to_softbits(llrs, kDefaultLlrMax),
                               to_softbits(priors, kDefaultLlrMax));
        },
        py::arg("llrs"), py::arg("priors"));

    py::class_<ConvCode> conv_code(m, "ConvCode");
    conv_code.def(py::init<>())
        .def_static("k7", &ConvCode::k7)
        .def_readwrite("constraint_length", &ConvCode::constraint_length)
        .def_readwrite("generators", &ConvCode::generators)
        .def_readwrite("termination", &ConvCode::termination)
        .def("memory", &ConvCode::memory)
        .def("coded_length", &ConvCode::coded_length, py::arg("info_bits"));
    py::enum_<ConvCode::Termination>(conv_code, "Termination")
        .value("terminated", ConvCode::Termination::terminated)
        .value("truncated", ConvCode::Termination::truncated);

    m.def(
        "conv_encode",
        [](const std::vector<int>& info, const ConvCode& code) {
            return conv_encode(info, code);
        },
        py::arg("info_bits"), py::arg("code"));
    m.def(
        "bcjr_decode",
        [](const std::vector<double>& coded_llrs, const ConvCode& code) {
            const SisoResult r = bcjr_decode(to_softbits(coded_llrs, kDefaultLlrMax), code);
            return py::make_tuple(to_llrs(r.extrinsic_coded), to_llrs(r.info_posterior));
        },
        py::arg("coded_llrs"), py::arg("code"),
        "Returns (extrinsic_coded_llrs, info_posterior_llrs).");

    py::class_<Interleaver>(m, "Interleaver")
        .def_static("random", &Interleaver::random, py::arg("length"), py::arg("seed"))
        .def_static("identity", &Interleaver::identity, py::arg("length"))
        .def_property_readonly("permutation", &Interleaver::permutation)
        .def("size", &Interleaver::size)
        .def("interleave",
             [](const Interleaver& il, const std::vector<double>& x) {
                 return il.interleave(std::span<const double>(x));
             })
        .def("deinterleave", [](const Interleaver& il, const std::vector<double>& x) {
            return il.deinterleave(std::span<const double>(x));
        });

    py::class_<TurboResult>(m, "TurboResult")
        .def_readonly("info_bits", &TurboResult::info_bits)
        .def_readonly("diagnostics", &TurboResult::diagnostics);
    m.def("turbo_equalize", &turbo_equalize, py::arg("record"), py::arg("model"),
          py::arg("code"), py::arg("interleaver"), py::arg("config"), py::arg("outer_iters"));

    py::enum_<Scheme>(m, "Scheme")
        .value("lmmse", Scheme::lmmse)
        .value("minka_A", Scheme::minka_A)
        .value("minka_B", Scheme::minka_B)
        .value("bcjr", Scheme::bcjr)
        .value("coded_std", Scheme::coded_std)
        .value("coded_minka", Scheme::coded_minka);

    py::class_<BerRecord>(m, "BerRecord")
        .def_readonly("snr_db", &BerRecord::snr_db)
        .def_readonly("scheme", &BerRecord::scheme)
        .def_readonly("iters", &BerRecord::iters)
        .def_readonly("bits", &BerRecord::bits)
        .def_readonly("errors", &BerRecord::errors)
        .def_readonly("ber", &BerRecord::ber)
        .def_readonly("negvar_count", &BerRecord::negvar_count)
        .def_readonly("clamp_count", &BerRecord::clamp_count)
        .def_readonly("wall_time_ms", &BerRecord::wall_time_ms)
        .def_readonly("seed", &BerRecord::seed);

    py::class_<SkippedPoint>(m, "SkippedPoint")
        .def_readonly("snr_db", &SkippedPoint::snr_db)
        .def_readonly("scheme", &SkippedPoint::scheme)
        .def_readonly("reason", &SkippedPoint::reason);

    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init<>())
        .def_readwrite("channel", &ExperimentConfig::channel)
        .def_readwrite("snr_db", &ExperimentConfig::snr_db)
        .def_readwrite("schemes", &ExperimentConfig::schemes)
        .def_readwrite("block_length", &ExperimentConfig::block_length)
        .def_readwrite("info_length", &ExperimentConfig::info_length)
        .def_readwrite("min_bits", &ExperimentConfig::min_bits)
        .def_readwrite("min_errors", &ExperimentConfig::min_errors)
        .def_readwrite("max_bits", &ExperimentConfig::max_bits)
        .def_readwrite("equalizer", &ExperimentConfig::equalizer)
        .def_readwrite("outer_iters", &ExperimentConfig::outer_iters)
        .def_readwrite("code", &ExperimentConfig::code)
        .def_readwrite("interleaver_seed", &ExperimentConfig::interleaver_seed)
        .def_readwrite("base_seed", &ExperimentConfig::base_seed)
        .def_readwrite("measure_time", &ExperimentConfig::measure_time);

    py::class_<ExperimentResult>(m, "ExperimentResult")
        .def_readonly("records", &ExperimentResult::records)
        .def_readonly("skipped", &ExperimentResult::skipped);

    m.def("run_ber_experiment", &run_ber_experiment, py::arg("config"),
          py::call_guard<py::gil_scoped_release>());
    m.def(
        "write_results",
        [](const std::vector<BerRecord>& records, const std::filesystem::path& path) {
            write_results(records, path);
        },
        py::arg("records"), py::arg("path"));
    m.def("read_results", &read_results, py::arg("path"));

    py::class_<VerifyOptions>(m, "VerifyOptions")
        .def(py::init<>())
        .def_readwrite("trials", &VerifyOptions::trials)
        .def_readwrite("seed", &VerifyOptions::seed);
    py::class_<VerifyCheck>(m, "VerifyCheck")
        .def_readonly("name", &VerifyCheck::name)
        .def_readonly("max_error", &VerifyCheck::max_error)
        .def_readonly("tolerance", &VerifyCheck::tolerance)
        .def_readonly("passed", &VerifyCheck::passed);
    py::class_<VerifyReport>(m, "VerifyReport")
        .def_readonly("checks", &VerifyReport::checks)
        .def_readonly("ok", &VerifyReport::ok);
    m.def("run_verification", &run_verification, py::arg("options") = VerifyOptions{},
          py::call_guard<py::gil_scoped_release>());

    m.def(
        "joint_gaussian_extrinsic",
        [](const ChannelSpec& spec, const std::vector<double>& obs, double noise_var,
           const std::vector<GaussianMessage>& inputs) {
            return joint_gaussian_extrinsic(spec, obs, noise_var, inputs);
        },
        py::arg("spec"), py::arg("observations"), py::arg("noise_var"), py::arg("inputs"));
    m.def(
        "exhaustive_map_llrs",
        [](const ChannelSpec& spec, const std::vector<double>& obs,
           const std::vector<double>& priors, double noise_var) {
            return to_llrs(exhaustive_map_llrs(spec, obs, to_softbits(priors, kDefaultLlrMax),
                                               noise_var));
        },
        py::arg("spec"), py::arg("observations"), py::arg("priors"), py::arg("noise_var"));
    m.def("two_point_moments", &two_point_moments, py::arg("p_plus"), py::arg("g"));
}
