"""Smoke tests for the Python bindings."""

import math

import pytest

import eqsim


def test_message_roundtrip():
    g = eqsim.GaussianMessage.from_mean_var(1.0, 0.5)
    assert g.weight == pytest.approx(2.0)
    assert g.wmean == pytest.approx(2.0)
    mean, var = g.mean_var()
    assert mean == pytest.approx(1.0)
    assert var == pytest.approx(0.5)

    quotient = eqsim.divide(eqsim.GaussianMessage(1.0, 0.5), eqsim.GaussianMessage(2.0, 1.0))
    assert quotient.weight == pytest.approx(-1.0)
    assert quotient.corrective()

    with pytest.raises(eqsim.NonInformativeMessageError):
        eqsim.GaussianMessage().mean_var()


def test_conversions():
    s = eqsim.SoftBit(math.log(4.0))
    mean, var = eqsim.softbit_moments(s)
    assert mean == pytest.approx(0.6)
    assert var == pytest.approx(0.64)

    incoming = eqsim.GaussianMessage.from_mean_var(1.0, 1.0)
    minka = eqsim.minka_gaussian(eqsim.SoftBit(0.0), incoming)
    assert minka is not None
    assert minka.weight == pytest.approx(1.3811, abs=1e-4)
    assert minka.wmean == pytest.approx(0.8134, abs=1e-4)

    assert eqsim.minka_gaussian(eqsim.SoftBit(0.0), eqsim.GaussianMessage()) is None

    damped = eqsim.damped_msg(eqsim.GaussianMessage(2.0, 1.0), eqsim.GaussianMessage(4.0, 2.0), 0.5)
    assert damped.weight == pytest.approx(3.0)


def test_memoryless_equalizer_matches_matched_filter():
    spec = eqsim.ChannelSpec.fir([1.0])
    model = eqsim.realize_state_space(spec)
    record = eqsim.simulate(model, [1, -1, 1, 1, -1], 0.25, seed=7)
    llrs = eqsim.lmmse_equalize(model, record, [0.0] * 5)
    for llr, y in zip(llrs, record.observations):
        assert llr == pytest.approx(2.0 * y / 0.25, rel=1e-9)

    decisions = eqsim.hard_decide(llrs, [0.0] * 5)
    assert all(d in (-1, 1) for d in decisions)


def test_ep_equalizer_runs_and_reports():
    spec = eqsim.ChannelSpec.preset("proakis5")
    model = eqsim.realize_state_space(spec)
    record = eqsim.simulate(model, [1, -1, 1, 1, -1, -1, 1, -1] * 4, 0.05, seed=3)
    config = eqsim.EqualizerConfig()
    config.max_iters = 10
    llrs, diag = eqsim.ep_equalize(model, record, [0.0] * 32, config)
    assert len(llrs) == 32
    assert diag.iterations_run >= 1


def test_alpha_schedule():
    geo = eqsim.AlphaSchedule.geometric(0.05, 1.2)
    assert eqsim.alpha_at(geo, 0) == pytest.approx(0.05)
    assert eqsim.alpha_at(geo, 17) == 1.0


def test_coded_chain_noiseless():
    code = eqsim.ConvCode.k7()
    info = [1, 0, 1, 1, 0, 0, 1, 0]
    coded = eqsim.conv_encode(info, code)
    assert len(coded) == code.coded_length(len(info))
    ext, post = eqsim.bcjr_decode([20.0 * s for s in coded], code)
    decoded = [0 if l >= 0 else 1 for l in post]
    assert decoded == info


def test_ber_experiment_and_results_io(tmp_path):
    config = eqsim.ExperimentConfig()
    config.channel = eqsim.ChannelSpec.preset("proakis5")
    config.snr_db = [8.0]
    config.schemes = [eqsim.Scheme.lmmse]
    config.block_length = 64
    config.min_bits = 256
    config.min_errors = 1
    result = eqsim.run_ber_experiment(config)
    assert len(result.records) == 1
    record = result.records[0]
    assert record.bits >= 256

    path = tmp_path / "results.csv"
    eqsim.write_results(result.records, path)
    back = eqsim.read_results(path)
    assert len(back) == 1
    assert back[0].bits == record.bits
    assert back[0].scheme == eqsim.Scheme.lmmse


def test_verification_small():
    options = eqsim.VerifyOptions()
    options.trials = 5
    report = eqsim.run_verification(options)
    assert report.ok
    assert len(report.checks) == 5
