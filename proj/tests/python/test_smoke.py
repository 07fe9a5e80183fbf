import math
import os
from pathlib import Path

import pytest

import spikerobust as sr

DATA = Path(os.environ.get("SPIKEROBUST_DATA_DIR", Path(__file__).resolve().parents[2] / "data"))


def test_kernel_peak():
    assert sr.spike_response(7.0) == pytest.approx(1.0, abs=1e-12)
    assert sr.spike_response(-1.0) == 0.0
    assert sr.spike_response_derivative(7.0) == 0.0


def test_chain_fires_at_kernel_peaks():
    net = sr.Network([1, 1, 1], terminals=1)
    net.set_weights(0, [1.0])
    net.set_weights(1, [1.0])
    times = net.simulate([0.0])
    assert times[1][0] == pytest.approx(8.0)
    assert times[2][0] == pytest.approx(16.0)
    net.set_weights(0, [0.5])
    assert math.isinf(net.simulate([0.0])[2][0])


def test_xor_training_reduces_error(tmp_path):
    net = sr.Network([3, 5, 1])
    net.set_inhibitory(1, 4)
    net.initialize(seed=3)
    samples = [sr.encode_xor(a, b) for a in (0, 1) for b in (0, 1)]
    errors = sr.train(net, samples, max_epochs=100, target_error=0.0, seed=3)
    assert len(errors) == 100
    assert errors[-1] < errors[0]
    path = tmp_path / "xor.ckpt"
    net.save(path)
    loaded = sr.Network.load(path)
    assert loaded.simulate(samples[0].inputs) == net.simulate(samples[0].inputs)


def test_perturbation_bounds_and_determinism():
    x0 = [1.0, -0.5]
    draws = sr.perturb(x0, "sinusoidal", 0.2, n=500, seed=4)
    assert len(draws) == 500
    assert all(abs(x[c] - x0[c]) <= 0.2 + 1e-15 for x in draws for c in range(2))
    assert draws == sr.perturb(x0, "sinusoidal", 0.2, n=500, seed=4)
    bound = lambda v: abs(v) * (1 - math.exp(-0.3 ** 2 / 2))
    gauss = sr.perturb(x0, "gaussian", 0.3, n=500, seed=4)
    assert all(abs(x[c] - x0[c]) <= bound(x0[c]) + 1e-15 for x in gauss for c in range(2))


def test_config_errors_raise():
    config = sr.default_config("T2")
    assert config["experiment.dataset"] == "xor"
    config["topology.colour"] = "red"
    with pytest.raises(sr.Error, match="CONFIG_ERROR"):
        sr.run_experiment(config, DATA)


def test_small_experiment_report():
    config = sr.default_config("T3")
    config["experiment.repetitions"] = 2
    config["experiment.epochs"] = "5"
    report = sr.run_experiment(config, DATA)
    assert report["seeds"] == [1, 2]
    assert len(report["rows"]) == 5
    for row in report["rows"]:
        assert 0.0 <= row["clean_rate"] <= 100.0
    assert report == sr.run_experiment(config, DATA)
