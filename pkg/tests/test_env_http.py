"""Tests for the live loopback environment.

Timing assertions use orderings and generous bounds only; exact values
are machine-dependent.
"""

import numpy as np
import pytest

from configrl.envs.httpenv import (
    HttpEnv,
    LiveConfig,
    LoopbackClient,
    live_catalog,
    measure_window,
    serve,
)
from configrl.envs.sim import N_CONFIGS, ConfigSpec, Scenario
from configrl.errors import ContractError, EnvironmentFailure


@pytest.fixture(scope="module")
def catalog():
    return [
        LiveConfig(id=0, base_delay=0.0, compression_work=0, cache_hit_ratio=0.0),
        LiveConfig(id=1, base_delay=0.01, compression_work=0, cache_hit_ratio=0.0),
        LiveConfig(id=2, base_delay=0.05, compression_work=0, cache_hit_ratio=0.0),
        LiveConfig(id=3, base_delay=0.05, compression_work=0, cache_hit_ratio=1.0),
        LiveConfig(id=4, base_delay=0.0, compression_work=2000, cache_hit_ratio=0.0),
    ]


@pytest.fixture(scope="module")
def server(catalog):
    srv = serve(catalog, port=0)
    yield srv
    srv.shutdown()


@pytest.fixture(scope="module")
def client(server):
    c = LoopbackClient(server.port)
    yield c
    c.close()


def small_scenario():
    configs = tuple(
        ConfigSpec(
            id=i,
            label=f"c{i}",
            cost=round(0.01 * (i + 1), 3),
            latency_mean=0.1 + 0.005 * i,
            latency_jitter=0.0,
        )
        for i in range(N_CONFIGS)
    )
    return Scenario(name="live-test", configs=configs, t_max_seconds=0.02)


class TestServer:
    def test_initial_active_config_is_first(self, client):
        client.set_config(0)
        assert client.health() == 0

    def test_config_switch(self, client):
        client.set_config(3)
        assert client.health() == 3
        client.set_config(0)

    def test_unknown_config_rejected(self, client):
        with pytest.raises(EnvironmentFailure, match="rejected"):
            client.set_config(99)

    def test_body_is_one_kib(self, server):
        import http.client

        conn = http.client.HTTPConnection("127.0.0.1", server.port)
        conn.request("GET", "/")
        body = conn.getresponse().read()
        conn.close()
        assert len(body) == 1024

    def test_port_in_use_raises(self, server, catalog):
        with pytest.raises(OSError):
            serve(catalog, port=server.port)


class TestMeasureWindow:
    def test_delay_config_measures_within_bounds(self, client):
        client.set_config(2)  # 50 ms artificial delay
        t_raw, count = measure_window(client, 0.3)
        assert 0.045 <= t_raw <= 0.2
        assert count >= 1

    def test_full_cache_beats_delay(self, client):
        client.set_config(2)
        slow, _ = measure_window(client, 0.25)
        client.set_config(3)  # same delay, cache_hit_ratio 1.0
        fast, _ = measure_window(client, 0.25)
        assert fast < slow

    def test_request_count_lower_bound(self, client):
        client.set_config(1)  # 10 ms delay
        _, count = measure_window(client, 0.2)
        assert count >= 10

    def test_busywork_config_responds(self, client):
        client.set_config(4)
        t_raw, count = measure_window(client, 0.1)
        assert count >= 1
        assert t_raw >= 0.0


class TestHttpEnv:
    def test_reset_and_step_contract(self):
        env = HttpEnv(small_scenario(), window_secs=0.05)
        try:
            obs = env.reset(5)
            assert obs.state.shape == (N_CONFIGS,)
            assert obs.state.sum() == 1.0 and obs.state[0] == 1.0
            assert 0.0 <= obs.T <= 1.0
            assert 0.0 <= obs.C <= 1.0
            obs = env.step(7)
            assert obs.state[7] == 1.0
            assert 0.0 <= obs.T <= 1.0
        finally:
            env.close()

    def test_cost_comes_from_scenario(self):
        sc = small_scenario()
        env = HttpEnv(sc, window_secs=0.05)
        try:
            env.reset(0)  # identity permutation
            obs = env.step(4)
            assert obs.C == sc.configs[4].cost
        finally:
            env.close()

    def test_out_of_range_action_rejected(self):
        env = HttpEnv(small_scenario(), window_secs=0.05)
        try:
            env.reset(1)
            with pytest.raises(ContractError):
                env.step(N_CONFIGS)
        finally:
            env.close()

    def test_live_catalog_derivation(self):
        sc = small_scenario()
        catalog = live_catalog(sc)
        assert len(catalog) == N_CONFIGS
        assert catalog[3].base_delay == pytest.approx(
            sc.configs[3].latency_mean * sc.t_max_seconds
        )


class TestContractParity:
    """The simulator and the live env expose the same agent-facing surface."""

    @pytest.fixture(params=["sim", "http"])
    def env(self, request):
        from configrl.envs.sim import SimEnv

        sc = small_scenario()
        env = SimEnv(sc) if request.param == "sim" else HttpEnv(sc, window_secs=0.05)
        yield env
        env.close()

    def test_shared_contract(self, env):
        assert env.n_actions == N_CONFIGS
        assert env.state_dim == N_CONFIGS
        obs = env.reset(3)
        for required in ("state", "T", "C"):
            assert hasattr(obs, required)
        assert obs.state.shape == (N_CONFIGS,)
        assert np.isclose(obs.state.sum(), 1.0)
        obs = env.step(11)
        assert obs.state[11] == 1.0
        assert 0.0 <= obs.T <= 1.0
        assert 0.0 <= obs.C <= 1.0
