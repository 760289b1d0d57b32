import json
import time

import pytest
from fastapi.testclient import TestClient

from hapticlab.labconfig import validate
from hapticlab.service import LabRuntime, ProtocolError, create_app, parse_client_message


@pytest.fixture()
def client():
    runtime = LabRuntime(validate({}))
    app = create_app(runtime)
    with TestClient(app) as c:
        yield c


def recv_snapshot(ws, want=None, tries=400):
    """Pull frames until a snapshot (optionally matching a predicate) arrives."""
    for _ in range(tries):
        msg = json.loads(ws.receive_text())
        if msg.get("type") != "snapshot":
            continue
        if want is None or want(msg):
            return msg
    raise AssertionError("expected snapshot not seen")


class TestParseClientMessage:
    def test_pointer(self):
        m = parse_client_message('{"type":"pointer","pos":[0.5,-1,0],"device":0}')
        assert m == {"type": "pointer", "pos": [0.5, -1.0, 0.0], "device": 0}

    def test_param(self):
        m = parse_client_message('{"type":"param","name":"friction.mu_s","value":0.7}')
        assert m["name"] == "friction.mu_s"

    def test_scenario_and_reset(self):
        assert parse_client_message('{"type":"scenario","name":"coriolis","variant":"glider"}')["variant"] == "glider"
        assert parse_client_message('{"type":"reset"}') == {"type": "reset"}

    @pytest.mark.parametrize("bad", [
        "not json",
        "[1,2,3]",
        '{"type":"pointer","pos":[1,2]}',
        '{"type":"pointer","pos":[1,2,"x"]}',
        '{"type":"pointer","pos":[1,2,3],"device":7}',
        '{"type":"param","value":1}',
        '{"type":"scenario"}',
        '{"type":"warp"}',
        '{"no_type":true}',
    ])
    def test_malformed_rejected(self, bad):
        with pytest.raises(ProtocolError):
            parse_client_message(bad)


class TestWebSocket:
    def test_snapshots_stream_with_monotone_time(self, client):
        with client.websocket_connect("/ws") as ws:
            a = recv_snapshot(ws)
            b = recv_snapshot(ws)
            assert a["scenario"] == "friction"
            assert b["t"] > a["t"]
            assert a["v"] == 1
            assert "arrows" in a and "hud" in a and "bodies" in a

    def test_pointer_moves_virtual_device(self, client):
        with client.websocket_connect("/ws") as ws:
            recv_snapshot(ws)
            ws.send_text(json.dumps({"type": "pointer", "pos": [1.0, 0.0, 0.0], "device": 0}))
            # workspace half extent 0.06, friction scale 10 -> scene x ~ 0.6 along track
            snap = recv_snapshot(ws, want=lambda m: m["bodies"]["pointer"][0] > 0.3,
                                 tries=600)
            assert snap["bodies"]["pointer"][0] == pytest.approx(
                0.6 * __import__("math").cos(__import__("math").radians(30)), rel=1e-6)

    def test_param_round_trip_reflected_quickly(self, client):
        with client.websocket_connect("/ws") as ws:
            recv_snapshot(ws)
            t0 = time.monotonic()
            ws.send_text(json.dumps({"type": "param", "name": "friction.theta_deg",
                                     "value": 45.0}))
            while True:
                msg = json.loads(ws.receive_text())
                if msg.get("type") == "ack":
                    assert msg["of"] == "param"
                    continue
                if msg.get("type") == "snapshot" and abs(msg["bodies"]["theta"] - 0.7853981633974483) < 1e-12:
                    break
                assert time.monotonic() - t0 < 2.0
            assert time.monotonic() - t0 < 2.0

    def test_invalid_param_rejected_with_reason(self, client):
        with client.websocket_connect("/ws") as ws:
            recv_snapshot(ws)
            ws.send_text(json.dumps({"type": "param", "name": "port", "value": 99}))
            while True:
                msg = json.loads(ws.receive_text())
                if msg.get("type") == "reject":
                    assert "live-tunable" in msg["reason"]
                    break

    def test_param_invariant_violation_rejected(self, client):
        # mu_k above mu_s must bounce off the cross-field check
        with client.websocket_connect("/ws") as ws:
            recv_snapshot(ws)
            ws.send_text(json.dumps({"type": "param", "name": "friction.mu_k",
                                     "value": 0.95}))
            while True:
                msg = json.loads(ws.receive_text())
                if msg.get("type") == "reject":
                    assert "mu_s" in msg["reason"]
                    break

    def test_malformed_frame_disconnects_with_reason(self, client):
        with client.websocket_connect("/ws") as ws:
            ws.send_text("this is not json")
            while True:
                msg = json.loads(ws.receive_text())
                if msg.get("type") == "error":
                    break
            # server closes after the reason frame
            with pytest.raises(Exception):
                for _ in range(200):
                    ws.receive_text()

        # the service keeps running for new clients
        with client.websocket_connect("/ws") as ws2:
            assert recv_snapshot(ws2) is not None

    def test_reset_acked(self, client):
        with client.websocket_connect("/ws") as ws:
            recv_snapshot(ws)
            ws.send_text(json.dumps({"type": "reset"}))
            while True:
                msg = json.loads(ws.receive_text())
                if msg.get("type") == "ack":
                    assert msg["of"] == "reset"
                    break

    def test_scenario_switch(self, client):
        with client.websocket_connect("/ws") as ws:
            recv_snapshot(ws)
            ws.send_text(json.dumps({"type": "scenario", "name": "coriolis",
                                     "variant": "glider"}))
            snap = recv_snapshot(ws, want=lambda m: m["scenario"] == "coriolis",
                                 tries=600)
            assert snap["bodies"]["kind"] == "glider"
