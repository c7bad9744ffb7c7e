"""Command-line behaviour: outputs, exit codes, and the serve lifecycle."""

from __future__ import annotations

import asyncio
import json
import signal
import socket
import subprocess
import sys

import pytest

from nethelpers import NetClient, make_room_log, run

from domino101.cli import EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, main
from domino101.replay import validate_log
from domino101.rules import deal_space_count


def free_port() -> int:
    s = socket.socket()
    s.bind(("127.0.0.1", 0))
    port = s.getsockname()[1]
    s.close()
    return port


class TestDealspace:
    """The exact deal-count identity, printed with its factors."""

    def test_factors_and_product(self, capsys):
        assert main(["dealspace"]) == EXIT_OK
        out = capsys.readouterr().out.splitlines()
        values = [int(line.split("=")[1].replace(",", "")) for line in out]
        c28, c21, c14, product = values
        assert (c28, c21, c14) == (1_184_040, 116_280, 3_432)
        assert product == c28 * c21 * c14 == deal_space_count()
        assert product == 472_518_347_558_400
        assert product % 1_184_040 == 0

    def test_formatting_uses_separators(self, capsys):
        main(["dealspace"])
        out = capsys.readouterr().out
        assert "472,518,347,558,400" in out
        assert "1,184,040" in out


class TestSim:
    """Headless tournaments: deterministic reports, strict usage."""

    def test_csv_to_stdout(self, capsys):
        rc = main(["sim", "--matches", "2", "--seed", "5"])
        assert rc == EXIT_OK
        out = capsys.readouterr().out
        header, row = out.splitlines()
        assert header.startswith("seats,matches,rounds,wins_ac")
        assert row.startswith('"l1,l1,l1,l1",2,')

    def test_identical_runs_byte_identical(self, tmp_path):
        args = [
            "sim", "--seats", "l3,l1,l3,l1", "--matches", "3", "--seed", "11",
        ]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(args + ["--out", str(a)]) == EXIT_OK
        assert main(args + ["--out", str(b)]) == EXIT_OK
        assert a.read_bytes() == b.read_bytes()

    def test_json_format(self, capsys):
        rc = main(["sim", "--matches", "2", "--seed", "5", "--format", "json"])
        assert rc == EXIT_OK
        row = json.loads(capsys.readouterr().out)
        assert row["matches"] == 2
        assert row["wins_ac"] + row["wins_bd"] + row["ties"] == row["rounds"]
        assert row["rng"] == "python-random-mt19937"

    def test_workers_do_not_change_results(self, tmp_path):
        args = ["sim", "--matches", "4", "--seed", "2"]
        one, two = tmp_path / "w1.csv", tmp_path / "w2.csv"
        main(args + ["--workers", "1", "--out", str(one)])
        main(args + ["--workers", "2", "--out", str(two)])
        assert one.read_bytes() == two.read_bytes()

    def test_budget_is_exactly_one_of(self):
        with pytest.raises(SystemExit) as err:
            main(["sim", "--rounds", "5", "--matches", "5"])
        assert err.value.code == EXIT_USAGE
        with pytest.raises(SystemExit) as err:
            main(["sim"])
        assert err.value.code == EXIT_USAGE

    def test_bad_seats_spec_is_usage_error(self):
        with pytest.raises(SystemExit) as err:
            main(["sim", "--seats", "l9,l1,l1,l1", "--matches", "1"])
        assert err.value.code == EXIT_USAGE
        with pytest.raises(SystemExit) as err:
            main(["sim", "--seats", "l1,l1,l1", "--matches", "1"])
        assert err.value.code == EXIT_USAGE

    def test_nonpositive_budget_rejected(self):
        assert main(["sim", "--matches", "0"]) == EXIT_USAGE
        assert main(["sim", "--rounds", "-3"]) == EXIT_USAGE


@pytest.fixture(scope="module")
def log_path(tmp_path_factory):
    td = tmp_path_factory.mktemp("clilog")
    path, _ = make_room_log(td, seed=13, room_id="cli")
    return path


class TestReplayCommand:
    """Log inspection through the CLI surface."""

    def test_validate_ok(self, log_path, capsys):
        assert main(["replay", str(log_path), "--validate"]) == EXIT_OK
        out = capsys.readouterr().out.strip()
        assert out.startswith("OK, ")
        assert "final score" in out

    def test_timeline_ends_with_verdict(self, log_path, capsys):
        assert main(["replay", str(log_path)]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert any(" plays " in l for l in lines)
        assert lines[-1].startswith("OK, ")

    def test_tampered_log_fails_with_line(self, log_path, tmp_path, capsys):
        records = [json.loads(l) for l in log_path.read_text().splitlines()]
        for i, rec in enumerate(records):
            if rec["type"] == "played":
                rec["data"]["tile"] = [6, 6] if rec["data"]["tile"] != [6, 6] else [0, 1]
                line_no = i + 1
                break
        bad = tmp_path / "bad.jsonl"
        bad.write_text(
            "".join(json.dumps(r, separators=(",", ":")) + "\n" for r in records)
        )
        assert main(["replay", str(bad), "--validate"]) == EXIT_RUNTIME
        assert f"line {line_no}:" in capsys.readouterr().out

    def test_truncated_log_is_a_valid_prefix(self, log_path, tmp_path, capsys):
        lines = log_path.read_text().splitlines()
        cut = tmp_path / "cut.jsonl"
        cut.write_text("\n".join(lines[:25]) + "\n")
        assert main(["replay", str(cut), "--validate"]) == EXIT_OK
        assert "(truncated)" in capsys.readouterr().out

    def test_missing_log_is_runtime_error(self, tmp_path):
        assert main(["replay", str(tmp_path / "none.jsonl")]) == EXIT_RUNTIME


class TestServeCommand:
    """The long-running service: config floors, port conflicts, shutdown."""

    def test_move_timeout_floor_is_usage_error(self):
        with pytest.raises(SystemExit) as err:
            main(["serve", "--move-timeout", "500"])
        assert err.value.code == EXIT_USAGE

    def test_busy_port_is_runtime_error(self, tmp_path):
        blocker = socket.socket()
        blocker.bind(("127.0.0.1", 0))
        blocker.listen(1)
        busy = blocker.getsockname()[1]
        try:
            proc = subprocess.run(
                [
                    sys.executable, "-m", "domino101.cli", "serve",
                    "--port", str(busy), "--ws-port", str(free_port()),
                    "--log-dir", str(tmp_path),
                ],
                capture_output=True, text=True, timeout=30,
            )
        finally:
            blocker.close()
        assert proc.returncode == EXIT_RUNTIME
        assert "serve:" in proc.stderr

    def test_interrupt_leaves_valid_log_prefix(self, tmp_path):
        port, ws_port = free_port(), free_port()
        proc = subprocess.Popen(
            [
                sys.executable, "-m", "domino101.cli", "serve",
                "--port", str(port), "--ws-port", str(ws_port),
                "--seed", "23", "--log-dir", str(tmp_path),
                "--expected-humans", "1",
            ],
            stdout=subprocess.PIPE, stderr=subprocess.STDOUT, text=True,
        )
        try:
            banner = proc.stdout.readline()
            assert "domino101 server" in banner

            async def scenario():
                client = None
                for _ in range(100):
                    try:
                        client = await NetClient.connect(port, "sig")
                        break
                    except OSError:
                        await asyncio.sleep(0.05)
                assert client is not None, "server never came up"
                await client.join()
                own_moves = 0
                while own_moves < 2:
                    env = await client.recv()
                    if (
                        env.type == "turn"
                        and env.data["seat"] == client.seat.value
                    ):
                        msg_type, data = client.pick()
                        await client.send(msg_type, data)
                        own_moves += 1
                client.close()

            run(scenario())
            proc.send_signal(signal.SIGINT)
            assert proc.wait(timeout=20) == EXIT_OK
        finally:
            if proc.poll() is None:
                proc.kill()
                proc.wait()

        logs = list((tmp_path / "main").glob("*.jsonl"))
        assert len(logs) == 1
        report = validate_log(logs[0])
        assert report.ok, report.verdict
        assert report.truncated  # interrupted mid-match, valid prefix
