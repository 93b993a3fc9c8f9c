import numpy as np
import pytest

from arena import __version__
from arena.cli import EXIT_CONFIG, EXIT_OK, EXIT_REPLAY, main
from arena.engine import FULL, GameConfig, Mode, generate_board, outcome, step
from arena.replay import Replay, ReplayError, format_replay, parse_replay, validate_replay, write_replay


def _random_game(seed, cfg=GameConfig(max_ticks=80)):
    rng = np.random.default_rng(seed)
    s = generate_board(seed, cfg)
    log = []
    while s.result() is None:
        acts = tuple(int(rng.integers(6)) if a[2] else -1 for a in s.agents)
        log.append(acts)
        s = step(s, acts)
    return Replay(seed, cfg.mode, FULL, cfg, log, outcome(s).code)


# -- replay files --------------------------------------------------------------

@pytest.mark.parametrize("seed", range(6))
def test_replay_round_trip_is_exact(seed, tmp_path):
    cfg = GameConfig(max_ticks=80, mode=Mode.TEAM if seed % 2 else Mode.FFA, start_room=seed % 3)
    rep = _random_game(seed, cfg)
    text = format_replay(rep)
    back = parse_replay(text)
    assert back == rep and format_replay(back) == text
    assert validate_replay(back).ok
    path = tmp_path / "r.txt"
    write_replay(rep, path)
    assert path.read_text() == text


def test_default_board_has_no_config_line():
    rep = _random_game(1, GameConfig())
    assert not format_replay(rep).splitlines()[1].startswith("config")
    assert format_replay(_random_game(1)).splitlines()[1].startswith("config")


@pytest.mark.parametrize("text", [
    "", "hello\n", "pommer-replay v1 x ffa full\noutcome TTTT\n",
    "pommer-replay v1 0 chess full\noutcome TTTT\n",
    "pommer-replay v1 0 ffa full\n0 4 4 4 4\n",
    "pommer-replay v1 0 ffa full\n0 4 4 4\noutcome TTTT\n",
    "pommer-replay v1 0 ffa full\n1 4 4 4 4\noutcome TTTT\n",
    "pommer-replay v1 0 ffa full\n0 4 4 4 9\noutcome TTTT\n",
    "pommer-replay v1 0 ffa full\n0 4 4 4 4\noutcome TTXT\n",
    "pommer-replay v1 0 ffa full\nconfig colour=3\noutcome TTTT\n",
])
def test_malformed_replays(text):
    with pytest.raises(ReplayError):
        parse_replay(text)


def test_validator_catches_tampering():
    rep = _random_game(2)
    bad = Replay(rep.seed, rep.mode, rep.vision, rep.config, rep.actions,
                 "WWWW" if rep.outcome != "WWWW" else "TTTT")
    assert not validate_replay(bad).ok
    short = Replay(rep.seed, rep.mode, rep.vision, rep.config, rep.actions[:-1], rep.outcome)
    assert not validate_replay(short).ok
    longer = Replay(rep.seed, rep.mode, rep.vision, rep.config, rep.actions + [(4, 4, 4, 4)], rep.outcome)
    assert not validate_replay(longer).ok
    acts = list(rep.actions)
    acts[0] = (-1,) + acts[0][1:]
    assert "logged -1" in validate_replay(Replay(rep.seed, rep.mode, rep.vision, rep.config, acts,
                                                 rep.outcome)).message


# -- command line --------------------------------------------------------------

def _run_args(out, *extra):
    return ["run", "--agents", "femcts,mcts,rhea,osla", "--seeds", "2", "--games-per-seed", "1",
            "--budget-iters", "8", "--max-ticks", "25", "--out", str(out), "-q", *extra]


def test_cli_run_and_replay(tmp_path, capsys):
    seed_out = tmp_path / "seed.txt"
    assert main(_run_args(tmp_path, "--population-seed-out", str(seed_out))) == EXIT_OK
    out = capsys.readouterr().out
    assert "player" in out and "population seed" in out
    assert (tmp_path / "results.csv").exists() and (tmp_path / "games.csv").exists()
    replays = sorted((tmp_path / "replays").iterdir())
    assert len(replays) == 2
    assert main(["replay", str(replays[0])]) == EXIT_OK
    assert "ok:" in capsys.readouterr().out
    # the captured seed feeds straight back in
    assert main(_run_args(tmp_path / "again", "--population-seed-in", str(seed_out))) == EXIT_OK


def test_cli_replay_mismatch_exit_code(tmp_path):
    rep = _random_game(3)
    path = tmp_path / "bad.txt"
    write_replay(Replay(rep.seed, rep.mode, rep.vision, rep.config, rep.actions, "WLLL"
                        if rep.outcome != "WLLL" else "LWLL"), path)
    assert main(["replay", str(path)]) == EXIT_REPLAY
    path.write_text("garbage\n")
    assert main(["replay", str(path)]) == EXIT_REPLAY
    assert main(["replay", str(tmp_path / "missing.txt")]) == EXIT_CONFIG


@pytest.mark.parametrize("extra", [
    ["--agents", "mcts,mcts,mcts"],
    ["--agents", "mcts,mcts,mcts,chess"],
    ["--games-per-seed", "0"],
    ["--pop-size", "4", "--elites", "6"],
    ["--agents", "mcts,mcts,mcts,osla", "--population-seed-out", "x.txt"],
    ["--population-seed-in", "/nonexistent/seed.txt"],
    ["--mutation-strength", "0"],
])
def test_cli_config_errors(tmp_path, extra, capsys):
    assert main(_run_args(tmp_path) + extra) == EXIT_CONFIG
    assert "config error" in capsys.readouterr().err


def test_cli_unwritable_out(tmp_path):
    blocker = tmp_path / "f"
    blocker.write_text("")
    assert main(_run_args(blocker / "sub")) == EXIT_CONFIG


def test_cli_bad_sweep_visions(tmp_path):
    args = ["sweep-po", "--visions", "0,x", "--seeds", "1", "--games-per-seed", "1",
            "--budget-iters", "4", "--max-ticks", "5", "-q"]
    assert main(args) == EXIT_CONFIG


def test_cli_sweep(tmp_path, capsys):
    args = ["sweep-po", "--visions", "0,1,full", "--agents", "femcts,mcts,rhea,osla", "--seeds", "1",
            "--games-per-seed", "1", "--budget-iters", "4", "--max-ticks", "10", "--out", str(tmp_path), "-q"]
    assert main(args) == EXIT_OK
    rows = (tmp_path / "po_sweep.csv").read_text().splitlines()
    assert len(rows) == 1 + 3 * 4
    assert (tmp_path / "po_sweep.svg").exists() and (tmp_path / "vision_0" / "results.csv").exists()


def test_cli_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0 and __version__ in capsys.readouterr().out


def test_seed_list_syntax(tmp_path):
    assert main(_run_args(tmp_path, "--seeds", "7,9")) == EXIT_OK
    assert "7" in (tmp_path / "games.csv").read_text().splitlines()[1].split(",")[1]
