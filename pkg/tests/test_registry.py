import pytest

import registry
from command_loader import CommandLoader
from registry import CheckResult, CommandResult, arg, check, command


@pytest.fixture
def empty_registry(monkeypatch):
    """测试期间换一张空注册表, 结束后恢复全局命令"""
    monkeypatch.setattr(registry, "_commands", {})
    monkeypatch.setattr(registry, "_checks", {})


def test_command_registration(empty_registry):
    @command("Atoms", description="原子", arguments=[arg("--sort", choices=["arg"])], aliases=["at"])
    def atoms_cmd(config):
        return CommandResult({"atoms": []})

    commands = registry.get_registered_commands()
    assert set(commands) == {"atoms", "at"}
    info = commands["atoms"]
    assert info.usage == "clark-lab Atoms"
    assert info.arguments[0].flags == ("--sort",)
    assert info.handler(None).data == {"atoms": []}
    assert atoms_cmd(None).exit_code == 0


def test_help_text_skips_hidden_and_aliases(empty_registry):
    @command("shown", description="可见", aliases=["s"])
    def shown(config):
        return {}

    @command("secret", hidden=True)
    def secret(config):
        return {}

    text = registry.get_help_text()
    assert "shown - 可见 (别名: s)" in text
    assert "secret" not in text
    assert text.count("shown") == 1


def test_check_suites(empty_registry):
    @check("fast", description="两个套件都跑")
    def fast(quick):
        return CheckResult("fast", passed=True)

    @check("slow", suites=("core",))
    def slow(quick):
        return CheckResult("slow", passed=quick is False)

    assert [c.name for c in registry.get_registered_checks()] == ["fast", "slow"]
    assert [c.name for c in registry.get_registered_checks("quick")] == ["fast"]
    assert registry.get_registered_checks("core")[1].handler(False).passed


def test_clear_registry(empty_registry):
    @command("one")
    def one(config):
        return {}

    registry.clear_registry()
    assert registry.get_registered_commands() == {}
    assert registry.get_registered_checks() == []


def test_check_result_dict():
    doc = CheckResult("x", passed=False, value=0.5, tolerance=0.1, detail="d").to_dict()
    assert doc == {"name": "x", "passed": False, "value": 0.5, "tolerance": 0.1, "detail": "d"}


def test_loader_reads_command_packages(empty_registry, tmp_path):
    good = tmp_path / "hello"
    good.mkdir()
    (good / "__init__.py").write_text(
        "from registry import command\n\n\n@command('hello')\ndef hello(config):\n    return {'hi': 1}\n",
        encoding="utf-8",
    )
    broken = tmp_path / "broken"
    broken.mkdir()
    (broken / "__init__.py").write_text("raise RuntimeError('boom')\n", encoding="utf-8")
    skipped = tmp_path / "_private"
    skipped.mkdir()
    (skipped / "__init__.py").write_text("raise RuntimeError('never')\n", encoding="utf-8")

    loader = CommandLoader(tmp_path)
    loaded = loader.load_all()
    assert list(loaded) == ["hello"]
    assert "hello" in registry.get_registered_commands()
    status = loader.get_status()
    assert status["commands_count"] == 1
    assert status["errors"][0]["error"] == "boom"


def test_loader_missing_dir(tmp_path):
    assert CommandLoader(tmp_path / "nope").load_all() == {}


def test_builtin_commands_load(empty_registry):
    loader = CommandLoader()
    loader.load_all()
    assert loader.load_errors == []
    names = {info.name for info in registry.get_registered_commands().values()}
    assert {"clark", "counting", "essnorm", "verify", "validate", "corpus", "modelspace"} <= names
    checks = {c.name for c in registry.get_registered_checks()}
    assert {"herglotz", "mass-budget", "stanton", "poltoratski"} <= checks


def test_loader_reload_drops_stale_commands(empty_registry, tmp_path):
    pkg = tmp_path / "hello"
    pkg.mkdir()
    (pkg / "__init__.py").write_text(
        "from registry import command\n\n\n@command('hello')\ndef hello(config):\n    return {}\n",
        encoding="utf-8",
    )
    loader = CommandLoader(tmp_path)
    loader.load_all()

    @command("stray")
    def stray(config):
        return {}

    loader.reload_all()
    assert set(registry.get_registered_commands()) == {"hello"}
    assert loader.get_status()["loaded_commands"] == ["hello"]
