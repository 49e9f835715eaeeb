import pytest

from mem_guard import settings as settings_module


def pytest_addoption(parser):
    parser.addoption("--run-live", action="store_true", default=False,
                     help="运行使用真实回环套接字、耗时较长的集成测试")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-live"):
        return
    skip_live = pytest.mark.skip(reason="需要 --run-live")
    for item in items:
        if "live" in item.keywords:
            item.add_marker(skip_live)


@pytest.fixture(autouse=True)
def isolated_settings(tmp_path, monkeypatch):
    """每个测试使用默认配置，实验根目录指向临时目录"""
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv(settings_module.HOME_ENV_VAR, str(tmp_path / "experiments"))
    settings_module._settings_instance = None
    yield
    settings_module._settings_instance = None
