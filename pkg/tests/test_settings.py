from config.settings import Settings


def test_env_prefix_overrides(monkeypatch):
    monkeypatch.setenv("HAMLINK_MAX_SITES", "12")
    monkeypatch.setenv("HAMLINK_FERROMAGNETIC_EXCHANGE", "false")
    settings = Settings()
    assert settings.MAX_SITES == 12
    assert settings.FERROMAGNETIC_EXCHANGE is False
    assert any("반강자성" in warning for warning in settings.validate_settings())


def test_uses_settings_config_dict():
    assert "Config" not in vars(Settings)
    assert Settings.model_config["env_prefix"] == "HAMLINK_"
    assert Settings.model_config["extra"] == "ignore"
