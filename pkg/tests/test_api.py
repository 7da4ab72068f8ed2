import httpx
import pytest

from main import app, cache_service, settings


@pytest.fixture
async def client():
    cache_service.clear()
    transport = httpx.ASGITransport(app=app)
    async with httpx.AsyncClient(transport=transport, base_url="http://test") as ac:
        yield ac


async def test_root(client):
    response = await client.get("/")
    assert response.status_code == 200
    body = response.json()
    assert body["status"] == "healthy"
    assert body["experiments"] == ["fig2", "fig3", "ghz", "kicks", "sweep"]


async def test_health(client):
    response = await client.get("/health")
    assert response.status_code == 200
    body = response.json()
    assert body["backends"] == {"dense_eig": True, "krylov": True}
    assert body["backend_policy"]["dense_max_sites"] >= 1


async def test_config(client):
    response = await client.get("/config")
    assert response.status_code == 200
    assert "MAX_SITES" in response.json()["settings"]


async def test_run_ghz_and_cache(client, tmp_path):
    payload = {"sites_list": [2, 3], "output_dir": str(tmp_path)}
    first = await client.post("/experiments/ghz", json=payload)
    assert first.status_code == 200
    body = first.json()
    assert body["experiment"] == "ghz"
    assert body["metrics"]["N2_direct"] >= 1 - 1e-9
    assert body["cached"] is False
    assert (tmp_path / "ghz.csv").exists()

    second = await client.post("/experiments/ghz", json=payload)
    assert second.status_code == 200
    assert second.json()["cached"] is settings.USE_CACHE
    assert second.json()["metrics"] == body["metrics"]


async def test_invalid_body(client, tmp_path):
    response = await client.post("/experiments/fig2", json={"n_sites": 1, "output_dir": str(tmp_path)})
    assert response.status_code == 422
    assert "n_sites" in response.json()["error"]


async def test_unknown_experiment(client):
    response = await client.post("/experiments/fig9", json={})
    assert response.status_code == 422


async def test_unknown_field_is_rejected(client):
    response = await client.post("/experiments/fig2", json={"n_spins": 4})
    assert response.status_code == 422
    assert "n_spins" in response.json()["error"]
