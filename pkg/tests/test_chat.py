from __future__ import annotations

import json

import httpx
import pytest

from adaptgrasp.estimation.chat import ChatClient, ChatConfig, ConfigError, UpstreamError

CFG = ChatConfig(base_url="http://llm.test/v1/", model="m", max_retries=2)


def reply(text):
    return httpx.Response(200, json={"choices": [{"message": {"content": text}}]})


def test_config_from_file_and_env(tmp_path):
    path = tmp_path / "chat.json"
    path.write_text(json.dumps({"base_url": "http://a", "model": "x", "temperature": 0.2}))
    cfg = ChatConfig.load(path, environ={"ADAPTGRASP_CHAT_MODEL": "y"})
    assert (cfg.base_url, cfg.model, cfg.temperature) == ("http://a", "y", 0.2)
    env = {"ADAPTGRASP_CHAT_BASE_URL": "http://b", "ADAPTGRASP_CHAT_MODEL": "z"}
    assert ChatConfig.load(environ=env).base_url == "http://b"


def test_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        ChatConfig.load(environ={})
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        ChatConfig.load(bad, environ={})
    extra = tmp_path / "extra.json"
    extra.write_text(json.dumps({"base_url": "http://a", "model": "x", "colour": 1}))
    with pytest.raises(ConfigError):
        ChatConfig.load(extra, environ={})


def test_complete_sends_request_and_key():
    seen = []

    def handler(request):
        seen.append(request)
        return reply("hello")

    client = ChatClient(CFG, httpx.MockTransport(handler), environ={"ADAPTGRASP_CHAT_API_KEY": "sk"})
    assert client.complete("hi") == "hello"
    req = seen[0]
    assert str(req.url) == "http://llm.test/v1/chat/completions"
    assert req.headers["Authorization"] == "Bearer sk"
    body = json.loads(req.content)
    assert body["messages"] == [{"role": "user", "content": "hi"}]
    assert body["model"] == "m"


def test_retries_then_succeeds():
    codes = iter([503, 429])

    def handler(request):
        code = next(codes, 200)
        return reply("ok") if code == 200 else httpx.Response(code)

    client = ChatClient(CFG, httpx.MockTransport(handler), environ={})
    assert client.complete("hi") == "ok"
    assert [a["status"] for a in client.transcript] == [503, 429, 200]


def test_gives_up_after_retries():
    client = ChatClient(CFG, httpx.MockTransport(lambda r: httpx.Response(500)), environ={})
    with pytest.raises(UpstreamError) as info:
        client.complete("hi")
    assert len(info.value.transcript) == 3


def test_client_error_not_retried():
    client = ChatClient(CFG, httpx.MockTransport(lambda r: httpx.Response(401)), environ={})
    with pytest.raises(UpstreamError) as info:
        client.complete("hi")
    assert len(info.value.transcript) == 1


def test_transport_error_and_malformed_body():
    def boom(request):
        raise httpx.ConnectError("refused", request=request)

    with pytest.raises(UpstreamError):
        ChatClient(CFG, httpx.MockTransport(boom), environ={}).complete("hi")
    junk = ChatClient(CFG, httpx.MockTransport(lambda r: httpx.Response(200, json={"x": 1})), environ={})
    with pytest.raises(UpstreamError):
        junk.complete("hi")


def test_query_parallel_keeps_order():
    counter = iter(range(100))

    def handler(request):
        return reply(str(next(counter)))

    out = ChatClient(CFG, httpx.MockTransport(handler), environ={}).query_parallel("p", 10)
    assert sorted(out, key=int) == [str(i) for i in range(10)]
    with pytest.raises(ValueError):
        ChatClient(CFG, environ={}).query_parallel("p", 0)
