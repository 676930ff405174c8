import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


class CannedServer:
    """Local chat-completion stand-in that replays queued (status, reply) pairs."""

    def __init__(self):
        self.queue = []
        self.requests = []
        self.default = (200, "TRUE")
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                body = self.rfile.read(int(self.headers["Content-Length"]))
                outer.requests.append({"body": json.loads(body), "headers": dict(self.headers)})
                status, reply = outer.queue.pop(0) if outer.queue else outer.default
                payload = json.dumps({"choices": [{"message": {"role": "assistant", "content": reply}}]})
                data = payload.encode() if status == 200 else b'{"error": "canned"}'
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(data)))
                self.end_headers()
                self.wfile.write(data)

            def log_message(self, *args):
                pass

        self.httpd = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self.url = f"http://127.0.0.1:{self.httpd.server_address[1]}/v1/chat/completions"
        self.thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)
        self.thread.start()

    def close(self):
        self.httpd.shutdown()
        self.httpd.server_close()


@pytest.fixture
def canned_server():
    srv = CannedServer()
    yield srv
    srv.close()


def pytest_configure(config):
    config.acceptance_results = []


@pytest.fixture
def acceptance_log(request):
    return request.config.acceptance_results


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = getattr(config, "acceptance_results", [])
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for line in results:
        terminalreporter.write_line(line)
