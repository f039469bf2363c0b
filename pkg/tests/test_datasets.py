import gzip
import http.server
import io
import threading
import zipfile

import pytest

from fracinfluence.datasets import CACHE_ENV, DatasetInfo, default_cache_dir, fetch_dataset, resolve
from fracinfluence.exceptions import DataError, IntegrityError, NetworkError
from fracinfluence.graph import read_edge_list

EDGES = b"# comment\n0 1\n1 2\n2 0\n"


class _Handler(http.server.BaseHTTPRequestHandler):
    files = {}
    hits = []

    def do_GET(self):
        self.hits.append(self.path)
        body = self.files.get(self.path)
        if body is None:
            self.send_error(404)
            return
        self.send_response(200)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass


@pytest.fixture
def server():
    zbuf = io.BytesIO()
    with zipfile.ZipFile(zbuf, "w") as zf:
        zf.writestr("deez/deez_edges.csv", "node_1,node_2\n0,1\n1,2\n")
    _Handler.files = {"/g.txt.gz": gzip.compress(EDGES), "/plain.txt": EDGES, "/d.zip": zbuf.getvalue()}
    _Handler.hits = []
    httpd = http.server.ThreadingHTTPServer(("127.0.0.1", 0), _Handler)
    t = threading.Thread(target=httpd.serve_forever, daemon=True)
    t.start()
    yield f"http://127.0.0.1:{httpd.server_address[1]}"
    httpd.shutdown()


def test_gzip_download_and_cache_hit(server, tmp_path):
    reg = {"toy": DatasetInfo("toy", server + "/g.txt.gz", directed=False, nodes=3, edges=3)}
    path = fetch_dataset("toy", tmp_path, registry=reg)
    assert path.read_bytes() == EDGES
    assert (tmp_path / "toy.txt.sha256").exists()
    assert read_edge_list(path, directed=False).edge_count == 6
    again = fetch_dataset("toy", tmp_path, registry=reg)
    assert again == path
    assert _Handler.hits == ["/g.txt.gz"]


def test_zip_csv_is_normalized(server, tmp_path):
    reg = {"dz": DatasetInfo("dz", server + "/d.zip", directed=False, nodes=3, edges=2,
                             member="deez/deez_edges.csv")}
    path = fetch_dataset("dz", tmp_path, registry=reg)
    assert path.read_text() == "0 1\n1 2\n"


def test_url_dataset(server, tmp_path):
    path = fetch_dataset(server + "/plain.txt", tmp_path)
    assert path.name == "plain.txt"
    assert read_edge_list(path).edge_count == 3


def test_count_mismatch_rejected(server, tmp_path):
    reg = {"toy": DatasetInfo("toy", server + "/g.txt.gz", directed=False, nodes=3, edges=99)}
    with pytest.raises(IntegrityError):
        fetch_dataset("toy", tmp_path, registry=reg)
    assert not (tmp_path / "toy.txt").exists()


def test_pinned_checksum_mismatch(server, tmp_path):
    reg = {"toy": DatasetInfo("toy", server + "/g.txt.gz", directed=False, sha256="0" * 64)}
    with pytest.raises(IntegrityError):
        fetch_dataset("toy", tmp_path, registry=reg)


def test_tampered_cache_removed(server, tmp_path):
    reg = {"toy": DatasetInfo("toy", server + "/g.txt.gz", directed=False, nodes=3, edges=3)}
    path = fetch_dataset("toy", tmp_path, registry=reg)
    path.write_text("0 1\n")
    with pytest.raises(IntegrityError):
        fetch_dataset("toy", tmp_path, registry=reg)
    assert not path.exists()
    assert fetch_dataset("toy", tmp_path, registry=reg).read_bytes() == EDGES


def test_network_failure_is_retryable(server, tmp_path):
    reg = {"gone": DatasetInfo("gone", server + "/missing.gz", directed=True)}
    with pytest.raises(NetworkError) as exc:
        fetch_dataset("gone", tmp_path, registry=reg, retries=0)
    assert exc.value.retryable


def test_unknown_name():
    with pytest.raises(DataError):
        resolve("not-a-dataset")
    assert resolve("FACEBOOK").nodes == 4039
    assert resolve("wiki-vote").directed


def test_cache_env(monkeypatch, tmp_path):
    monkeypatch.setenv(CACHE_ENV, str(tmp_path / "c"))
    assert default_cache_dir() == tmp_path / "c"
